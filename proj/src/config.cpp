#include "dosetc/config.hpp"

#include <json.hpp>

namespace dosetc {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) { throw config_error("config: " + message); }

const json& require(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) {
        fail(where + ": missing required key '" + key + "'");
    }
    return obj.at(key);
}

double number(const json& value, const std::string& where) {
    if (!value.is_number()) fail(where + ": expected a number");
    return value.get<double>();
}

double number_field(const json& obj, const std::string& key, const std::string& where) {
    return number(require(obj, key, where), where + "." + key);
}

double number_or(const json& obj, const std::string& key, double fallback,
                 const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    return number(obj.at(key), where + "." + key);
}

Matrix parse_matrix(const json& value, const std::string& where) {
    if (!value.is_array() || value.empty()) fail(where + ": expected a non-empty array of rows");
    const std::size_t rows = value.size();
    if (!value.at(0).is_array() || value.at(0).empty()) {
        fail(where + ": rows must be non-empty arrays");
    }
    const std::size_t cols = value.at(0).size();
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const json& row = value.at(r);
        if (!row.is_array() || row.size() != cols) fail(where + ": ragged rows");
        for (std::size_t c = 0; c < cols; ++c) {
            m(r, c) = number(row.at(c), where);
        }
    }
    if (!m.all_finite()) fail(where + ": entries must be finite");
    return m;
}

std::vector<double> parse_vector(const json& value, const std::string& where) {
    if (!value.is_array()) fail(where + ": expected an array");
    std::vector<double> out;
    for (const json& x : value) out.push_back(number(x, where));
    return out;
}

IntervalSet parse_intervals(const json& value, const std::string& where) {
    if (!value.is_array()) fail(where + ": expected an array of [start, length] pairs");
    std::vector<Interval> intervals;
    for (const json& pair : value) {
        if (!pair.is_array() || pair.size() != 2) {
            fail(where + ": each entry must be a [start, length] pair");
        }
        const double start = number(pair.at(0), where);
        const double length = number(pair.at(1), where);
        if (length < 0.0) fail(where + ": interval length must be nonnegative");
        intervals.push_back({start, length});
    }
    return IntervalSet(std::move(intervals));
}

std::vector<double> parse_scalar_list(const json& obj, const std::string& key,
                                      std::size_t count, double fallback,
                                      const std::string& where) {
    if (!obj.contains(key)) return std::vector<double>(count, fallback);
    const json& value = obj.at(key);
    if (value.is_number()) return std::vector<double>(count, value.get<double>());
    const std::vector<double> list = parse_vector(value, where + "." + key);
    if (list.size() != count) fail(where + "." + key + ": expected one entry per channel");
    return list;
}

DisturbanceSpec parse_disturbance(const json& obj) {
    DisturbanceSpec spec;
    if (!obj.is_object()) fail("sim.disturbance: expected an object");
    const std::string kind = require(obj, "kind", "sim.disturbance").get<std::string>();
    if (kind == "zero") {
        spec.kind = DisturbanceSpec::Kind::zero;
    } else if (kind == "constant") {
        spec.kind = DisturbanceSpec::Kind::constant;
    } else if (kind == "sinusoid") {
        spec.kind = DisturbanceSpec::Kind::sinusoid;
    } else if (kind == "seeded-bounded-noise") {
        spec.kind = DisturbanceSpec::Kind::seeded_bounded_noise;
    } else {
        fail("sim.disturbance.kind: unknown kind '" + kind + "'");
    }
    spec.amplitude = number_or(obj, "amplitude", 0.0, "sim.disturbance");
    spec.frequency = number_or(obj, "frequency", 1.0, "sim.disturbance");
    if (obj.contains("seed")) spec.seed = obj.at("seed").get<std::uint64_t>();
    if (spec.amplitude < 0.0) fail("sim.disturbance.amplitude: must be nonnegative");
    return spec;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json intervals_to_json(const IntervalSet& set) {
    json out = json::array();
    for (const Interval& iv : set.intervals()) {
        out.push_back(json::array({iv.start, iv.length}));
    }
    return out;
}

}  // namespace

static ScenarioConfig parse_scenario_config_impl(const json& doc) {
    ScenarioConfig cfg;

    const json& plant = require(doc, "plant", "document");
    cfg.a = parse_matrix(require(plant, "A", "plant"), "plant.A");
    cfg.b = parse_matrix(require(plant, "B", "plant"), "plant.B");
    const json& c_list = require(plant, "C", "plant");
    if (!c_list.is_array() || c_list.empty()) fail("plant.C: expected a list of matrices");
    for (std::size_t i = 0; i < c_list.size(); ++i) {
        cfg.channels.push_back(parse_matrix(c_list.at(i), "plant.C[" + std::to_string(i) + "]"));
    }
    const std::size_t n_s = cfg.channels.size();

    if (doc.contains("gains")) {
        const json& gains = doc.at("gains");
        cfg.has_gains = true;
        cfg.gains.k = parse_matrix(require(gains, "K", "gains"), "gains.K");
        cfg.synthesize = gains.value("synthesize", false);
        if (!cfg.synthesize) {
            const json& l_list = require(gains, "L", "gains");
            if (!l_list.is_array() || l_list.size() != n_s) {
                fail("gains.L: expected one matrix per channel");
            }
            for (std::size_t i = 0; i < n_s; ++i) {
                cfg.gains.l.push_back(
                    parse_matrix(l_list.at(i), "gains.L[" + std::to_string(i) + "]"));
            }
            for (const char* key : {"P_p", "P_e"}) {
                const json& p_list = require(gains, key, "gains");
                if (!p_list.is_array() || p_list.size() != n_s) {
                    fail(std::string("gains.") + key + ": expected one matrix per channel");
                }
                auto& target = std::string(key) == "P_p" ? cfg.gains.p_p : cfg.gains.p_e;
                for (std::size_t i = 0; i < n_s; ++i) {
                    target.push_back(parse_matrix(
                        p_list.at(i), "gains." + std::string(key) + "[" + std::to_string(i) + "]"));
                }
            }
            cfg.gains.psi1 = number_field(gains, "psi1", "gains");
            cfg.gains.psi2 = number_field(gains, "psi2", "gains");
            cfg.gains.eps1 = parse_scalar_list(gains, "eps1", n_s, 1.0, "gains");
            cfg.gains.eps2 = parse_scalar_list(gains, "eps2", n_s, 1.0, "gains");
            cfg.gains.eps3 = parse_scalar_list(gains, "eps3", n_s, kDefaultEps34, "gains");
            cfg.gains.eps4 = parse_scalar_list(gains, "eps4", n_s, kDefaultEps34, "gains");
        }
    }

    if (doc.contains("trigger")) {
        const json& trigger = doc.at("trigger");
        cfg.v_threshold = number_or(trigger, "v_threshold", 1e-3, "trigger");
        cfg.retry_period = number_or(trigger, "retry_period", 0.0, "trigger");
        if (trigger.contains("underline_Delta")) {
            cfg.underline_delta_override = number(trigger.at("underline_Delta"),
                                                  "trigger.underline_Delta");
            if (!(*cfg.underline_delta_override > 0.0)) {
                fail("trigger.underline_Delta: must be positive");
            }
        }
        if (cfg.v_threshold < 0.0) fail("trigger.v_threshold: must be nonnegative");
        if (cfg.retry_period < 0.0) fail("trigger.retry_period: must be nonnegative");
    }

    if (doc.contains("attack")) {
        const json& attack = doc.at("attack");
        cfg.generate_attack = attack.value("generate", false);
        if (attack.contains("seed")) cfg.attack_seed = attack.at("seed").get<std::uint64_t>();
        if (!cfg.generate_attack) {
            AttackScenario scenario;
            const json& sensors = require(attack, "sensor_dos", "attack");
            if (!sensors.is_array() || sensors.size() != n_s) {
                fail("attack.sensor_dos: expected one interval list per channel");
            }
            for (std::size_t i = 0; i < n_s; ++i) {
                scenario.sensor_dos.push_back(parse_intervals(
                    sensors.at(i), "attack.sensor_dos[" + std::to_string(i) + "]"));
            }
            if (attack.contains("actuator_dos")) {
                scenario.actuator_dos =
                    parse_intervals(attack.at("actuator_dos"), "attack.actuator_dos");
            }
            scenario.fsdos_includes_actuator = attack.value("fsdos_includes_actuator", true);
            cfg.attack = std::move(scenario);
        }
    }

    if (doc.contains("assumptions")) {
        const json& a = doc.at("assumptions");
        AssumptionParams params;
        params.varkappa = number_field(a, "kappa", "assumptions");
        params.tau_d = number_field(a, "tau_D", "assumptions");
        params.eta = number_field(a, "eta", "assumptions");
        params.tau_f = number_field(a, "tau_F", "assumptions");
        params.zeta = number_field(a, "zeta", "assumptions");
        params.t_ratio = number_field(a, "T", "assumptions");
        if (params.varkappa < 0.0 || params.eta < 0.0 || params.zeta < 0.0) {
            fail("assumptions: kappa, eta, zeta must be nonnegative");
        }
        if (!(params.tau_d > 0.0) || !(params.tau_f > 0.0)) {
            fail("assumptions: tau_D and tau_F must be positive");
        }
        if (!(params.t_ratio > 1.0)) fail("assumptions: T must exceed 1");
        cfg.assumptions = params;
    }

    if (doc.contains("sim")) {
        const json& sim = doc.at("sim");
        cfg.has_sim = true;
        cfg.sim.dt = number_field(sim, "dt", "sim");
        cfg.sim.horizon = number_field(sim, "horizon", "sim");
        cfg.sim.x_p0 = parse_vector(require(sim, "x0", "sim"), "sim.x0");
        cfg.sim.x_e0 = sim.contains("xe0")
                           ? parse_vector(sim.at("xe0"), "sim.xe0")
                           : std::vector<double>(cfg.sim.x_p0.size(), 0.0);
        if (sim.contains("disturbance")) {
            cfg.sim.disturbance = parse_disturbance(sim.at("disturbance"));
        }
        if (sim.contains("record_stride")) {
            const json& stride = sim.at("record_stride");
            if (!stride.is_number_unsigned() || stride.get<std::uint64_t>() == 0) {
                fail("sim.record_stride: must be a positive integer");
            }
            cfg.sim.record_stride = stride.get<std::size_t>();
        }
        cfg.sim.v_threshold = cfg.v_threshold;
        cfg.sim.retry_period = cfg.retry_period;
    }

    return cfg;
}

ScenarioConfig parse_scenario_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& err) {
        fail(std::string("invalid document: ") + err.what());
    }
    if (!doc.is_object()) fail("top level must be an object");
    return parse_scenario_config_impl(doc);
}

GainSet resolve_gains(const ScenarioConfig& config, const PlantModel& plant,
                      SynthesisResult* synthesis_out) {
    if (!config.has_gains) fail("gains section required for this command");
    if (!config.synthesize) {
        config.gains.validate(plant);
        return config.gains;
    }
    const SynthesisResult result =
        synthesize_candidate_gains(plant, config.gains.k, SynthesisOptions{});
    if (synthesis_out != nullptr) *synthesis_out = result;
    if (!result.feasible) {
        throw no_solution_error("synthesis infeasible; best margin " +
                                std::to_string(result.best_margin));
    }
    return result.gains;
}

TriggerParams resolve_trigger(const ScenarioConfig& config, const PlantModel& plant,
                              const GainSet& gains) {
    TriggerParams trigger;
    trigger.psi1 = gains.psi1;
    trigger.psi2 = gains.psi2;
    trigger.retry_period = config.retry_period;
    if (config.underline_delta_override.has_value()) {
        trigger.underline_delta = *config.underline_delta_override;
    } else {
        TriggerParams probe = trigger;
        probe.underline_delta = 1.0;  // placeholder; only psi enters the integral
        trigger.underline_delta =
            min_inter_execution(plant, gains.k, gains.l, probe).global;
    }
    trigger.validate();
    return trigger;
}

std::string serialize_attack_scenario(const AttackScenario& scenario) {
    json doc;
    json sensors = json::array();
    for (const IntervalSet& set : scenario.sensor_dos) sensors.push_back(intervals_to_json(set));
    doc["attack"]["sensor_dos"] = std::move(sensors);
    doc["attack"]["actuator_dos"] = intervals_to_json(scenario.actuator_dos);
    doc["attack"]["fsdos_includes_actuator"] = scenario.fsdos_includes_actuator;
    return doc.dump(2) + "\n";
}

std::string serialize_certification_report(const CertificationReport& report,
                                           const SynthesisResult* synthesis) {
    json doc;
    doc["lmi_pass"] = report.lmi_pass;
    doc["gamma1_lambda_min"] = report.gamma1_lambda_min;
    doc["gamma2_lambda_min"] = report.gamma2_lambda_min;
    doc["omega1"] = report.omega1;
    doc["omega2"] = report.omega2;
    doc["nu1"] = report.nu1;
    doc["nu2"] = report.nu2;
    doc["nu3"] = report.nu3;
    doc["alpha_lower"] = report.alpha_lower;
    doc["alpha_upper"] = report.alpha_upper;
    doc["delta_min_per_mode"] = report.delta_min_per_mode;
    doc["delta_min"] = report.delta_min;
    doc["tau_D_lower_bound"] = report.tau_d_bound;
    doc["kappa_upper_bound"] = report.kappa_bound;
    doc["rates_available"] = report.rates_available;
    if (report.fsdos_checked) {
        json f;
        f["lhs"] = report.fsdos.lhs;
        f["rhs"] = report.fsdos.rhs;
        f["primary_pass"] = report.fsdos.primary_pass;
        f["zeta_star"] = report.fsdos.zeta_star;
        f["T_star"] = report.fsdos.t_star;
        f["beta"] = report.fsdos.beta;
        f["beta_pass"] = report.fsdos.beta_pass;
        doc["fsdos_condition"] = std::move(f);
        doc["assumptions_consistent"] = report.assumptions_consistent;
    }
    if (synthesis != nullptr) {
        json s;
        s["feasible"] = synthesis->feasible;
        s["best_margin"] = synthesis->best_margin;
        s["psi"] = synthesis->psi_used;
        s["eps1"] = synthesis->eps1_used;
        s["eps2"] = synthesis->eps2_used;
        s["p_scale"] = synthesis->p_scale_used;
        s["pe_ratio"] = synthesis->pe_ratio_used;
        s["K"] = matrix_to_json(synthesis->gains.k);
        if (synthesis->feasible) {
            json l = json::array();
            for (const Matrix& m : synthesis->gains.l) l.push_back(matrix_to_json(m));
            s["L"] = std::move(l);
        }
        doc["synthesis"] = std::move(s);
    }
    doc["pass"] = report.pass;
    return doc.dump(2) + "\n";
}

std::string serialize_run_summary(const RunSummary& summary) {
    json doc;
    doc["verdict"] = summary.verdict;
    doc["max_norm"] = summary.max_norm;
    doc["final_norm"] = summary.final_norm;
    doc["event_count"] = summary.event_count;
    doc["blocked_count"] = summary.blocked_count;
    doc["min_event_gap"] = summary.min_event_gap;
    doc["fsdos_duration"] = summary.fsdos_duration;
    doc["w_sup_seen"] = summary.w_sup_seen;
    doc["runtime_delta"] = summary.runtime_delta;
    return doc.dump(2) + "\n";
}

}  // namespace dosetc
