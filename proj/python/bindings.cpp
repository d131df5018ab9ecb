// Python bindings: document-level operations (certify, simulate,
// generate-attack, delta-min) plus a few direct numeric entry points.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dosetc/config.hpp"

namespace py = pybind11;

namespace {

using dosetc::GainSet;
using dosetc::Matrix;
using dosetc::PlantModel;
using dosetc::ScenarioConfig;

Matrix matrix_from_rows(const std::vector<std::vector<double>>& rows,
                        const std::string& name) {
    if (rows.empty() || rows.front().empty()) {
        throw dosetc::dimension_error(name + ": expected a non-empty matrix");
    }
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.cols()) {
            throw dosetc::dimension_error(name + ": ragged rows");
        }
        for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
    }
    return m;
}

std::vector<std::vector<double>> matrix_to_rows(const Matrix& m) {
    std::vector<std::vector<double>> rows(m.rows(), std::vector<double>(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) rows[r][c] = m(r, c);
    }
    return rows;
}

std::string certify_document(const std::string& text) {
    const ScenarioConfig cfg = dosetc::parse_scenario_config(text);
    const PlantModel plant = cfg.make_plant();
    dosetc::SynthesisResult synthesis;
    const GainSet gains = dosetc::resolve_gains(cfg, plant, &synthesis);
    const dosetc::TriggerParams trigger = dosetc::resolve_trigger(cfg, plant, gains);
    const dosetc::CertificationReport report =
        dosetc::certify(plant, gains, trigger, cfg.assumptions);
    return dosetc::serialize_certification_report(report,
                                                  cfg.synthesize ? &synthesis : nullptr);
}

py::tuple simulate_document(const std::string& text,
                            std::optional<std::uint64_t> seed,
                            std::optional<double> dt, std::optional<double> horizon) {
    ScenarioConfig cfg = dosetc::parse_scenario_config(text);
    if (!cfg.has_sim) throw dosetc::config_error("sim section required for simulate");
    const PlantModel plant = cfg.make_plant();
    const GainSet gains = dosetc::resolve_gains(cfg, plant);
    const dosetc::TriggerParams trigger = dosetc::resolve_trigger(cfg, plant, gains);
    if (dt.has_value()) cfg.sim.dt = *dt;
    if (horizon.has_value()) cfg.sim.horizon = *horizon;
    if (seed.has_value()) {
        cfg.sim.disturbance.seed = *seed;
        cfg.attack_seed = *seed;
    }
    dosetc::AttackScenario scenario;
    if (cfg.attack.has_value()) {
        scenario = *cfg.attack;
    } else if (cfg.generate_attack) {
        if (!cfg.assumptions.has_value()) {
            throw dosetc::config_error("attack.generate requires the assumptions section");
        }
        scenario = dosetc::generate_admissible_attack(
            plant, *cfg.assumptions, cfg.sim.horizon, trigger.underline_delta,
            cfg.attack_seed);
    } else {
        scenario.sensor_dos.resize(plant.channel_count());
    }
    const dosetc::RunResult result = dosetc::run(plant, gains, trigger, scenario, cfg.sim);
    return py::make_tuple(dosetc::serialize_run_summary(result.summary),
                          dosetc::serialize_trace(result.trace, plant));
}

std::string generate_attack_document(const std::string& text, double horizon,
                                     std::uint64_t seed) {
    const ScenarioConfig cfg = dosetc::parse_scenario_config(text);
    if (!cfg.assumptions.has_value()) {
        throw dosetc::config_error("assumptions section required for attack generation");
    }
    const PlantModel plant = cfg.make_plant();
    double underline_delta;
    if (cfg.underline_delta_override.has_value()) {
        underline_delta = *cfg.underline_delta_override;
    } else {
        const GainSet gains = dosetc::resolve_gains(cfg, plant);
        underline_delta = dosetc::resolve_trigger(cfg, plant, gains).underline_delta;
    }
    return dosetc::serialize_attack_scenario(dosetc::generate_admissible_attack(
        plant, *cfg.assumptions, horizon, underline_delta, seed));
}

py::dict delta_min_document(const std::string& text) {
    const ScenarioConfig cfg = dosetc::parse_scenario_config(text);
    const PlantModel plant = cfg.make_plant();
    const GainSet gains = dosetc::resolve_gains(cfg, plant);
    dosetc::TriggerParams probe;
    probe.psi1 = gains.psi1;
    probe.psi2 = gains.psi2;
    probe.underline_delta = 1.0;  // placeholder; only psi enters the integral
    const dosetc::MinInterExecution mie =
        dosetc::min_inter_execution(plant, gains.k, gains.l, probe);
    py::dict out;
    out["per_mode"] = mie.per_mode;
    out["global"] = mie.global;
    return out;
}

py::dict synthesize_gains(const std::vector<std::vector<double>>& a,
                          const std::vector<std::vector<double>>& b,
                          const std::vector<std::vector<std::vector<double>>>& channels,
                          const std::vector<std::vector<double>>& k) {
    std::vector<Matrix> c;
    for (std::size_t i = 0; i < channels.size(); ++i) {
        c.push_back(matrix_from_rows(channels[i], "C[" + std::to_string(i) + "]"));
    }
    const PlantModel plant(matrix_from_rows(a, "A"), matrix_from_rows(b, "B"), c);
    const dosetc::SynthesisResult result = dosetc::synthesize_candidate_gains(
        plant, matrix_from_rows(k, "K"), dosetc::SynthesisOptions{});
    py::dict out;
    out["feasible"] = result.feasible;
    out["best_margin"] = result.best_margin;
    if (result.feasible) {
        std::vector<std::vector<std::vector<double>>> l;
        for (const Matrix& m : result.gains.l) l.push_back(matrix_to_rows(m));
        out["L"] = l;
        out["psi1"] = result.gains.psi1;
        out["psi2"] = result.gains.psi2;
        out["eps1"] = result.gains.eps1;
        out["eps2"] = result.gains.eps2;
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Event-triggered control under denial-of-service: certification, "
              "attack generation and closed-loop simulation";

    py::register_exception<dosetc::config_error>(m, "ConfigError", PyExc_ValueError);

    m.def("certify", &certify_document, py::arg("config_text"),
          "Run the full certification pipeline on a scenario document; returns "
          "the JSON report.");
    m.def("simulate", &simulate_document, py::arg("config_text"),
          py::arg("seed") = std::nullopt, py::arg("dt") = std::nullopt,
          py::arg("horizon") = std::nullopt,
          "Run the closed loop; returns (summary_json, trace_csv).");
    m.def("generate_attack", &generate_attack_document, py::arg("config_text"),
          py::arg("horizon"), py::arg("seed") = 0,
          "Generate an attack satisfying the document's frequency/duration "
          "budgets; returns JSON.");
    m.def("delta_min", &delta_min_document, py::arg("config_text"),
          "Guaranteed minimum inter-event times, per observer mode and global.");
    m.def("synthesize_gains", &synthesize_gains, py::arg("a"), py::arg("b"),
          py::arg("channels"), py::arg("k"),
          "Deterministic observer/multiplier search for a given state-feedback "
          "gain; returns a dict with feasibility and the found gains.");
}
