#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "dosetc/config.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitAnalyticFail = 1;
constexpr int kExitInputError = 2;
constexpr int kExitDiverged = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw dosetc::config_error("cannot read config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw dosetc::config_error("cannot write output file: " + path);
    out << content;
}

/// Fixed-width significant-digit formatting (12 digits, keeping trailing
/// zeros, plain decimal notation for the magnitudes this tool prints).
std::string format_12_digits(double value) {
    if (value == 0.0) return "0.00000000000";
    const int magnitude = static_cast<int>(std::floor(std::log10(std::fabs(value))));
    const int precision = std::max(0, 11 - magnitude);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, value);
    return buf;
}

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::optional<double> dt;
    std::optional<double> horizon;
    std::optional<std::size_t> stride;
    bool full_trace = false;
};

dosetc::AttackScenario resolve_attack(const dosetc::ScenarioConfig& cfg,
                                      const dosetc::PlantModel& plant,
                                      const dosetc::TriggerParams& trigger, double horizon,
                                      std::uint64_t seed) {
    if (cfg.attack.has_value()) {
        if (cfg.attack->sensor_dos.size() != plant.channel_count()) {
            throw dosetc::config_error("attack: one sensor schedule per channel required");
        }
        return *cfg.attack;
    }
    if (cfg.generate_attack) {
        if (!cfg.assumptions.has_value()) {
            throw dosetc::config_error(
                "attack.generate requires the assumptions section");
        }
        return dosetc::generate_admissible_attack(plant, *cfg.assumptions, horizon,
                                                  trigger.underline_delta, seed);
    }
    dosetc::AttackScenario none;
    none.sensor_dos.resize(plant.channel_count());
    return none;
}

int cmd_certify(const CommonArgs& args) {
    const dosetc::ScenarioConfig cfg = dosetc::parse_scenario_config(read_file(args.config_path));
    const dosetc::PlantModel plant = cfg.make_plant();

    dosetc::SynthesisResult synthesis;
    dosetc::GainSet gains;
    try {
        gains = dosetc::resolve_gains(cfg, plant, &synthesis);
    } catch (const dosetc::no_solution_error& err) {
        // Infeasible synthesis: report the best margin found, exit 1.
        if (cfg.synthesize) {
            dosetc::CertificationReport empty;
            const std::string doc =
                dosetc::serialize_certification_report(empty, &synthesis);
            if (!args.out_path.empty()) write_file(args.out_path, doc);
            std::cout << doc;
            std::cerr << err.what() << "\n";
            return kExitAnalyticFail;
        }
        throw;
    }
    const dosetc::TriggerParams trigger = dosetc::resolve_trigger(cfg, plant, gains);
    const dosetc::CertificationReport report =
        dosetc::certify(plant, gains, trigger, cfg.assumptions);
    const std::string doc = dosetc::serialize_certification_report(
        report, cfg.synthesize ? &synthesis : nullptr);
    if (!args.out_path.empty()) write_file(args.out_path, doc);
    std::cout << doc;
    return report.pass ? kExitPass : kExitAnalyticFail;
}

int cmd_simulate(const CommonArgs& args) {
    dosetc::ScenarioConfig cfg = dosetc::parse_scenario_config(read_file(args.config_path));
    if (!cfg.has_sim) throw dosetc::config_error("sim section required for simulate");
    const dosetc::PlantModel plant = cfg.make_plant();
    const dosetc::GainSet gains = dosetc::resolve_gains(cfg, plant);
    const dosetc::TriggerParams trigger = dosetc::resolve_trigger(cfg, plant, gains);

    if (args.dt.has_value()) cfg.sim.dt = *args.dt;
    if (args.horizon.has_value()) cfg.sim.horizon = *args.horizon;
    if (args.stride.has_value()) cfg.sim.record_stride = *args.stride;
    if (args.full_trace) cfg.sim.record_stride = 1;
    if (args.seed.has_value()) {
        cfg.sim.disturbance.seed = *args.seed;
        cfg.attack_seed = *args.seed;
    }

    const dosetc::AttackScenario scenario =
        resolve_attack(cfg, plant, trigger, cfg.sim.horizon, cfg.attack_seed);
    const dosetc::RunResult result = dosetc::run(plant, gains, trigger, scenario, cfg.sim);

    const std::string trace = dosetc::serialize_trace(result.trace, plant);
    const std::string summary = dosetc::serialize_run_summary(result.summary);
    if (!args.out_path.empty()) {
        std::filesystem::create_directories(args.out_path);
        write_file(args.out_path + "/trace.csv", trace);
        write_file(args.out_path + "/summary.json", summary);
    }
    std::cout << summary;
    return result.summary.verdict == "stable" ? kExitPass : kExitDiverged;
}

int cmd_generate_attack(const CommonArgs& args) {
    const dosetc::ScenarioConfig cfg = dosetc::parse_scenario_config(read_file(args.config_path));
    if (!cfg.assumptions.has_value()) {
        throw dosetc::config_error("assumptions section required for generate-attack");
    }
    const dosetc::PlantModel plant = cfg.make_plant();

    double underline_delta;
    if (cfg.underline_delta_override.has_value()) {
        underline_delta = *cfg.underline_delta_override;
    } else {
        const dosetc::GainSet gains = dosetc::resolve_gains(cfg, plant);
        underline_delta = dosetc::resolve_trigger(cfg, plant, gains).underline_delta;
    }
    const double horizon =
        args.horizon.value_or(cfg.has_sim ? cfg.sim.horizon : 50.0);
    const std::uint64_t seed = args.seed.value_or(cfg.attack_seed);

    const dosetc::AttackScenario scenario = dosetc::generate_admissible_attack(
        plant, *cfg.assumptions, horizon, underline_delta, seed);
    const std::string doc = dosetc::serialize_attack_scenario(scenario);
    if (!args.out_path.empty()) write_file(args.out_path, doc);
    std::cout << doc;
    return kExitPass;
}

int cmd_delta_min(const CommonArgs& args) {
    const dosetc::ScenarioConfig cfg = dosetc::parse_scenario_config(read_file(args.config_path));
    const dosetc::PlantModel plant = cfg.make_plant();
    const dosetc::GainSet gains = dosetc::resolve_gains(cfg, plant);
    dosetc::TriggerParams probe;
    probe.psi1 = gains.psi1;
    probe.psi2 = gains.psi2;
    probe.underline_delta = 1.0;  // placeholder; only psi enters the integral
    const dosetc::MinInterExecution mie =
        dosetc::min_inter_execution(plant, gains.k, gains.l, probe);
    std::string out;
    for (std::size_t m = 0; m < mie.per_mode.size(); ++m) {
        out += "mode " + std::to_string(m + 1) + ": " + format_12_digits(mie.per_mode[m]) + "\n";
    }
    out += "global: " + format_12_digits(mie.global) + "\n";
    if (!args.out_path.empty()) write_file(args.out_path, out);
    std::cout << out;
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Event-triggered control toolkit: certification, attack "
                 "generation and closed-loop simulation"};
    app.require_subcommand(1);

    CommonArgs args;
    const auto add_common = [&](CLI::App* cmd, bool needs_out_flag = true) {
        cmd->add_option("--config", args.config_path, "Scenario config file")->required();
        if (needs_out_flag) cmd->add_option("--out", args.out_path, "Output path");
        cmd->add_option("--seed", args.seed, "64-bit seed override");
        cmd->add_option("--dt", args.dt, "Integration step override");
        cmd->add_option("--horizon", args.horizon, "Horizon override");
        cmd->add_option("--stride", args.stride, "Trace decimation stride");
        cmd->add_flag("--full-trace", args.full_trace, "Record every step");
    };

    CLI::App* certify = app.add_subcommand("certify", "Verify or synthesize gains");
    add_common(certify);
    CLI::App* simulate = app.add_subcommand("simulate", "Run the closed loop");
    add_common(simulate);
    CLI::App* generate = app.add_subcommand("generate-attack", "Emit an admissible attack");
    add_common(generate);
    CLI::App* delta_min = app.add_subcommand("delta-min", "Print minimum inter-event times");
    add_common(delta_min);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        return app.exit(err) == 0 ? 0 : kExitInputError;
    }

    try {
        if (app.got_subcommand(certify)) return cmd_certify(args);
        if (app.got_subcommand(simulate)) return cmd_simulate(args);
        if (app.got_subcommand(generate)) return cmd_generate_attack(args);
        if (app.got_subcommand(delta_min)) return cmd_delta_min(args);
    } catch (const dosetc::config_error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitInputError;
    } catch (const dosetc::dimension_error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitInputError;
    } catch (const dosetc::ordering_error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitInputError;
    } catch (const dosetc::symmetry_error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& err) {
        // Analytic failures: infeasible synthesis, rank-deficient channels,
        // non-Hurwitz loops, impossible attack budgets.
        std::cerr << "error: " << err.what() << "\n";
        return kExitAnalyticFail;
    }
    return kExitInputError;
}
