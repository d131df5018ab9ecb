#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "dosetc/sim.hpp"

namespace dosetc {

/// Parsed scenario document: plant matrices plus the optional gains,
/// trigger, attack, assumptions and simulation sections.
struct ScenarioConfig {
    Matrix a;
    Matrix b;
    std::vector<Matrix> channels;

    bool has_gains = false;
    bool synthesize = false;  // gains.K given, the rest searched for
    GainSet gains;            // fully populated only when !synthesize

    double v_threshold = 1e-3;
    double retry_period = 0.0;
    std::optional<double> underline_delta_override;

    std::optional<AttackScenario> attack;  // explicit interval lists
    bool generate_attack = false;
    std::uint64_t attack_seed = 0;

    std::optional<AssumptionParams> assumptions;

    bool has_sim = false;
    SimConfig sim;

    PlantModel make_plant() const { return PlantModel(a, b, channels); }
};

/// Parses and schema-validates a scenario document (JSON object tree).
/// Malformed structure, wrong shapes or out-of-range values throw
/// config_error with a diagnostic.
ScenarioConfig parse_scenario_config(const std::string& text);

/// Gains from the config: either the explicit set or the deterministic
/// synthesis result. Throws no_solution_error when synthesis is infeasible
/// (message carries the best margin).
GainSet resolve_gains(const ScenarioConfig& config, const PlantModel& plant,
                      SynthesisResult* synthesis_out = nullptr);

/// Trigger parameters from the config; the minimum inter-event interval is
/// the certified value unless overridden.
TriggerParams resolve_trigger(const ScenarioConfig& config, const PlantModel& plant,
                              const GainSet& gains);

std::string serialize_attack_scenario(const AttackScenario& scenario);

std::string serialize_certification_report(const CertificationReport& report,
                                           const SynthesisResult* synthesis);

std::string serialize_run_summary(const RunSummary& summary);

}  // namespace dosetc
