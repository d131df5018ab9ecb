#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dosetc/interval_set.hpp"
#include "dosetc/plant.hpp"

namespace dosetc {

/// Per-channel DoS schedules: one interval set per sensor channel plus one
/// for the controller-to-actuator link.
struct AttackScenario {
    std::vector<IntervalSet> sensor_dos;
    IntervalSet actuator_dos;
    /// When false, the full-scale set is the sensor intersection only and
    /// the actuator schedule is ignored in fsdos_set (comparison mode).
    bool fsdos_includes_actuator = true;
};

struct AssumptionParams {
    double varkappa = 0.0;  // MCDoS change-count offset, >= 0
    double tau_d = 1.0;     // MCDoS average dwell time, > underline_Delta
    double eta = 0.0;       // FSDoS transition-count offset, >= 0
    double tau_f = 1.0;     // FSDoS average dwell time, > underline_Delta
    double zeta = 0.0;      // FSDoS duration offset, >= 0
    double t_ratio = 2.0;   // FSDoS duty-cycle denominator, > 1

    void validate(double underline_delta) const;
};

constexpr std::size_t kActuatorChannel = static_cast<std::size_t>(-1);

bool channel_blocked(const AttackScenario& scenario, std::size_t channel, double t);

/// Full-scale DoS set ((intersection of all sensor sets) union actuator set)
/// clipped to the closed window [tau, t].
IntervalSet fsdos_set(const AttackScenario& scenario, double tau, double t);

/// Complement of the full-scale set within [tau, t].
IntervalSet upsilon_set(const AttackScenario& scenario, double tau, double t);

std::size_t count_fsdos_transitions(const AttackScenario& scenario, double tau, double t);

double fsdos_duration(const AttackScenario& scenario, double tau, double t);

/// Per-channel DoS boundary instants in [tau, t), counted with multiplicity
/// across channels, excluding instants strictly inside the full-scale set.
std::size_t count_mcdos_changes(const AttackScenario& scenario, double tau, double t);

struct AssumptionCheck {
    bool ok = true;
    double worst_margin = 0.0;  // min over windows of rhs - lhs
    double window_tau = 0.0;
    double window_t = 0.0;
    std::string detail;
};

struct AssumptionReport {
    AssumptionCheck mcdos_frequency;   // l <= varkappa + (t-tau)/tau_D
    AssumptionCheck fsdos_frequency;   // n <= eta + (t-tau)/tau_F
    AssumptionCheck fsdos_duration;    // |Omega| <= zeta + (t-tau)/T
    bool varkappa_consistent = true;   // varkappa <= 1 - underline_Delta/tau_D
    bool all_pass() const {
        return mcdos_frequency.ok && fsdos_frequency.ok && fsdos_duration.ok &&
               varkappa_consistent;
    }
};

AssumptionReport validate_assumptions(const AttackScenario& scenario,
                                      const AssumptionParams& params, double horizon,
                                      double underline_delta);

struct generation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Seeded synthesis of a scenario satisfying the assumption bounds; same
/// seed gives an identical scenario. Throws generation_error when the
/// budgets cannot be met after bounded retries.
AttackScenario generate_admissible_attack(const PlantModel& plant,
                                          const AssumptionParams& params, double horizon,
                                          double underline_delta, std::uint64_t seed);

/// Extends each full-scale DoS interval to the first event time at or after
/// its end that is not itself blocked; overlapping extensions are merged.
IntervalSet effective_fsdos_intervals(const IntervalSet& fsdos,
                                      const std::vector<double>& event_times);

}  // namespace dosetc
