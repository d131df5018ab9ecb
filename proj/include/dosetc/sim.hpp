#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dosetc/certification.hpp"
#include "dosetc/dos_schedule.hpp"
#include "dosetc/observer.hpp"
#include "dosetc/plant.hpp"

namespace dosetc {

struct DisturbanceSpec {
    enum class Kind { zero, constant, sinusoid, seeded_bounded_noise };
    Kind kind = Kind::zero;
    double amplitude = 0.0;  // bound on the disturbance norm
    double frequency = 1.0;  // Hz, sinusoid only
    std::uint64_t seed = 0;  // noise only
};

/// Disturbance sample at time t; piecewise constant over step step_index for
/// the seeded noise kind. Norm never exceeds the amplitude.
std::vector<double> disturbance_value(const DisturbanceSpec& spec, std::size_t dim, double t,
                                      std::size_t step_index);

struct SimConfig {
    double dt = 1e-3;
    double horizon = 10.0;
    std::vector<double> x_p0;
    std::vector<double> x_e0;
    DisturbanceSpec disturbance;
    double v_threshold = 1e-3;
    double retry_period = 0.0;  // 0 means "one minimum inter-event interval"
    std::size_t record_stride = 10;

    /// dt must resolve the minimum inter-event interval with at least four
    /// steps; horizon must cover at least one step.
    void validate(const PlantModel& plant, double underline_delta) const;
};

struct ClosedLoopState {
    std::vector<double> x_p;
    ObserverState observer;
};

/// One classical 4-stage explicit step of the coupled plant/observer field;
/// u, the held outputs and the held observer state stay constant (zero-order
/// hold), as does the disturbance sample.
ClosedLoopState step(const PlantModel& plant, const GainSet& gains, const ClosedLoopState& state,
                     double t, double dt, const std::vector<double>& w_value);

struct TraceRow {
    double t = 0.0;
    std::vector<double> x_p;
    std::vector<double> x_e;
    std::vector<double> u;
    std::size_t sigma = 0;
    double xi_sigma_norm = 0.0;
    double xi_e_norm = 0.0;
    double v = 0.0;
    bool event = false;    // a successful update happened at this instant
    bool blocked = false;  // an attempt happened and was denied
    double w_norm = 0.0;   // not serialized; used by the empirical checks
};

struct Trace {
    std::vector<TraceRow> rows;
    SwitchingRecord switching;
    EventLog log;
};

struct RunSummary {
    std::string verdict;  // "stable" or "diverged"
    double max_norm = 0.0;
    double final_norm = 0.0;
    std::size_t event_count = 0;
    std::size_t blocked_count = 0;
    double min_event_gap = 0.0;  // between successful updates
    double fsdos_duration = 0.0;
    double w_sup_seen = 0.0;
    double runtime_delta = 0.0;  // the grid-aligned inter-event floor
};

struct RunResult {
    Trace trace;
    RunSummary summary;
};

constexpr double kDivergenceThreshold = 1e12;

RunResult run(const PlantModel& plant, const GainSet& gains, const TriggerParams& trigger,
              const AttackScenario& scenario, const SimConfig& config);

struct DissipationReport {
    std::size_t checked = 0;
    std::size_t violations = 0;
    double worst_excess = 0.0;  // most positive lhs - rhs over checked pairs
};

/// Finite-difference witness of the decay inequality on recorded steps lying
/// inside the effective non-denial set; denial intervals and mode-transition
/// steps are excluded.
DissipationReport check_dissipation(const Trace& trace, const GainSet& gains,
                                    const PlantModel& plant);

struct IssReport {
    bool applicable = true;
    double max_ratio = 0.0;  // recorded norm over analytic bound
    double w_sup = 0.0;
};

/// Recorded state norm against the analytic trajectory bound along the
/// realized switching record. `admissible` gates applicability: when the
/// attack violated the standing assumptions the ratio carries no verdict.
IssReport check_empirical_iss(const Trace& trace, const GainSet& gains, const PlantModel& plant,
                              double w_sup, bool admissible = true);

/// Delimited text, header row, one line per recorded sample.
std::string serialize_trace(const Trace& trace, const PlantModel& plant);

}  // namespace dosetc
