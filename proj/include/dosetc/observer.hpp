#pragma once

#include <optional>
#include <vector>

#include "dosetc/dos_schedule.hpp"
#include "dosetc/plant.hpp"

namespace dosetc {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Static event-trigger weights and timing floors.
struct TriggerParams {
    double psi1 = 0.0;            // output-error weight
    double psi2 = 0.0;            // estimate-error weight
    double underline_delta = 0.0; // enforced minimum inter-event time
    double retry_period = 0.0;    // 0 means "use underline_delta"

    double effective_retry_period() const {
        return retry_period > 0.0 ? retry_period : underline_delta;
    }
    void validate() const;
};

/// Runtime state of the switched partial observer. Mode indices are 1-based
/// (sigma = 0 means no successful transmission yet; the observer runs as an
/// open-loop model copy and u stays zero).
struct ObserverState {
    std::vector<double> x_e;                  // observer state
    std::size_t sigma = 0;                    // active channel, 0 = none yet
    std::vector<std::vector<double>> held_y;  // last transmitted y_i per channel
    std::vector<double> held_xe;              // last transmitted observer state
    bool sensor_success = false;              // some y_i ever delivered
    bool actuator_success = false;            // held_xe ever delivered
    double last_event_time = 0.0;             // t_k of the last successful update
    std::size_t success_count = 0;            // k(t)
    double v_threshold = 1e-3;                // switching threshold v

    static ObserverState initial(const PlantModel& plant, std::vector<double> x_e0,
                                 double v_threshold);
};

struct AttemptRecord {
    double time = 0.0;
    bool success = false;                       // t_k advanced
    std::vector<std::size_t> refreshed_channels;  // 1-based sensor channels
    bool actuator_refreshed = false;
};

struct EventLog {
    std::vector<AttemptRecord> attempts;
    std::vector<std::size_t> blocked_attempt_indices;  // the set K

    void record(AttemptRecord rec);
    std::vector<double> success_times() const;
};

/// Switching rule: when the active channel's held output has dropped to or
/// below the threshold and the attempt instant is outside FSDoS, switch to
/// the lowest channel whose held output exceeds the threshold; otherwise
/// keep the previous mode.
std::size_t select_sigma(std::size_t sigma_prev, const std::vector<std::vector<double>>& held_y,
                         double v_threshold, bool in_fsdos);

std::vector<double> observer_derivative(const PlantModel& plant, const ObserverState& state,
                                        const std::vector<double>& u,
                                        const std::vector<Matrix>& gains_l);

std::vector<double> control_input(const ObserverState& state, const Matrix& k);

struct TriggerErrors {
    std::vector<double> xi_sigma;  // held output minus current output
    std::vector<double> xi_e;      // held observer state minus current
};

TriggerErrors trigger_errors(const ObserverState& state, const std::vector<double>& y_sigma_now,
                             const std::vector<double>& x_e_now);

bool trigger_violated(const TriggerErrors& errors, const std::vector<double>& y_sigma_now,
                      const std::vector<double>& x_e_now, const TriggerParams& params);

/// Next update attempt per the resilient trigger: the first violation time,
/// floored at one minimum inter-event interval after the last event.
double next_event_time(double t_k, std::optional<double> first_violation,
                       const TriggerParams& params);

/// One update attempt against the attack scenario at time t. Sensor-side and
/// actuator-side resets are decoupled: each held value refreshes only if its
/// own channel is clear. The event counter advances when the active
/// channel's output or the held observer state was refreshed.
AttemptRecord attempt_update(ObserverState& state, double t, const AttackScenario& scenario,
                             const PlantModel& plant, const std::vector<double>& x_p);

struct MinInterExecution {
    std::vector<double> per_mode;  // one entry per sensor channel
    double global = 0.0;           // minimum over modes
};

/// Integral from 0 to 1 of
/// 1 / [ (g+c)/sqrt(psi) + (g+h+c) s + sqrt(psi) h s^2 ]
/// by adaptive quadrature to 1e-10 absolute accuracy; g, h, c are the norms
/// of the mode's error-dynamics matrices.
double inter_execution_time(double g_norm, double h_norm, double c_norm, double psi);

/// Lower bound on the inter-execution time per mode, with
/// psi = min(psi1, psi2); global entry is the minimum over modes.
MinInterExecution min_inter_execution(const PlantModel& plant, const Matrix& k,
                                      const std::vector<Matrix>& gains_l,
                                      const TriggerParams& params);

}  // namespace dosetc
