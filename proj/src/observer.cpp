#include "dosetc/observer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dosetc {

namespace {

double adaptive_simpson(const auto& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double split = left + right;
    if (depth <= 0 || std::fabs(split - whole) < 15.0 * tol) {
        return split + (split - whole) / 15.0;
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate_01(const auto& f, double tol) {
    const double fa = f(0.0);
    const double fm = f(0.5);
    const double fb = f(1.0);
    const double whole = (fa + 4.0 * fm + fb) / 6.0;
    return adaptive_simpson(f, 0.0, 1.0, fa, fm, fb, whole, tol, 40);
}

std::vector<double> sub(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

}  // namespace

void TriggerParams::validate() const {
    if (!(psi1 > 0.0) || !(psi2 > 0.0)) {
        throw config_error("TriggerParams: psi1 and psi2 must be positive");
    }
    if (!(underline_delta > 0.0)) {
        throw config_error("TriggerParams: underline_Delta must be positive");
    }
    if (retry_period < 0.0) {
        throw config_error("TriggerParams: retry_period must be nonnegative");
    }
}

ObserverState ObserverState::initial(const PlantModel& plant, std::vector<double> x_e0,
                                     double v_threshold) {
    if (x_e0.size() != plant.state_dim()) {
        throw dimension_error("ObserverState: x_e0 dimension mismatch");
    }
    ObserverState state;
    state.x_e = std::move(x_e0);
    state.held_y.resize(plant.channel_count());
    for (std::size_t i = 0; i < plant.channel_count(); ++i) {
        state.held_y[i].assign(plant.output_dim(i), 0.0);
    }
    state.held_xe.assign(plant.state_dim(), 0.0);
    state.v_threshold = v_threshold;
    return state;
}

void EventLog::record(AttemptRecord rec) {
    if (!rec.success) {
        blocked_attempt_indices.push_back(attempts.size());
    }
    attempts.push_back(std::move(rec));
}

std::vector<double> EventLog::success_times() const {
    std::vector<double> out;
    for (const AttemptRecord& rec : attempts) {
        if (rec.success) out.push_back(rec.time);
    }
    return out;
}

std::size_t select_sigma(std::size_t sigma_prev, const std::vector<std::vector<double>>& held_y,
                         double v_threshold, bool in_fsdos) {
    if (held_y.empty()) {
        throw dimension_error("select_sigma: no channels");
    }
    const double active_norm =
        sigma_prev == 0 ? 0.0 : vector_norm(held_y.at(sigma_prev - 1));
    if (active_norm > v_threshold || in_fsdos) {
        return sigma_prev;
    }
    for (std::size_t i = 0; i < held_y.size(); ++i) {
        if (vector_norm(held_y[i]) > v_threshold) return i + 1;
    }
    return sigma_prev;
}

std::vector<double> observer_derivative(const PlantModel& plant, const ObserverState& state,
                                        const std::vector<double>& u,
                                        const std::vector<Matrix>& gains_l) {
    if (state.x_e.size() != plant.state_dim() || u.size() != plant.input_dim()) {
        throw dimension_error("observer_derivative: dimension mismatch");
    }
    std::vector<double> dx = plant.a().apply(state.x_e);
    const std::vector<double> bu = plant.b().apply(u);
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += bu[i];
    if (state.sigma == 0) {
        return dx;  // open-loop model copy before the first successful update
    }
    if (state.sigma > gains_l.size()) {
        throw config_error("observer_derivative: missing gain for mode " +
                           std::to_string(state.sigma));
    }
    const Matrix& c = plant.channel(state.sigma - 1);
    const Matrix& l = gains_l[state.sigma - 1];
    const std::vector<double> innovation =
        sub(state.held_y.at(state.sigma - 1), c.apply(state.x_e));
    const std::vector<double> correction = l.apply(innovation);
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += correction[i];
    return dx;
}

std::vector<double> control_input(const ObserverState& state, const Matrix& k) {
    if (!state.actuator_success) {
        return std::vector<double>(k.rows(), 0.0);
    }
    std::vector<double> u = k.apply(state.held_xe);
    for (double& x : u) x = -x;
    return u;
}

TriggerErrors trigger_errors(const ObserverState& state, const std::vector<double>& y_sigma_now,
                             const std::vector<double>& x_e_now) {
    TriggerErrors errors;
    if (state.sigma == 0) {
        errors.xi_sigma.assign(y_sigma_now.size(), 0.0);
    } else {
        errors.xi_sigma = sub(state.held_y.at(state.sigma - 1), y_sigma_now);
    }
    errors.xi_e = sub(state.held_xe, x_e_now);
    return errors;
}

bool trigger_violated(const TriggerErrors& errors, const std::vector<double>& y_sigma_now,
                      const std::vector<double>& x_e_now, const TriggerParams& params) {
    const double lhs = vector_norm(errors.xi_sigma) * vector_norm(errors.xi_sigma) +
                       vector_norm(errors.xi_e) * vector_norm(errors.xi_e);
    const double y2 = vector_norm(y_sigma_now) * vector_norm(y_sigma_now);
    const double x2 = vector_norm(x_e_now) * vector_norm(x_e_now);
    return lhs >= params.psi1 * y2 + params.psi2 * x2;
}

double next_event_time(double t_k, std::optional<double> first_violation,
                       const TriggerParams& params) {
    if (!first_violation.has_value()) {
        return std::numeric_limits<double>::infinity();
    }
    if (*first_violation < t_k) {
        throw ordering_error("next_event_time: violation before last event");
    }
    const double floor = t_k + params.underline_delta;
    return *first_violation <= floor ? floor : *first_violation;
}

AttemptRecord attempt_update(ObserverState& state, double t, const AttackScenario& scenario,
                             const PlantModel& plant, const std::vector<double>& x_p) {
    if (scenario.sensor_dos.size() != plant.channel_count()) {
        throw dimension_error("attempt_update: scenario channel count mismatch");
    }
    AttemptRecord rec;
    rec.time = t;

    bool all_sensors_blocked = true;
    for (std::size_t i = 0; i < plant.channel_count(); ++i) {
        if (channel_blocked(scenario, i, t)) {
            all_sensors_blocked = all_sensors_blocked && true;
            continue;
        }
        all_sensors_blocked = false;
        state.held_y[i] = plant.channel(i).apply(x_p);
        state.sensor_success = true;
        rec.refreshed_channels.push_back(i + 1);
    }
    const bool actuator_blocked = channel_blocked(scenario, kActuatorChannel, t);
    const bool in_fsdos =
        all_sensors_blocked || (scenario.fsdos_includes_actuator && actuator_blocked);

    state.sigma = select_sigma(state.sigma, state.held_y, state.v_threshold, in_fsdos);

    if (!actuator_blocked) {
        state.held_xe = state.x_e;
        state.actuator_success = true;
        rec.actuator_refreshed = true;
    }

    const bool active_refreshed =
        state.sigma >= 1 &&
        std::find(rec.refreshed_channels.begin(), rec.refreshed_channels.end(), state.sigma) !=
            rec.refreshed_channels.end();
    rec.success = active_refreshed || rec.actuator_refreshed;
    if (rec.success) {
        state.last_event_time = t;
        ++state.success_count;
    }
    return rec;
}

double inter_execution_time(double g_norm, double h_norm, double c_norm, double psi) {
    if (!(psi > 0.0)) {
        throw config_error("inter_execution_time: psi must be positive");
    }
    const double a0 = (g_norm + c_norm) / std::sqrt(psi);
    const double a1 = g_norm + h_norm + c_norm;
    const double a2 = std::sqrt(psi) * h_norm;
    if (a0 <= 0.0) {
        throw numeric_error("inter_execution_time: degenerate integrand (|G|+|C| = 0)");
    }
    const auto integrand = [a0, a1, a2](double s) { return 1.0 / (a0 + a1 * s + a2 * s * s); };
    return integrate_01(integrand, 1e-10);
}

MinInterExecution min_inter_execution(const PlantModel& plant, const Matrix& k,
                                      const std::vector<Matrix>& gains_l,
                                      const TriggerParams& params) {
    params.validate();
    if (gains_l.size() != plant.channel_count()) {
        throw config_error("min_inter_execution: one observer gain per channel required");
    }
    const double psi = std::min(params.psi1, params.psi2);
    const std::size_t n_p = plant.state_dim();
    const Matrix bk = plant.b() * k;
    const Matrix a_bk = plant.a() - bk;

    MinInterExecution result;
    result.global = std::numeric_limits<double>::infinity();
    for (std::size_t mode = 0; mode < plant.channel_count(); ++mode) {
        const Matrix& c = plant.channel(mode);
        const Matrix& l = gains_l[mode];
        const Matrix c_pinv = right_pseudo_inverse(c);
        const std::size_t n_y = c.rows();

        Matrix g = Matrix::zeros(n_y + n_p, n_y + n_p);
        g.set_block(0, 0, c * plant.a() * c_pinv);
        g.set_block(0, n_y, -1.0 * (c * bk));
        g.set_block(n_y, 0, l);
        g.set_block(n_y, n_y, a_bk - l * c);

        Matrix h = Matrix::zeros(n_y + n_p, n_y + n_p);
        h.set_block(0, n_y, -1.0 * (c * bk));
        h.set_block(n_y, 0, l);
        h.set_block(n_y, n_y, -1.0 * bk);

        const double delta =
            inter_execution_time(spectral_norm(g), spectral_norm(h), spectral_norm(c), psi);
        result.per_mode.push_back(delta);
        result.global = std::min(result.global, delta);
    }
    return result;
}

}  // namespace dosetc
