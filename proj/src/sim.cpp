#include "dosetc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "dosetc/rng.hpp"

namespace dosetc {

namespace {

const double kInf = std::numeric_limits<double>::infinity();

bool finite_vector(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

double quadratic_form(const Matrix& p, const std::vector<double>& x) {
    const std::vector<double> px = p.apply(x);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * px[i];
    return s;
}

double lyapunov_value(const GainSet& gains, std::size_t sigma, const std::vector<double>& x_p,
                      const std::vector<double>& x_e) {
    const std::size_t mode = sigma >= 1 ? sigma - 1 : 0;
    std::vector<double> tilde(x_p.size());
    for (std::size_t i = 0; i < x_p.size(); ++i) tilde[i] = x_p[i] - x_e[i];
    return quadratic_form(gains.p_p[mode], x_p) + quadratic_form(gains.p_e[mode], tilde);
}

/// Norm of the stacked (plant state, estimation error) vector the trajectory
/// bound speaks about.
double stacked_norm(const std::vector<double>& x_p, const std::vector<double>& x_e) {
    double s = 0.0;
    for (std::size_t i = 0; i < x_p.size(); ++i) {
        s += x_p[i] * x_p[i];
        const double d = x_p[i] - x_e[i];
        s += d * d;
    }
    return std::sqrt(s);
}

void append_number(std::string& out, double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    out += buf;
}

}  // namespace

std::vector<double> disturbance_value(const DisturbanceSpec& spec, std::size_t dim, double t,
                                      std::size_t step_index) {
    std::vector<double> w(dim, 0.0);
    switch (spec.kind) {
        case DisturbanceSpec::Kind::zero:
            break;
        case DisturbanceSpec::Kind::constant: {
            const double component = spec.amplitude / std::sqrt(static_cast<double>(dim));
            for (double& x : w) x = component;
            break;
        }
        case DisturbanceSpec::Kind::sinusoid: {
            const double component = spec.amplitude *
                                     std::sin(2.0 * 3.14159265358979323846 * spec.frequency * t) /
                                     std::sqrt(static_cast<double>(dim));
            for (double& x : w) x = component;
            break;
        }
        case DisturbanceSpec::Kind::seeded_bounded_noise: {
            CounterRng rng(spec.seed, step_index);
            double norm2 = 0.0;
            for (double& x : w) {
                x = rng.uniform(-1.0, 1.0);
                norm2 += x * x;
            }
            const double scale = rng.u01() * spec.amplitude;
            if (norm2 > 0.0) {
                const double factor = scale / std::sqrt(norm2);
                for (double& x : w) x *= factor;
            }
            break;
        }
    }
    return w;
}

void SimConfig::validate(const PlantModel& plant, double underline_delta) const {
    if (!(dt > 0.0)) throw config_error("SimConfig: dt must be positive");
    if (!(dt <= underline_delta / 4.0 + 1e-15)) {
        throw config_error("SimConfig: dt must resolve the minimum inter-event interval "
                           "with at least four steps");
    }
    if (!(horizon >= dt)) throw config_error("SimConfig: horizon must cover at least one step");
    if (x_p0.size() != plant.state_dim() || x_e0.size() != plant.state_dim()) {
        throw dimension_error("SimConfig: initial state dimension mismatch");
    }
    if (record_stride == 0) throw config_error("SimConfig: record_stride must be positive");
    if (disturbance.amplitude < 0.0) {
        throw config_error("SimConfig: disturbance amplitude must be nonnegative");
    }
    if (v_threshold < 0.0) throw config_error("SimConfig: v_threshold must be nonnegative");
    if (retry_period < 0.0) throw config_error("SimConfig: retry_period must be nonnegative");
}

ClosedLoopState step(const PlantModel& plant, const GainSet& gains, const ClosedLoopState& state,
                     double /*t*/, double dt, const std::vector<double>& w_value) {
    const std::size_t n = plant.state_dim();
    const std::vector<double> u = control_input(state.observer, gains.k);
    const std::vector<double> bu = plant.b().apply(u);
    const std::size_t sigma = state.observer.sigma;

    // Derivative of the concatenated (x_p, x_e) vector with all held values
    // and the disturbance sample frozen over the step.
    const auto field = [&](const std::vector<double>& z) {
        std::vector<double> xp(z.begin(), z.begin() + n);
        std::vector<double> xe(z.begin() + n, z.end());
        std::vector<double> dxp = plant.a().apply(xp);
        std::vector<double> dxe = plant.a().apply(xe);
        for (std::size_t i = 0; i < n; ++i) {
            dxp[i] += bu[i] + w_value[i];
            dxe[i] += bu[i];
        }
        if (sigma >= 1) {
            const Matrix& c = plant.channel(sigma - 1);
            const Matrix& l = gains.l[sigma - 1];
            std::vector<double> innovation = state.observer.held_y[sigma - 1];
            const std::vector<double> cx = c.apply(xe);
            for (std::size_t i = 0; i < innovation.size(); ++i) innovation[i] -= cx[i];
            const std::vector<double> corr = l.apply(innovation);
            for (std::size_t i = 0; i < n; ++i) dxe[i] += corr[i];
        }
        std::vector<double> dz(2 * n);
        std::copy(dxp.begin(), dxp.end(), dz.begin());
        std::copy(dxe.begin(), dxe.end(), dz.begin() + n);
        return dz;
    };

    std::vector<double> z(2 * n);
    std::copy(state.x_p.begin(), state.x_p.end(), z.begin());
    std::copy(state.observer.x_e.begin(), state.observer.x_e.end(), z.begin() + n);

    const auto shifted = [&](const std::vector<double>& k, double h) {
        std::vector<double> out = z;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += h * k[i];
        return out;
    };
    const std::vector<double> k1 = field(z);
    const std::vector<double> k2 = field(shifted(k1, 0.5 * dt));
    const std::vector<double> k3 = field(shifted(k2, 0.5 * dt));
    const std::vector<double> k4 = field(shifted(k3, dt));

    ClosedLoopState next = state;
    for (std::size_t i = 0; i < n; ++i) {
        next.x_p[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        next.observer.x_e[i] +=
            dt / 6.0 * (k1[n + i] + 2.0 * k2[n + i] + 2.0 * k3[n + i] + k4[n + i]);
    }
    return next;
}

RunResult run(const PlantModel& plant, const GainSet& gains, const TriggerParams& trigger,
              const AttackScenario& scenario, const SimConfig& config) {
    trigger.validate();
    gains.validate(plant);
    config.validate(plant, trigger.underline_delta);
    if (scenario.sensor_dos.size() != plant.channel_count()) {
        throw dimension_error("run: scenario channel count mismatch");
    }
    const std::size_t n = plant.state_dim();
    const double dt = config.dt;
    const auto steps_for = [dt](double duration) {
        return static_cast<std::size_t>(
            std::max(1.0, std::ceil(duration / dt - 1e-9)));
    };
    const std::size_t delta_steps = steps_for(trigger.underline_delta);
    const double retry =
        config.retry_period > 0.0 ? config.retry_period : trigger.effective_retry_period();
    const std::size_t retry_steps = steps_for(retry);
    const std::size_t n_steps = static_cast<std::size_t>(std::llround(config.horizon / dt));

    RunResult result;
    result.summary.runtime_delta = static_cast<double>(delta_steps) * dt;

    ClosedLoopState state;
    state.x_p = config.x_p0;
    state.observer = ObserverState::initial(plant, config.x_e0, config.v_threshold);

    Trace& trace = result.trace;
    trace.switching.start_time = 0.0;
    trace.switching.initial_mode = 1;
    trace.switching.underline_delta = 0.0;  // dwell not guaranteed at trace level
    bool initial_mode_set = false;

    bool retry_pending = false;
    std::size_t retry_due = 0;
    std::size_t min_next_event = 0;
    bool diverged = false;
    double w_sup = 0.0;

    for (std::size_t i = 0; i <= n_steps; ++i) {
        const double t = static_cast<double>(i) * dt;

        // Current measured quantities for the trigger test.
        const std::size_t sigma_now = state.observer.sigma;
        const std::vector<double> y_now =
            sigma_now >= 1 ? plant.channel(sigma_now - 1).apply(state.x_p)
                           : std::vector<double>();
        const TriggerErrors errors = trigger_errors(state.observer, y_now, state.observer.x_e);

        bool attempted = false;
        bool success = false;
        if (retry_pending) {
            attempted = i >= retry_due;
        } else if (i >= min_next_event) {
            attempted = i == 0 || trigger_violated(errors, y_now, state.observer.x_e, trigger);
        }
        if (attempted) {
            const std::size_t sigma_prev = state.observer.sigma;
            const AttemptRecord rec =
                attempt_update(state.observer, t, scenario, plant, state.x_p);
            trace.log.record(rec);
            success = rec.success;
            if (success) {
                retry_pending = false;
                min_next_event = i + delta_steps;
            } else {
                retry_pending = true;
                retry_due = i + retry_steps;
            }
            const std::size_t sigma_new = state.observer.sigma;
            if (sigma_prev == 0 && sigma_new != 0 && !initial_mode_set) {
                trace.switching.initial_mode = sigma_new;
                initial_mode_set = true;
            } else if (sigma_prev != 0 && sigma_new != sigma_prev) {
                trace.switching.switch_times.push_back(t);
                trace.switching.mode_after.push_back(sigma_new);
            }
        }

        const std::vector<double> w = disturbance_value(config.disturbance, n, t, i);
        const double w_norm = vector_norm(w);
        w_sup = std::max(w_sup, w_norm);

        const double x_norm = stacked_norm(state.x_p, state.observer.x_e);
        result.summary.max_norm = std::max(result.summary.max_norm, x_norm);
        if (!std::isfinite(x_norm) || x_norm > kDivergenceThreshold) {
            diverged = true;
        }

        if (!diverged && i % config.record_stride == 0) {
            TraceRow row;
            row.t = t;
            row.x_p = state.x_p;
            row.x_e = state.observer.x_e;
            row.u = control_input(state.observer, gains.k);
            row.sigma = state.observer.sigma;
            const std::size_t s = state.observer.sigma;
            const std::vector<double> y_row =
                s >= 1 ? plant.channel(s - 1).apply(state.x_p) : std::vector<double>();
            const TriggerErrors row_errors =
                trigger_errors(state.observer, y_row, state.observer.x_e);
            row.xi_sigma_norm = vector_norm(row_errors.xi_sigma);
            row.xi_e_norm = vector_norm(row_errors.xi_e);
            row.v = lyapunov_value(gains, s, state.x_p, state.observer.x_e);
            row.event = attempted && success;
            row.blocked = attempted && !success;
            row.w_norm = w_norm;
            trace.rows.push_back(std::move(row));
        }
        if (diverged) break;

        if (i < n_steps) {
            state = step(plant, gains, state, t, dt, w);
            if (!finite_vector(state.x_p) || !finite_vector(state.observer.x_e)) {
                diverged = true;
                result.summary.max_norm = kInf;
                break;
            }
        }
    }

    result.summary.verdict = diverged ? "diverged" : "stable";
    result.summary.final_norm =
        diverged ? kInf : stacked_norm(state.x_p, state.observer.x_e);
    result.summary.blocked_count = trace.log.blocked_attempt_indices.size();
    const std::vector<double> successes = trace.log.success_times();
    result.summary.event_count = successes.size();
    result.summary.min_event_gap = config.horizon;
    for (std::size_t i = 1; i < successes.size(); ++i) {
        result.summary.min_event_gap =
            std::min(result.summary.min_event_gap, successes[i] - successes[i - 1]);
    }
    result.summary.fsdos_duration = fsdos_duration(scenario, 0.0, config.horizon);
    result.summary.w_sup_seen = w_sup;

    trace.switching.effective_fsdos =
        effective_fsdos_intervals(fsdos_set(scenario, 0.0, config.horizon), successes);
    return result;
}

DissipationReport check_dissipation(const Trace& trace, const GainSet& gains,
                                    const PlantModel& plant) {
    DissipationReport report;
    report.worst_excess = -kInf;
    const std::size_t modes = gains.mode_count();
    std::vector<double> omega1(modes, 0.0), nu1(modes, 0.0);
    std::vector<bool> certified(modes, false);
    for (std::size_t m = 0; m < modes; ++m) {
        const double zeta1 = lambda_min(build_gamma1(plant, gains, m));
        if (zeta1 > 0.0) {
            const double ahi =
                std::max(lambda_max(gains.p_p[m]), lambda_max(gains.p_e[m]));
            omega1[m] = zeta1 / ahi;
            nu1[m] = (gains.eps1[m] + gains.eps2[m] + gains.psi1) / omega1[m];
            certified[m] = true;
        }
    }

    double f = 0.0;  // running sup of the disturbance norm
    for (std::size_t i = 0; i + 1 < trace.rows.size(); ++i) {
        const TraceRow& a = trace.rows[i];
        const TraceRow& b = trace.rows[i + 1];
        f = std::max(f, a.w_norm);
        if (a.sigma == 0 || a.sigma != b.sigma) continue;
        const std::size_t m = a.sigma - 1;
        if (!certified[m]) continue;
        if (trace.switching.effective_fsdos.restrict_to(a.t, b.t).measure() > 0.0) continue;

        const double h = b.t - a.t;
        const double lhs = (b.v - a.v) / h;
        const double rhs = -omega1[m] * a.v + nu1[m] * omega1[m] * f * f;
        const double derivative_bound = omega1[m] * a.v + nu1[m] * omega1[m] * f * f +
                                        std::fabs(lhs);
        const double slack = 10.0 * h * derivative_bound + 1e-12;
        ++report.checked;
        const double excess = lhs - rhs - slack;
        report.worst_excess = std::max(report.worst_excess, excess);
        if (excess > 0.0) ++report.violations;
    }
    if (report.checked == 0) report.worst_excess = 0.0;
    return report;
}

IssReport check_empirical_iss(const Trace& trace, const GainSet& gains, const PlantModel& plant,
                              double w_sup, bool admissible) {
    IssReport report;
    report.w_sup = w_sup;
    report.applicable = admissible;
    if (trace.rows.empty()) return report;
    const TraceRow& first = trace.rows.front();
    const double x0_norm = stacked_norm(first.x_p, first.x_e);
    for (const TraceRow& row : trace.rows) {
        const double bound =
            evaluate_iss_bound(trace.switching, gains, plant, row.t, x0_norm, w_sup);
        const double norm = stacked_norm(row.x_p, row.x_e);
        double ratio;
        if (bound > 0.0) {
            ratio = norm / bound;
        } else {
            ratio = norm > 1e-12 ? kInf : 0.0;
        }
        report.max_ratio = std::max(report.max_ratio, ratio);
    }
    return report;
}

std::string serialize_trace(const Trace& trace, const PlantModel& plant) {
    const std::size_t n = plant.state_dim();
    const std::size_t nu = plant.input_dim();
    std::string out = "t";
    for (std::size_t i = 0; i < n; ++i) out += ",xp_" + std::to_string(i);
    for (std::size_t i = 0; i < n; ++i) out += ",xe_" + std::to_string(i);
    for (std::size_t i = 0; i < nu; ++i) out += ",u_" + std::to_string(i);
    out += ",sigma,xi_sigma_norm,xi_e_norm,V,event,blocked\n";
    for (const TraceRow& row : trace.rows) {
        append_number(out, row.t);
        const auto append_vec = [&](const std::vector<double>& v) {
            for (double x : v) {
                out += ',';
                append_number(out, x);
            }
        };
        append_vec(row.x_p);
        append_vec(row.x_e);
        append_vec(row.u);
        out += ',' + std::to_string(row.sigma);
        out += ',';
        append_number(out, row.xi_sigma_norm);
        out += ',';
        append_number(out, row.xi_e_norm);
        out += ',';
        append_number(out, row.v);
        out += row.event ? ",1" : ",0";
        out += row.blocked ? ",1\n" : ",0\n";
    }
    return out;
}

}  // namespace dosetc
