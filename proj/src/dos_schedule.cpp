#include "dosetc/dos_schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dosetc/rng.hpp"

namespace dosetc {

namespace {

// FP slack for the affine counting bounds checked at event endpoints.
constexpr double kCheckSlack = 1e-9;

void require_window(double tau, double t) {
    if (tau < 0.0 || tau > t) {
        throw ordering_error("dos window: requires 0 <= tau <= t");
    }
}

IntervalSet global_fsdos(const AttackScenario& scenario) {
    if (scenario.sensor_dos.empty()) {
        throw dimension_error("AttackScenario: no sensor channels");
    }
    IntervalSet common = scenario.sensor_dos.front();
    for (std::size_t i = 1; i < scenario.sensor_dos.size(); ++i) {
        common = common.intersect(scenario.sensor_dos[i]);
    }
    if (scenario.fsdos_includes_actuator) {
        common = common.union_with(scenario.actuator_dos);
    }
    return common;
}

std::vector<double> scenario_event_points(const AttackScenario& scenario, double horizon) {
    std::vector<double> pts{0.0, horizon};
    const auto add = [&pts, horizon](const IntervalSet& set) {
        for (const Interval& iv : set.intervals()) {
            if (iv.start <= horizon) pts.push_back(iv.start);
            if (iv.end() <= horizon) pts.push_back(iv.end());
        }
    };
    for (const IntervalSet& s : scenario.sensor_dos) add(s);
    add(scenario.actuator_dos);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

}  // namespace

void AssumptionParams::validate(double underline_delta) const {
    if (varkappa < 0.0 || eta < 0.0 || zeta < 0.0) {
        throw ordering_error("AssumptionParams: offsets must be nonnegative");
    }
    if (!(tau_d > underline_delta)) {
        throw ordering_error("AssumptionParams: tau_D must exceed underline_Delta");
    }
    if (!(tau_f > underline_delta)) {
        throw ordering_error("AssumptionParams: tau_F must exceed underline_Delta");
    }
    if (!(t_ratio > 1.0)) {
        throw ordering_error("AssumptionParams: T must exceed 1");
    }
}

bool channel_blocked(const AttackScenario& scenario, std::size_t channel, double t) {
    if (t < 0.0) {
        throw ordering_error("channel_blocked: t must be nonnegative");
    }
    if (channel == kActuatorChannel) {
        return scenario.actuator_dos.contains(t);
    }
    if (channel >= scenario.sensor_dos.size()) {
        throw std::out_of_range("channel_blocked: invalid channel index");
    }
    return scenario.sensor_dos[channel].contains(t);
}

IntervalSet fsdos_set(const AttackScenario& scenario, double tau, double t) {
    require_window(tau, t);
    return global_fsdos(scenario).restrict_to(tau, t);
}

IntervalSet upsilon_set(const AttackScenario& scenario, double tau, double t) {
    require_window(tau, t);
    return global_fsdos(scenario).complement_within(tau, t);
}

std::size_t count_fsdos_transitions(const AttackScenario& scenario, double tau, double t) {
    require_window(tau, t);
    std::size_t n = 0;
    for (double s : fsdos_set(scenario, tau, t).start_points()) {
        if (s >= tau && s < t) ++n;
    }
    return n;
}

double fsdos_duration(const AttackScenario& scenario, double tau, double t) {
    require_window(tau, t);
    return fsdos_set(scenario, tau, t).measure();
}

std::size_t count_mcdos_changes(const AttackScenario& scenario, double tau, double t) {
    require_window(tau, t);
    const IntervalSet fsdos = global_fsdos(scenario);
    std::size_t count = 0;
    for (const IntervalSet& channel : scenario.sensor_dos) {
        for (const Interval& iv : channel.intervals()) {
            for (double instant : {iv.start, iv.end()}) {
                if (instant >= tau && instant < t && !fsdos.contains_interior(instant)) {
                    ++count;
                }
            }
        }
    }
    return count;
}

AssumptionReport validate_assumptions(const AttackScenario& scenario,
                                      const AssumptionParams& params, double horizon,
                                      double underline_delta) {
    if (horizon <= 0.0) {
        throw ordering_error("validate_assumptions: horizon must be positive");
    }
    params.validate(underline_delta);

    AssumptionReport report;
    report.mcdos_frequency.worst_margin = std::numeric_limits<double>::infinity();
    report.fsdos_frequency.worst_margin = std::numeric_limits<double>::infinity();
    report.fsdos_duration.worst_margin = std::numeric_limits<double>::infinity();

    const std::vector<double> pts = scenario_event_points(scenario, horizon);
    const auto note = [](AssumptionCheck& check, double lhs, double rhs, double tau, double t,
                         const char* what) {
        const double margin = rhs - lhs;
        if (margin < check.worst_margin) {
            check.worst_margin = margin;
            check.window_tau = tau;
            check.window_t = t;
        }
        if (lhs > rhs + kCheckSlack) {
            check.ok = false;
            if (check.detail.empty()) {
                check.detail = std::string(what) + " violated on [" + std::to_string(tau) + ", " +
                               std::to_string(t) + "]";
            }
        }
    };

    // Window quantities are answered from precomputed sorted data; rebuilding
    // the full-scale set per window is quadratic in event count otherwise.
    const IntervalSet fsdos = global_fsdos(scenario);
    std::vector<double> mc_instants;
    for (const IntervalSet& channel : scenario.sensor_dos) {
        for (const Interval& iv : channel.intervals()) {
            for (double instant : {iv.start, iv.end()}) {
                if (!fsdos.contains_interior(instant)) mc_instants.push_back(instant);
            }
        }
    }
    std::sort(mc_instants.begin(), mc_instants.end());
    const std::vector<double> fs_starts = fsdos.start_points();

    const auto count_in = [](const std::vector<double>& sorted, double tau, double t) {
        return static_cast<double>(std::lower_bound(sorted.begin(), sorted.end(), t) -
                                   std::lower_bound(sorted.begin(), sorted.end(), tau));
    };
    const auto clipped_measure = [&fsdos](double tau, double t) {
        double m = 0.0;
        for (const Interval& iv : fsdos.intervals()) {
            if (iv.start >= t) break;
            const double lo = std::max(iv.start, tau);
            const double hi = std::min(iv.end(), t);
            if (hi > lo) m += hi - lo;
        }
        return m;
    };

    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i; j < pts.size(); ++j) {
            const double tau = pts[i];
            const double t = pts[j];
            const double span = t - tau;
            note(report.mcdos_frequency, count_in(mc_instants, tau, t),
                 params.varkappa + span / params.tau_d, tau, t, "MCDoS frequency");
            double transitions = count_in(fs_starts, tau, t);
            if (tau < t && fsdos.contains_interior(tau)) transitions += 1.0;
            note(report.fsdos_frequency, transitions, params.eta + span / params.tau_f, tau, t,
                 "FSDoS frequency");
            note(report.fsdos_duration, clipped_measure(tau, t),
                 params.zeta + span / params.t_ratio, tau, t, "FSDoS duration");
        }
    }
    report.varkappa_consistent = params.varkappa <= 1.0 - underline_delta / params.tau_d + kCheckSlack;
    return report;
}

AttackScenario generate_admissible_attack(const PlantModel& plant,
                                          const AssumptionParams& params, double horizon,
                                          double underline_delta, std::uint64_t seed) {
    params.validate(underline_delta);
    if (horizon <= 0.0) {
        throw ordering_error("generate_admissible_attack: horizon must be positive");
    }
    const std::size_t n_s = plant.channel_count();

    for (int attempt = 0; attempt < 1000; ++attempt) {
        CounterRng rng(seed, static_cast<std::uint64_t>(attempt));
        const double inflate = 1.0 + 0.25 * attempt;

        AttackScenario scenario;
        scenario.sensor_dos.assign(n_s, IntervalSet{});

        // Full-scale bursts on the actuator link, spaced and sized so the
        // frequency and duration budgets hold on every window.
        std::vector<Interval> fsdos;
        if (params.eta >= 1.0 && params.zeta > 0.0) {
            const double spacing = std::max(2.0 * params.tau_f, 4.0 * underline_delta) * inflate;
            const double cap = std::min(params.zeta * params.t_ratio / (params.t_ratio - 1.0),
                                        spacing / params.t_ratio) *
                               0.5;
            double t0 = spacing * rng.uniform(0.5, 1.0);
            while (t0 + cap < horizon) {
                fsdos.push_back(Interval{t0, cap * rng.uniform(0.3, 1.0)});
                t0 += spacing * rng.uniform(1.0, 1.5);
            }
        }
        scenario.actuator_dos = IntervalSet(std::move(fsdos));

        // Single-channel MCDoS bursts, one channel at a time so the sensor
        // intersection stays empty. Any two change instants must sit
        // (2 - kappa) tau_D apart for the window counting bound to hold with
        // kappa < 1, and each change needs (1 - kappa) tau_D of clearance to
        // the horizon.
        if (params.varkappa > 0.0 && n_s >= 2) {
            const double kappa = std::min(params.varkappa, 1.0);
            const double gap = (2.0 - kappa) * params.tau_d * 1.05 * inflate;
            const double clearance = (1.0 - kappa) * params.tau_d;
            std::vector<std::vector<Interval>> per_channel(n_s);
            double t0 = gap * rng.uniform(0.5, 1.5);
            while (true) {
                const double len = gap * rng.uniform(1.0, 1.5);
                if (t0 + len + clearance >= horizon) break;
                const std::size_t ch = static_cast<std::size_t>(rng.below(n_s));
                per_channel[ch].push_back(Interval{t0, len});
                t0 += len + gap * rng.uniform(1.0, 1.5);
            }
            for (std::size_t i = 0; i < n_s; ++i) {
                scenario.sensor_dos[i] = IntervalSet(std::move(per_channel[i]));
            }
        }

        if (validate_assumptions(scenario, params, horizon, underline_delta).all_pass()) {
            return scenario;
        }
    }
    throw generation_error("generate_admissible_attack: no admissible scenario after 1000 attempts");
}

IntervalSet effective_fsdos_intervals(const IntervalSet& fsdos,
                                      const std::vector<double>& event_times) {
    if (!std::is_sorted(event_times.begin(), event_times.end())) {
        throw ordering_error("effective_fsdos_intervals: event times must be sorted");
    }
    std::vector<Interval> out;
    for (const Interval& iv : fsdos.intervals()) {
        double extend_to = iv.end();
        const auto it = std::lower_bound(event_times.begin(), event_times.end(), iv.end());
        for (auto e = it; e != event_times.end(); ++e) {
            if (iv.length == 0.0 && *e == iv.start) continue;  // impulse blocks its own instant
            if (!fsdos.contains(*e)) {
                extend_to = std::max(extend_to, *e);
                break;
            }
        }
        out.push_back(Interval{iv.start, extend_to - iv.start});
    }
    return IntervalSet(std::move(out));
}

}  // namespace dosetc
