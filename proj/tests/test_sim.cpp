#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dosetc/sim.hpp"

using namespace dosetc;

namespace {

PlantModel scalar_unstable() {
    return PlantModel(Matrix(1, 1, {1.0}), Matrix(1, 1, {1.0}), {Matrix(1, 1, {1.0})});
}

PlantModel double_integrator() {
    return PlantModel(Matrix(2, 2, {0.0, 1.0, 0.0, 0.0}), Matrix(2, 1, {0.0, 1.0}),
                      {Matrix(1, 2, {1.0, 0.0}), Matrix(1, 2, {1.0, 1.0})});
}

GainSet certified_gains(const PlantModel& plant, const Matrix& k) {
    const SynthesisResult res = synthesize_candidate_gains(plant, k, SynthesisOptions{});
    REQUIRE(res.feasible);
    return res.gains;
}

TriggerParams trigger_for(const PlantModel& plant, const GainSet& gains) {
    TriggerParams t;
    t.psi1 = gains.psi1;
    t.psi2 = gains.psi2;
    t.underline_delta = 1e-3;  // placeholder for the floor computation
    const MinInterExecution mie = min_inter_execution(plant, gains.k, gains.l, t);
    t.underline_delta = 0.5 * mie.global;
    t.retry_period = 0.0;
    return t;
}

SimConfig base_config(const PlantModel& plant, const TriggerParams& trigger, double horizon) {
    SimConfig cfg;
    cfg.dt = trigger.underline_delta / 5.0;
    cfg.horizon = horizon;
    cfg.x_p0.assign(plant.state_dim(), 1.0);
    cfg.x_e0.assign(plant.state_dim(), 0.0);
    cfg.record_stride = 10;
    return cfg;
}

AttackScenario no_attack(const PlantModel& plant) {
    AttackScenario s;
    s.sensor_dos.resize(plant.channel_count());
    return s;
}

AttackScenario blackout(const PlantModel& plant, double horizon) {
    AttackScenario s;
    s.sensor_dos.assign(plant.channel_count(), IntervalSet({{0.0, horizon}}));
    s.actuator_dos = IntervalSet({{0.0, horizon}});
    return s;
}

/// A loop that never attempts updates: observer open-loop, u = 0.
GainSet passive_gains(const PlantModel& plant) {
    GainSet g;
    const std::size_t n = plant.state_dim();
    g.k = Matrix::zeros(plant.input_dim(), n);
    for (std::size_t m = 0; m < plant.channel_count(); ++m) {
        g.l.push_back(Matrix::zeros(n, plant.output_dim(m)));
        g.p_p.push_back(Matrix::identity(n));
        g.p_e.push_back(Matrix::identity(n));
        g.eps1.push_back(1.0);
        g.eps2.push_back(1.0);
        g.eps3.push_back(kDefaultEps34);
        g.eps4.push_back(kDefaultEps34);
    }
    g.psi1 = 1.0;
    g.psi2 = 1.0;
    return g;
}

}  // namespace

TEST_CASE("integrator step matches the scalar exponential") {
    // A stable autonomous scalar: xdot = -x with u pinned at zero.
    PlantModel plant(Matrix(1, 1, {-1.0}), Matrix(1, 1, {1.0}), {Matrix(1, 1, {1.0})});
    const GainSet g = passive_gains(plant);
    ClosedLoopState state;
    state.x_p = {1.0};
    state.observer = ObserverState::initial(plant, {0.0}, 1e-3);
    const ClosedLoopState next = step(plant, g, state, 0.0, 0.01, {0.0});
    CHECK(std::fabs(next.x_p[0] - std::exp(-0.01)) < 1e-9);  // 0.99004983...

    ClosedLoopState zero;
    zero.x_p = {0.0};
    zero.observer = ObserverState::initial(plant, {0.0}, 1e-3);
    const ClosedLoopState still = step(plant, g, zero, 0.0, 0.01, {0.0});
    CHECK(still.x_p[0] == 0.0);
    CHECK(still.observer.x_e[0] == 0.0);
}

TEST_CASE("integrator shows fourth-order convergence on a smooth segment") {
    PlantModel plant(Matrix(1, 1, {-1.0}), Matrix(1, 1, {1.0}), {Matrix(1, 1, {1.0})});
    const GainSet g = passive_gains(plant);
    const auto integrate = [&](double dt, int steps) {
        ClosedLoopState state;
        state.x_p = {1.0};
        state.observer = ObserverState::initial(plant, {0.0}, 1e-3);
        for (int i = 0; i < steps; ++i) {
            state = step(plant, g, state, i * dt, dt, {0.0});
        }
        return state.x_p[0];
    };
    const double coarse = integrate(0.1, 10);
    const double medium = integrate(0.05, 20);
    const double fine = integrate(0.025, 40);
    const double ratio = (coarse - medium) / (medium - fine);
    CHECK(ratio > 8.0);
    CHECK(ratio < 32.0);
}

TEST_CASE("closed-loop run stabilizes the scalar plant without attacks") {
    const PlantModel plant = scalar_unstable();
    const GainSet gains = certified_gains(plant, Matrix(1, 1, {2.0}));
    const TriggerParams trigger = trigger_for(plant, gains);
    SimConfig cfg = base_config(plant, trigger, 10.0);

    const RunResult res = run(plant, gains, trigger, no_attack(plant), cfg);
    CHECK(res.summary.verdict == "stable");
    CHECK(res.summary.final_norm < 1e-3);
    CHECK(res.summary.event_count > 2);
    CHECK(res.summary.blocked_count == 0);
    CHECK(res.summary.min_event_gap >= res.summary.runtime_delta - 1e-12);

    // Inter-event gaps are exact multiples of dt, at or above the grid floor.
    const std::vector<double> succ = res.trace.log.success_times();
    for (std::size_t i = 1; i < succ.size(); ++i) {
        const double gap = succ[i] - succ[i - 1];
        const double steps = gap / cfg.dt;
        CHECK(std::fabs(steps - std::round(steps)) < 1e-9);
        CHECK(gap >= res.summary.runtime_delta - 1e-12);
    }
}

TEST_CASE("total blackout leaves the input at zero and the plant unstable") {
    const PlantModel plant = scalar_unstable();
    const GainSet gains = certified_gains(plant, Matrix(1, 1, {2.0}));
    const TriggerParams trigger = trigger_for(plant, gains);
    SimConfig cfg = base_config(plant, trigger, 10.0);

    const RunResult res = run(plant, gains, trigger, blackout(plant, cfg.horizon), cfg);
    CHECK(res.summary.event_count == 0);
    CHECK(res.summary.max_norm > 1e3);
    for (const TraceRow& row : res.trace.rows) {
        CHECK(row.u[0] == 0.0);
        CHECK(row.blocked == (row.t == 0.0 || row.blocked));  // attempts only ever blocked
        CHECK_FALSE(row.event);
    }
}

TEST_CASE("long blackout of an unstable plant is reported as divergence") {
    const PlantModel plant = scalar_unstable();
    const GainSet gains = certified_gains(plant, Matrix(1, 1, {2.0}));
    const TriggerParams trigger = trigger_for(plant, gains);
    SimConfig cfg = base_config(plant, trigger, 40.0);
    const RunResult res = run(plant, gains, trigger, blackout(plant, cfg.horizon), cfg);
    CHECK(res.summary.verdict == "diverged");
}

TEST_CASE("run survives a sensor outage on one channel") {
    const PlantModel plant = double_integrator();
    const GainSet gains = certified_gains(plant, Matrix(1, 2, {2.0, 3.0}));
    const TriggerParams trigger = trigger_for(plant, gains);
    SimConfig cfg = base_config(plant, trigger, 10.0);

    AttackScenario scenario = no_attack(plant);
    scenario.sensor_dos[0] = IntervalSet({{2.0, 1.0}});

    cfg.horizon = 16.0;
    // A threshold well below the converged amplitude prevents benign mode
    // chattering near the origin, which would otherwise sustain a small
    // limit cycle between the two observers.
    cfg.v_threshold = 1e-6;
    const RunResult res = run(plant, gains, trigger, scenario, cfg);
    CHECK(res.summary.verdict == "stable");
    CHECK(res.summary.final_norm < 1e-2);
    // Sensor-only outage with a clear actuator is never full-scale denial.
    CHECK(res.trace.switching.effective_fsdos.empty());
    for (const TraceRow& row : res.trace.rows) {
        CHECK((row.sigma == 0 || row.sigma == 1 || row.sigma == 2));
    }
}

TEST_CASE("trace bookkeeping: stride, energy coherence, partition accounting") {
    const PlantModel plant = double_integrator();
    const GainSet gains = certified_gains(plant, Matrix(1, 2, {2.0, 3.0}));
    const TriggerParams trigger = trigger_for(plant, gains);
    SimConfig cfg = base_config(plant, trigger, 5.0);
    cfg.disturbance = {DisturbanceSpec::Kind::sinusoid, 0.05, 0.5, 0};

    const RunResult res = run(plant, gains, trigger, no_attack(plant), cfg);
    const Trace& trace = res.trace;
    REQUIRE(trace.rows.size() > 10);

    const double spacing = cfg.dt * static_cast<double>(cfg.record_stride);
    for (std::size_t i = 1; i < trace.rows.size(); ++i) {
        CHECK(trace.rows[i].t - trace.rows[i - 1].t == doctest::Approx(spacing).epsilon(1e-12));
    }
    for (const TraceRow& row : trace.rows) {
        CHECK(row.v >= 0.0);
        const std::size_t m = row.sigma >= 1 ? row.sigma - 1 : 0;
        std::vector<double> tilde(2);
        double v = 0.0;
        for (std::size_t r = 0; r < 2; ++r) tilde[r] = row.x_p[r] - row.x_e[r];
        const std::vector<double> ppx = gains.p_p[m].apply(row.x_p);
        const std::vector<double> pex = gains.p_e[m].apply(tilde);
        for (std::size_t r = 0; r < 2; ++r) v += row.x_p[r] * ppx[r] + tilde[r] * pex[r];
        CHECK(row.v == doctest::Approx(v).epsilon(1e-10));
    }

    // The stored effective denial set matches one rebuilt from the event log.
    const IntervalSet rebuilt = effective_fsdos_intervals(
        fsdos_set(no_attack(plant), 0.0, cfg.horizon), trace.log.success_times());
    CHECK(rebuilt.size() == trace.switching.effective_fsdos.size());
}

TEST_CASE("trigger inequality holds at recorded instants past the floor") {
    const PlantModel plant = scalar_unstable();
    const GainSet gains = certified_gains(plant, Matrix(1, 1, {2.0}));
    const TriggerParams trigger = trigger_for(plant, gains);
    SimConfig cfg = base_config(plant, trigger, 8.0);
    cfg.record_stride = 1;  // full resolution so the check sees every step

    const RunResult res = run(plant, gains, trigger, no_attack(plant), cfg);
    const std::vector<double> succ = res.trace.log.success_times();
    REQUIRE(!succ.empty());
    std::size_t violations = 0;
    for (const TraceRow& row : res.trace.rows) {
        if (row.sigma == 0) continue;
        // Skip instants within the enforced floor after the last success.
        double last = -1.0;
        for (double s : succ) {
            if (s <= row.t + 1e-12) last = s;
        }
        if (last < 0.0 || row.t < last + res.summary.runtime_delta - 1e-12) continue;
        if (row.event) continue;  // inequality restored exactly at events
        const double lhs = row.xi_sigma_norm * row.xi_sigma_norm +
                           row.xi_e_norm * row.xi_e_norm;
        const double y = row.x_p[0];  // channel output equals the state
        const double xe = row.x_e[0];
        const double rhs = trigger.psi1 * y * y + trigger.psi2 * xe * xe;
        // One-step slack: a violation may stand for at most one grid step
        // before the event at the next grid point restores it.
        if (lhs > rhs + 1e-12) ++violations;
    }
    // Any strict violations must be isolated single-step occurrences right
    // before an event; with stride 1 they appear only on event rows, which
    // are excluded, so the count is zero.
    CHECK(violations == 0);
}

TEST_CASE("dissipation check passes on a certified run and flags corruption") {
    const PlantModel plant = scalar_unstable();
    const GainSet gains = certified_gains(plant, Matrix(1, 1, {2.0}));
    const TriggerParams trigger = trigger_for(plant, gains);
    SimConfig cfg = base_config(plant, trigger, 8.0);

    RunResult res = run(plant, gains, trigger, no_attack(plant), cfg);
    const DissipationReport clean = check_dissipation(res.trace, gains, plant);
    CHECK(clean.checked > 50);
    CHECK(clean.violations == 0);

    Trace corrupted = res.trace;
    corrupted.rows[corrupted.rows.size() / 2].v *= 5.0;
    const DissipationReport bad = check_dissipation(corrupted, gains, plant);
    CHECK(bad.violations > 0);
}

TEST_CASE("empirical trajectory bound dominates certified runs") {
    const PlantModel plant = scalar_unstable();
    const GainSet gains = certified_gains(plant, Matrix(1, 1, {2.0}));
    const TriggerParams trigger = trigger_for(plant, gains);

    SUBCASE("disturbance-free decay") {
        SimConfig cfg = base_config(plant, trigger, 8.0);
        const RunResult res = run(plant, gains, trigger, no_attack(plant), cfg);
        const IssReport rep = check_empirical_iss(res.trace, gains, plant, 0.0);
        CHECK(rep.applicable);
        CHECK(rep.max_ratio <= 1.0);
    }

    SUBCASE("zero initial state with constant disturbance") {
        SimConfig cfg = base_config(plant, trigger, 8.0);
        cfg.x_p0 = {0.0};
        cfg.disturbance = {DisturbanceSpec::Kind::constant, 0.05, 0.0, 0};
        const RunResult res = run(plant, gains, trigger, no_attack(plant), cfg);
        const IssReport rep =
            check_empirical_iss(res.trace, gains, plant, res.summary.w_sup_seen);
        CHECK(rep.applicable);
        CHECK(rep.max_ratio <= 1.0);
    }

    SUBCASE("inadmissible attacks yield no verdict") {
        SimConfig cfg = base_config(plant, trigger, 2.0);
        const RunResult res = run(plant, gains, trigger, no_attack(plant), cfg);
        const IssReport rep = check_empirical_iss(res.trace, gains, plant, 0.0, false);
        CHECK_FALSE(rep.applicable);
    }
}

TEST_CASE("disturbance samples respect the amplitude bound and the seed") {
    DisturbanceSpec noise{DisturbanceSpec::Kind::seeded_bounded_noise, 0.3, 0.0, 99};
    for (std::size_t i = 0; i < 200; ++i) {
        const std::vector<double> w = disturbance_value(noise, 3, 0.1 * i, i);
        CHECK(vector_norm(w) <= 0.3 + 1e-12);
        const std::vector<double> again = disturbance_value(noise, 3, 0.1 * i, i);
        CHECK(w == again);
    }
    const DisturbanceSpec sine{DisturbanceSpec::Kind::sinusoid, 0.5, 2.0, 0};
    for (int i = 0; i < 100; ++i) {
        CHECK(vector_norm(disturbance_value(sine, 2, 0.013 * i, i)) <= 0.5 + 1e-12);
    }
    CHECK(vector_norm(disturbance_value({DisturbanceSpec::Kind::constant, 0.7, 0.0, 0}, 4,
                                        1.0, 5)) == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("identical configuration gives byte-identical traces") {
    const PlantModel plant = double_integrator();
    const GainSet gains = certified_gains(plant, Matrix(1, 2, {2.0, 3.0}));
    const TriggerParams trigger = trigger_for(plant, gains);
    SimConfig cfg = base_config(plant, trigger, 4.0);
    cfg.disturbance = {DisturbanceSpec::Kind::seeded_bounded_noise, 0.02, 0.0, 1234};

    const RunResult a = run(plant, gains, trigger, no_attack(plant), cfg);
    const RunResult b = run(plant, gains, trigger, no_attack(plant), cfg);
    CHECK(serialize_trace(a.trace, plant) == serialize_trace(b.trace, plant));
}

TEST_CASE("trace serialization carries the documented columns") {
    const PlantModel plant = double_integrator();
    const GainSet gains = certified_gains(plant, Matrix(1, 2, {2.0, 3.0}));
    const TriggerParams trigger = trigger_for(plant, gains);
    SimConfig cfg = base_config(plant, trigger, 1.0);

    const RunResult res = run(plant, gains, trigger, no_attack(plant), cfg);
    const std::string text = serialize_trace(res.trace, plant);
    const std::string header = text.substr(0, text.find('\n'));
    CHECK(header ==
          "t,xp_0,xp_1,xe_0,xe_1,u_0,sigma,xi_sigma_norm,xi_e_norm,V,event,blocked");
    const std::size_t lines = std::count(text.begin(), text.end(), '\n');
    CHECK(lines == res.trace.rows.size() + 1);
}

TEST_CASE("configuration invariants are enforced") {
    const PlantModel plant = scalar_unstable();
    const GainSet gains = certified_gains(plant, Matrix(1, 1, {2.0}));
    TriggerParams trigger = trigger_for(plant, gains);

    SimConfig cfg = base_config(plant, trigger, 5.0);
    cfg.dt = trigger.underline_delta;  // fewer than four steps per interval
    CHECK_THROWS_AS(run(plant, gains, trigger, no_attack(plant), cfg), config_error);

    cfg = base_config(plant, trigger, 5.0);
    cfg.horizon = cfg.dt / 2.0;
    CHECK_THROWS_AS(run(plant, gains, trigger, no_attack(plant), cfg), config_error);

    cfg = base_config(plant, trigger, 5.0);
    cfg.x_p0 = {1.0, 2.0};
    CHECK_THROWS_AS(run(plant, gains, trigger, no_attack(plant), cfg), dimension_error);

    cfg = base_config(plant, trigger, 5.0);
    cfg.disturbance.amplitude = -0.1;
    CHECK_THROWS_AS(run(plant, gains, trigger, no_attack(plant), cfg), config_error);
}
