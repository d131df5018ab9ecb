#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "dosetc/observer.hpp"
#include "dosetc/rng.hpp"

using namespace dosetc;

namespace {

PlantModel two_channel_plant() {
    Matrix a(2, 2, {0.0, 1.0, 0.0, 0.0});
    return PlantModel(a, Matrix::column({0.0, 1.0}),
                      {Matrix::row({1.0, 0.0}), Matrix::row({0.0, 1.0})});
}

// Antiderivative of 1/(a + b s + c s^2) on [0, 1]; no real roots inside the
// interval for the nonnegative coefficients used here.
double quadratic_integral_closed_form(double a, double b, double c) {
    if (c == 0.0) {
        if (b == 0.0) return 1.0 / a;
        return std::log((a + b) / a) / b;
    }
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) {
        const double r = std::sqrt(-disc);
        return 2.0 / r * (std::atan((2.0 * c + b) / r) - std::atan(b / r));
    }
    const double r = std::sqrt(disc);
    const auto prim = [b, c, r](double s) {
        return std::log(std::fabs((2.0 * c * s + b - r) / (2.0 * c * s + b + r))) / r;
    };
    return prim(1.0) - prim(0.0);
}

double delta_closed_form(double g, double h, double c, double psi) {
    return quadratic_integral_closed_form((g + c) / std::sqrt(psi), g + h + c,
                                          std::sqrt(psi) * h);
}

}  // namespace

TEST_CASE("mode selection rule") {
    const std::vector<std::vector<double>> held{{2.0}, {4.0}};
    const double v = 1.0;
    CHECK(select_sigma(1, held, v, false) == 1);  // active channel still informative

    const std::vector<std::vector<double>> weak_first{{0.5}, {2.0}};
    CHECK(select_sigma(1, weak_first, v, false) == 2);  // switch to lowest loud channel
    CHECK(select_sigma(1, weak_first, v, true) == 1);   // full-scale DoS freezes switching

    const std::vector<std::vector<double>> all_quiet{{0.1}, {0.2}};
    CHECK(select_sigma(1, all_quiet, v, false) == 1);  // nothing above threshold: retain

    CHECK(select_sigma(0, weak_first, v, false) == 2);  // bootstrap picks lowest loud channel
}

TEST_CASE("observer derivative closed form") {
    const PlantModel plant = two_channel_plant();
    ObserverState state = ObserverState::initial(plant, {0.0, 0.0}, 1e-3);
    const std::vector<Matrix> gains{Matrix::column({1.0, 1.0}), Matrix::column({1.0, 1.0})};

    // sigma = 0: open-loop model copy.
    std::vector<double> d0 = observer_derivative(plant, state, {0.0}, gains);
    CHECK(d0[0] == 0.0);
    CHECK(d0[1] == 0.0);

    state.sigma = 1;
    state.held_y[0] = {1.0};
    const std::vector<double> d1 = observer_derivative(plant, state, {0.0}, gains);
    CHECK(d1[0] == doctest::Approx(1.0));  // L * (yhat - C x_e)
    CHECK(d1[1] == doctest::Approx(1.0));

    state.sigma = 5;
    CHECK_THROWS_AS(observer_derivative(plant, state, {0.0}, gains), config_error);
}

TEST_CASE("observer derivative matches the direct formula on random data") {
    CounterRng rng(61, 0);
    const PlantModel plant = two_channel_plant();
    const std::vector<Matrix> gains{Matrix::column({0.7, -0.2}), Matrix::column({0.3, 0.9})};
    for (int trial = 0; trial < 20; ++trial) {
        ObserverState state = ObserverState::initial(plant, {rng.uniform(-1, 1), rng.uniform(-1, 1)},
                                                     1e-3);
        state.sigma = 1 + rng.below(2);
        state.held_y[state.sigma - 1] = {rng.uniform(-2, 2)};
        const std::vector<double> u{rng.uniform(-1, 1)};
        const std::vector<double> got = observer_derivative(plant, state, u, gains);

        const Matrix& c = plant.channel(state.sigma - 1);
        const double innov = state.held_y[state.sigma - 1][0] - c.apply(state.x_e)[0];
        for (std::size_t i = 0; i < 2; ++i) {
            double expect = plant.b()(i, 0) * u[0] + gains[state.sigma - 1](i, 0) * innov;
            for (std::size_t j = 0; j < 2; ++j) expect += plant.a()(i, j) * state.x_e[j];
            CHECK(got[i] == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("control input is zero until the actuator side succeeds") {
    const PlantModel plant = two_channel_plant();
    ObserverState state = ObserverState::initial(plant, {1.0, 0.0}, 1e-3);
    const Matrix k = Matrix::row({2.0, 0.0});
    const std::vector<double> quiet = control_input(state, k);
    CHECK(quiet[0] == 0.0);

    state.actuator_success = true;
    state.held_xe = {1.0, 0.0};
    CHECK(control_input(state, k)[0] == doctest::Approx(-2.0));
}

TEST_CASE("trigger errors and violation test") {
    const PlantModel plant = two_channel_plant();
    ObserverState state = ObserverState::initial(plant, {0.0, 1.0}, 1e-3);
    state.sigma = 1;
    state.held_y[0] = {2.0};
    state.held_xe = {1.0, 1.0};
    const TriggerErrors e = trigger_errors(state, {1.0}, {0.0, 1.0});
    CHECK(e.xi_sigma[0] == doctest::Approx(1.0));
    CHECK(e.xi_e[0] == doctest::Approx(1.0));
    CHECK(e.xi_e[1] == doctest::Approx(0.0));

    TriggerParams params;
    params.psi1 = 1.0;
    params.psi2 = 1.0;
    params.underline_delta = 0.1;

    TriggerErrors zero{{0.0}, {0.0, 0.0}};
    CHECK(trigger_violated(zero, {0.0}, {0.0, 0.0}, params));        // 0 >= 0 inclusive
    CHECK_FALSE(trigger_violated(zero, {1.0}, {0.0, 0.0}, params));  // margin present

    CounterRng rng(67, 0);
    for (int trial = 0; trial < 50; ++trial) {
        TriggerErrors errs{{rng.uniform(-1, 1)}, {rng.uniform(-1, 1), rng.uniform(-1, 1)}};
        const std::vector<double> y{rng.uniform(-1, 1)};
        const std::vector<double> xe{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const double lhs = errs.xi_sigma[0] * errs.xi_sigma[0] + errs.xi_e[0] * errs.xi_e[0] +
                           errs.xi_e[1] * errs.xi_e[1];
        const double rhs =
            params.psi1 * y[0] * y[0] + params.psi2 * (xe[0] * xe[0] + xe[1] * xe[1]);
        CHECK(trigger_violated(errs, y, xe, params) == (lhs >= rhs));
    }
}

TEST_CASE("next event time applies the floor") {
    TriggerParams params;
    params.psi1 = params.psi2 = 1.0;
    params.underline_delta = 0.1;
    CHECK(next_event_time(0.0, 0.01, params) == doctest::Approx(0.1));
    CHECK(next_event_time(0.0, 0.5, params) == doctest::Approx(0.5));
    CHECK(std::isinf(next_event_time(0.0, std::nullopt, params)));
    CHECK_THROWS_AS(next_event_time(1.0, 0.5, params), ordering_error);
}

TEST_CASE("update attempts against DoS") {
    const PlantModel plant = two_channel_plant();
    const std::vector<double> x_p{3.0, 4.0};

    SUBCASE("clear channels reset everything") {
        AttackScenario clear;
        clear.sensor_dos = {IntervalSet{}, IntervalSet{}};
        ObserverState state = ObserverState::initial(plant, {0.0, 0.0}, 1e-3);
        const AttemptRecord rec = attempt_update(state, 1.0, clear, plant, x_p);
        CHECK(rec.success);
        CHECK(rec.refreshed_channels.size() == 2);
        CHECK(rec.actuator_refreshed);
        CHECK(state.sigma == 1);
        CHECK(state.held_y[0][0] == doctest::Approx(3.0));
        CHECK(state.held_y[1][0] == doctest::Approx(4.0));
        const TriggerErrors e = trigger_errors(state, plant.channel(0).apply(x_p), state.x_e);
        CHECK(vector_norm(e.xi_sigma) == doctest::Approx(0.0));
        CHECK(vector_norm(e.xi_e) == doctest::Approx(0.0));
        CHECK(state.success_count == 1);
    }

    SUBCASE("full-scale DoS leaves no trace but the log entry") {
        AttackScenario full;
        full.sensor_dos = {IntervalSet({{0.0, 2.0}}), IntervalSet({{0.0, 2.0}})};
        full.actuator_dos = IntervalSet({{0.0, 2.0}});
        ObserverState state = ObserverState::initial(plant, {0.0, 0.0}, 1e-3);
        EventLog log;
        log.record(attempt_update(state, 1.0, full, plant, x_p));
        CHECK(log.blocked_attempt_indices.size() == 1);
        CHECK(state.sigma == 0);
        CHECK(state.success_count == 0);
        CHECK(state.held_y[0].empty() == false);
        CHECK(state.held_y[0][0] == 0.0);  // untouched
    }

    SUBCASE("partial DoS refreshes the clear side and may switch modes") {
        AttackScenario partial;
        partial.sensor_dos = {IntervalSet({{0.0, 2.0}}), IntervalSet{}};
        ObserverState state = ObserverState::initial(plant, {0.0, 0.0}, 1e-3);
        state.sigma = 1;
        state.held_y[0] = {1e-6};  // active channel has gone quiet
        const AttemptRecord rec = attempt_update(state, 1.0, partial, plant, x_p);
        CHECK(rec.success);
        CHECK(rec.refreshed_channels == std::vector<std::size_t>{2});
        CHECK(state.sigma == 2);  // switched per the threshold rule
        CHECK(state.held_y[1][0] == doctest::Approx(4.0));
        CHECK(state.held_y[0][0] == doctest::Approx(1e-6));  // blocked channel kept
    }
}

TEST_CASE("analytic inter-execution fixtures") {
    // Plant A=0, B=1, C=1 with K=0, L=0 gives |G| = |H| = 0, |C| = 1.
    PlantModel plant(Matrix(1, 1, {0.0}), Matrix(1, 1, {1.0}), {Matrix(1, 1, {1.0})});
    const Matrix k = Matrix::zeros(1, 1);
    const std::vector<Matrix> gains{Matrix::zeros(1, 1)};

    TriggerParams p1;
    p1.psi1 = p1.psi2 = 1.0;
    p1.underline_delta = 0.01;
    const MinInterExecution ln2 = min_inter_execution(plant, k, gains, p1);
    CHECK(ln2.global == doctest::Approx(0.693147180560).epsilon(1e-12));

    TriggerParams p4 = p1;
    p4.psi1 = p4.psi2 = 4.0;
    const MinInterExecution ln3 = min_inter_execution(plant, k, gains, p4);
    CHECK(ln3.global == doctest::Approx(1.09861228867).epsilon(1e-11));
}

TEST_CASE("quadrature matches the closed-form antiderivative") {
    CounterRng rng(71, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const double g = rng.uniform(0.0, 5.0);
        const double h = rng.uniform(0.0, 5.0);
        const double c = rng.uniform(0.1, 5.0);
        const double psi = rng.uniform(0.05, 4.0);
        CHECK(inter_execution_time(g, h, c, psi) ==
              doctest::Approx(delta_closed_form(g, h, c, psi)).epsilon(1e-8));
    }
}

TEST_CASE("inter-execution time shrinks with the trigger weights") {
    double prev = 0.0;
    for (double psi : {4.0, 1.0, 0.25, 0.0625}) {
        const double delta = inter_execution_time(1.0, 1.0, 1.0, psi);
        if (prev > 0.0) CHECK(delta < prev);
        prev = delta;
    }
    CHECK_THROWS_AS(inter_execution_time(0.0, 1.0, 0.0, 1.0), numeric_error);
}

TEST_CASE("per-mode values and the global minimum") {
    const PlantModel plant = two_channel_plant();
    const Matrix k = Matrix::row({2.0, 3.0});
    const std::vector<Matrix> gains{Matrix::column({1.0, 0.5}), Matrix::column({0.5, 1.0})};
    TriggerParams params;
    params.psi1 = params.psi2 = 0.5;
    params.underline_delta = 0.01;
    const MinInterExecution mie = min_inter_execution(plant, k, gains, params);
    REQUIRE(mie.per_mode.size() == 2);
    CHECK(mie.global == doctest::Approx(std::min(mie.per_mode[0], mie.per_mode[1])));
    CHECK(mie.global > 0.0);
}
