#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

#include "doctest.h"
#include "seihrd/model.hpp"
#include "seihrd/scenario.hpp"

using namespace seihrd;

namespace {

ModelParams wa_params() { return scenario_by_name("wa-2020-06").model; }
StateVector wa_initial() { return scenario_by_name("wa-2020-06").initial; }

}  // namespace

TEST_CASE("drift at a disease-free state is zero") {
    const ModelParams p = wa_params();
    StateVector x;
    x.s = 5e6;
    x.r = 2.6e6;
    const StateVector f = drift(x, 0.87, p);
    CHECK(f.s == 0.0);
    CHECK(f.e == 0.0);
    CHECK(f.i == 0.0);
    CHECK(f.h == 0.0);
    CHECK(f.r == 0.0);
    CHECK(f.d == 0.0);
}

TEST_CASE("drift matches direct arithmetic on the initial state") {
    const ModelParams p = wa_params();
    const StateVector x = wa_initial();
    const StateVector f = drift(x, 0.87, p);
    const double expected_ds = -0.87 * 7'497'705.0 * 6'221.0 / 7'600'000.0;
    CHECK(f.s == doctest::Approx(expected_ds).epsilon(1e-12));
    CHECK(f.s == doctest::Approx(-5341.0).epsilon(1e-3));
}

TEST_CASE("drift conserves the population for random states") {
    const ModelParams p = wa_params();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::array<double, 6> parts;
        double total = 0.0;
        for (auto& v : parts) total += v = uni(rng);
        StateVector x{parts[0] / total * p.n_pop, parts[1] / total * p.n_pop,
                      parts[2] / total * p.n_pop, parts[3] / total * p.n_pop,
                      parts[4] / total * p.n_pop, parts[5] / total * p.n_pop};
        const StateVector f = drift(x, 0.87 * uni(rng), p);
        CHECK(std::abs(f.sum()) < 1e-9 * p.n_pop);
    }
}

TEST_CASE("drift rejects negative inputs") {
    const ModelParams p = wa_params();
    StateVector x = wa_initial();
    CHECK_THROWS_AS(drift(x, -0.1, p), std::domain_error);
    x.i = -1.0;
    CHECK_THROWS_AS(drift(x, 0.5, p), std::domain_error);
}

TEST_CASE("drift is zero iff e = i = h = 0 (no vaccination)") {
    const ModelParams p = wa_params();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        StateVector x;
        x.s = uni(rng) * p.n_pop / 2;
        x.e = trial % 4 == 0 ? 0.0 : uni(rng) * 1e5;
        x.i = trial % 4 == 1 ? 0.0 : uni(rng) * 1e5;
        x.h = trial % 4 == 2 ? 0.0 : uni(rng) * 1e5;
        x.r = uni(rng) * 1e6;
        x.d = uni(rng) * 1e4;
        const StateVector f = drift(x, 0.5, p);
        const bool zero_drift = f.s == 0 && f.e == 0 && f.i == 0 && f.h == 0 &&
                                f.r == 0 && f.d == 0;
        CHECK(zero_drift == (x.e == 0 && x.i == 0 && x.h == 0));
    }
}

TEST_CASE("integrate: zero-length horizon returns the initial state") {
    const auto traj = integrate(wa_initial(), ControlPolicy{{}, 1.0}, wa_params());
    REQUIRE(traj.size() == 1);
    CHECK(traj[0].s == wa_initial().s);
}

TEST_CASE("integrate: one step from an equilibrium is an identity") {
    const ModelParams p = wa_params();
    StateVector eq;
    eq.s = 4e6;
    eq.r = 3.5e6;
    eq.d = 1e5;
    const auto traj = integrate(eq, ControlPolicy::constant(0.87, 1), p);
    CHECK(traj[1].s == eq.s);
    CHECK(traj[1].r == eq.r);
    CHECK(traj[1].d == eq.d);
}

TEST_CASE("integrate conserves N and keeps s, d monotone") {
    const ModelParams p = wa_params();
    const auto traj = integrate(wa_initial(), ControlPolicy::constant(0.4, 2000), p);
    for (std::size_t n = 0; n < traj.size(); ++n) {
        CHECK(std::abs(traj[n].sum() - p.n_pop) <= 1e-6 * p.n_pop);
        if (n > 0) {
            CHECK(traj[n].s <= traj[n - 1].s);
            CHECK(traj[n].d >= traj[n - 1].d);
        }
    }
}

TEST_CASE("integrate: final size stays below N / R0 at T = 6000") {
    const ModelParams p = wa_params();
    const double beta = 0.87;  // R0 ~ 4
    const auto traj = integrate(wa_initial(), ControlPolicy::constant(beta, 6000), p);
    const double r0 = reproduction_number(beta, p);
    CHECK(traj.back().s <= p.n_pop / r0);
}

TEST_CASE("integrate raises a diagnostic instead of clamping negative states") {
    const ModelParams p = wa_params();
    // dt = 10 makes the infectious update 1 - dt*(exit rate) negative.
    ControlPolicy policy = ControlPolicy::constant(0.87, 50, 10.0);
    CHECK_THROWS_AS(integrate(wa_initial(), policy, p), IntegrationError);
    try {
        integrate(wa_initial(), policy, p);
    } catch (const IntegrationError& e) {
        CHECK(e.step() < 50);
    }
}

TEST_CASE("vaccination drains s to exactly zero and holds it there") {
    ModelParams p = wa_params();
    p.vacc_rate = 1.0 / 300.0;
    const auto traj = integrate(wa_initial(), ControlPolicy::constant(0.1, 400), p);
    double first_zero = -1;
    for (std::size_t n = 0; n < traj.size(); ++n) {
        CHECK(traj[n].s >= 0.0);
        if (traj[n].s == 0.0 && first_zero < 0) first_zero = static_cast<double>(n);
        if (first_zero >= 0) CHECK(traj[n].s == 0.0);
        CHECK(std::abs(traj[n].sum() - p.n_pop) <= 1e-6 * p.n_pop);
    }
    CHECK(first_zero > 0);
    CHECK(first_zero <= 300.0);
}

TEST_CASE("reproduction numbers") {
    const ModelParams p = wa_params();
    CHECK(reproduction_number(0.87, p) == doctest::Approx(4.0).epsilon(0.01));
    CHECK(reproduction_number(0.11, p) == doctest::Approx(0.5).epsilon(0.02));
    CHECK(reproduction_number(0.0, p) == 0.0);
    CHECK(effective_reproduction_number(0.87, p.n_pop, p) ==
          reproduction_number(0.87, p));
    CHECK(effective_reproduction_number(0.87, 0.0, p) == 0.0);
    CHECK(effective_reproduction_number(0.87, p.n_pop / 2, p) ==
          doctest::Approx(2.0).epsilon(0.01));
    CHECK_THROWS_AS(effective_reproduction_number(0.5, -1.0, p), std::domain_error);
    CHECK_THROWS_AS(effective_reproduction_number(0.5, 2 * p.n_pop, p),
                    std::domain_error);
    ModelParams bad = p;
    bad.lambda0 = bad.gamma0 = bad.delta0 = 0.0;
    CHECK_THROWS_AS(reproduction_number(0.5, bad), std::domain_error);
}

TEST_CASE("eigen report: closed form, stability condition, counts") {
    const ModelParams p = wa_params();
    StateVector eq;
    eq.s = p.n_pop;

    const EigenReport hot = jacobian_eigenvalues(eq, 0.87, p);
    CHECK_FALSE(hot.stable);  // 0.217 < 0.87
    const EigenReport cold = jacobian_eigenvalues(eq, 0.11, p);
    CHECK(cold.stable);  // 0.217 > 0.11

    int zeros = 0;
    bool has_hospital_rate = false;
    for (const auto& ev : hot.eigenvalues) {
        if (std::abs(ev) <= 1e-9) ++zeros;
        if (std::abs(ev - std::complex<double>(-(p.gamma1 + p.delta1))) < 1e-12)
            has_hospital_rate = true;
    }
    CHECK(zeros == 3);
    CHECK(has_hospital_rate);
    CHECK(-(p.gamma1 + p.delta1) == doctest::Approx(-0.113));

    StateVector busy = eq;
    busy.i = 0.01 * p.n_pop;
    CHECK_THROWS_AS(jacobian_eigenvalues(busy, 0.5, p), std::invalid_argument);
}

TEST_CASE("closed-form eigenvalues match a generic 6x6 eigensolver") {
    const ModelParams p = wa_params();
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        const double beta = 0.05 + 0.85 * uni(rng);
        StateVector eq;
        eq.s = uni(rng) * p.n_pop;
        eq.r = p.n_pop - eq.s;

        // Independent oracle: numerical eigenvalues of the Jacobian of the
        // right-hand side at the equilibrium (i = 0 kills the first column).
        Eigen::MatrixXd j = Eigen::MatrixXd::Zero(6, 6);
        const double xi = p.infectious_exit_rate();
        const double pressure = beta * eq.s / p.n_pop;
        j(0, 2) = -pressure;
        j(1, 1) = -p.alpha;
        j(1, 2) = pressure;
        j(2, 1) = p.alpha;
        j(2, 2) = -xi;
        j(3, 2) = p.lambda0;
        j(3, 3) = -(p.gamma1 + p.delta1);
        j(4, 2) = p.gamma0;
        j(4, 3) = p.gamma1;
        j(5, 2) = p.delta0;
        j(5, 3) = p.delta1;
        Eigen::EigenSolver<Eigen::MatrixXd> solver(j);

        std::vector<std::complex<double>> numeric, closed;
        for (int q = 0; q < 6; ++q) numeric.push_back(solver.eigenvalues()[q]);
        for (const auto& ev : jacobian_eigenvalues(eq, beta, p).eigenvalues)
            closed.push_back(ev);
        auto by_parts = [](const std::complex<double>& a,
                           const std::complex<double>& b) {
            if (a.real() != b.real()) return a.real() < b.real();
            return a.imag() < b.imag();
        };
        std::sort(numeric.begin(), numeric.end(), by_parts);
        std::sort(closed.begin(), closed.end(), by_parts);
        for (int q = 0; q < 6; ++q) {
            const double scale = std::max(1e-9, std::abs(closed[q]));
            CHECK(std::abs(numeric[q] - closed[q]) <= 1e-8 * std::max(1.0, scale));
        }
    }
}

TEST_CASE("model params validation") {
    ModelParams p = wa_params();
    p.n_pop = 0.0;
    CHECK_THROWS_AS(p.validate(), std::domain_error);
    p = wa_params();
    p.alpha = -0.1;
    CHECK_THROWS_AS(p.validate(), std::domain_error);
}
