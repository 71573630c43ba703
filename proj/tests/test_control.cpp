#include <cmath>
#include <random>

#include "doctest.h"
#include "seihrd/control.hpp"
#include "seihrd/scenario.hpp"

using namespace seihrd;

namespace {

Scenario wa() { return scenario_by_name("wa-2020-06"); }

struct SmallInstance {
    ModelParams model;
    CostParams cost;
    StateVector initial;
    ControlPolicy policy;
    double mu = 0.01;
};

SmallInstance random_instance(std::mt19937_64& rng, bool with_vaccine) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    SmallInstance inst;
    inst.model.alpha = 0.05 + 0.4 * uni(rng);
    inst.model.lambda0 = 0.002 + 0.02 * uni(rng);
    inst.model.gamma0 = 0.1 + 0.2 * uni(rng);
    inst.model.delta0 = 0.0001 + 0.001 * uni(rng);
    inst.model.gamma1 = 0.05 + 0.1 * uni(rng);
    inst.model.delta1 = 0.005 + 0.02 * uni(rng);
    inst.model.n_pop = 100.0 + 9900.0 * uni(rng);
    inst.model.vacc_rate = with_vaccine ? 0.002 * uni(rng) : 0.0;
    inst.cost.k = 20.0 + 200.0 * uni(rng);
    inst.cost.b = 0.4 + 0.6 * uni(rng);
    inst.cost.c0 = 3500.0 * uni(rng);
    inst.cost.c1 = 1750.0 * uni(rng);
    inst.cost.d = 7e6 * uni(rng);

    const int steps = 3 + static_cast<int>(17 * uni(rng));
    inst.policy.dt = 1.0;
    for (int n = 0; n < steps; ++n)
        inst.policy.beta.push_back(inst.cost.b * (0.05 + 0.9 * uni(rng)));

    inst.initial.e = inst.model.n_pop * 0.02 * uni(rng);
    inst.initial.i = inst.model.n_pop * 0.02 * uni(rng);
    inst.initial.h = inst.model.n_pop * 0.005 * uni(rng);
    inst.initial.r = inst.model.n_pop * 0.1 * uni(rng);
    inst.initial.s = inst.model.n_pop - inst.initial.e - inst.initial.i -
                     inst.initial.h - inst.initial.r;
    return inst;
}

}  // namespace

TEST_CASE("total cost: baseline policy at a dead equilibrium costs nothing") {
    const Scenario sc = wa();
    StateVector eq;
    eq.s = sc.model.n_pop;
    const ControlPolicy policy = ControlPolicy::constant(sc.cost.b, 100);
    const auto traj = integrate(eq, policy, sc.model);
    const TotalCost tc = total_cost(traj, policy, sc.model, sc.cost, 0.01);
    CHECK(tc.total() == 0.0);
    CHECK(tc.penalty == 0.0);
}

TEST_CASE("total cost rejects mismatched lengths") {
    const Scenario sc = wa();
    const ControlPolicy policy = ControlPolicy::constant(0.5, 10);
    auto traj = integrate(sc.initial, policy, sc.model);
    traj.pop_back();
    CHECK_THROWS_AS(total_cost(traj, policy, sc.model, sc.cost), std::invalid_argument);
}

TEST_CASE("adjoint terminal conditions carry sigma and the death price") {
    const Scenario sc = wa();
    const ControlPolicy policy = ControlPolicy::constant(0.3, 20);
    const auto traj = integrate(sc.initial, policy, sc.model);
    const double sigma = 1.25e9;
    const auto adj = adjoint_sweep(traj, policy, sc.model, sc.cost, sigma);
    const auto& pt = adj.p.back();
    CHECK(pt[0] == 0.0);
    CHECK(pt[1] == -sigma);
    CHECK(pt[2] == -sigma);
    CHECK(pt[3] == -sigma);
    CHECK(pt[4] == 0.0);
    CHECK(pt[5] == doctest::Approx(-7e6));
}

TEST_CASE("zero-infection trajectory with sigma 0 has flat s and r costates") {
    const Scenario sc = wa();
    StateVector eq;
    eq.s = sc.model.n_pop / 2;
    eq.r = sc.model.n_pop / 2;
    const ControlPolicy policy = ControlPolicy::constant(0.6, 30);
    const auto traj = integrate(eq, policy, sc.model);
    const auto adj = adjoint_sweep(traj, policy, sc.model, sc.cost, 0.0);
    for (const auto& p : adj.p) {
        CHECK(p[0] == 0.0);
        CHECK(p[4] == 0.0);
    }
}

TEST_CASE("adjoint gradient matches central finite differences") {
    std::mt19937_64 rng(42);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const SmallInstance inst = random_instance(rng, trial % 3 == 0);
        const auto traj = integrate(inst.initial, inst.policy, inst.model);
        const double over =
            std::max(0.0, traj.back().infected_mass() - kExtinctionThreshold);
        const double sigma = inst.model.n_pop / inst.mu * over;
        const auto adj = adjoint_sweep(traj, inst.policy, inst.model, inst.cost, sigma);
        const auto grad = policy_gradient(traj, adj, inst.policy, inst.model, inst.cost);

        for (std::size_t n = 0; n < inst.policy.beta.size(); ++n) {
            const double h = 1e-6 * std::max(inst.policy.beta[n], 0.01);
            ControlPolicy up = inst.policy, down = inst.policy;
            up.beta[n] += h;
            down.beta[n] -= h;
            const auto ju = total_cost(integrate(inst.initial, up, inst.model), up,
                                       inst.model, inst.cost, inst.mu);
            const auto jd = total_cost(integrate(inst.initial, down, inst.model), down,
                                       inst.model, inst.cost, inst.mu);
            const double fd = (ju.augmented() - jd.augmented()) / (2 * h);
            const double rel = std::abs(grad[n] - fd) /
                               std::max({std::abs(fd), std::abs(grad[n]), 1e-8});
            worst = std::max(worst, rel);
        }
    }
    CHECK(worst < 1e-5);
}

TEST_CASE("gradient vanishes at the baseline with no infection") {
    const Scenario sc = wa();
    StateVector eq;
    eq.s = sc.model.n_pop;
    const ControlPolicy policy = ControlPolicy::constant(sc.cost.b, 10);
    const auto traj = integrate(eq, policy, sc.model);
    const auto adj = adjoint_sweep(traj, policy, sc.model, sc.cost, 0.0);
    for (double g : policy_gradient(traj, adj, policy, sc.model, sc.cost))
        CHECK(std::abs(g) < 1e-9);
}

TEST_CASE("hamiltonian: zero at a costless equilibrium") {
    const Scenario sc = wa();
    StateVector eq;
    eq.s = sc.model.n_pop;
    CHECK(hamiltonian(eq, {}, sc.cost.b, sc.model, sc.cost) == 0.0);
}

TEST_CASE("closed-form hamiltonian maximizer agrees with a grid search") {
    const Scenario sc = wa();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const double beta_min = 1e-4 * sc.cost.b;
    for (int trial = 0; trial < 40; ++trial) {
        StateVector x = sc.initial;
        x.i *= std::abs(uni(rng)) * 3;
        x.e *= std::abs(uni(rng)) * 3;
        std::array<double, 6> costate;
        for (auto& v : costate) v = 3e9 * uni(rng);
        const double closed =
            hamiltonian_maximizing_beta(x, costate, sc.model, sc.cost, beta_min);
        double best = beta_min, best_value = hamiltonian(x, costate, beta_min, sc.model, sc.cost);
        for (double b = beta_min; b <= sc.cost.b + 1e-12; b += 1e-3) {
            const double v = hamiltonian(x, costate, std::min(b, sc.cost.b), sc.model, sc.cost);
            if (v > best_value) {
                best_value = v;
                best = std::min(b, sc.cost.b);
            }
        }
        CHECK(std::abs(closed - best) <= 1.1e-3);
    }
}

TEST_CASE("optimizer: baseline no-op when only control is priced") {
    Scenario sc = wa();
    sc.cost.c0 = sc.cost.c1 = sc.cost.d = 0.0;
    sc.model.n_pop = 10'000.0;
    sc.initial = {9'800.0, 100.0, 100.0, 0.0, 0.0, 0.0};
    DescentConfig cfg;
    cfg.step_size = 1e-5;
    cfg.mu = 1e12;  // penalty off: pure running-cost problem
    cfg.max_iters = 20'000;
    const auto res = optimize(sc, ControlPolicy::constant(0.5, 40), cfg);
    for (double b : res.policy.beta) CHECK(b == doctest::Approx(sc.cost.b).epsilon(1e-6));
    CHECK(res.total_cost / sc.model.n_pop < 1e-6);
}

TEST_CASE("optimizer: augmented cost is non-increasing over 10-iteration windows") {
    Scenario sc = wa();
    sc.model.n_pop = 10'000.0;
    sc.initial = {9'700.0, 150.0, 140.0, 10.0, 0.0, 0.0};
    DescentConfig cfg;
    cfg.step_size = 1e-6;
    cfg.max_iters = 3'000;
    cfg.record_cost_history = true;
    const auto res = optimize(sc, ControlPolicy::constant(0.1, 60), cfg);
    const auto& hist = res.cost_history;
    REQUIRE(hist.size() > 20);
    // Momentum chatter against the penalty wall rides at ~1e-5 relative
    // amplitude; anything larger would be a genuine ascent.
    for (std::size_t n = 10; n < hist.size(); ++n) {
        const double window_max = *std::max_element(hist.begin() + n - 10, hist.begin() + n);
        CHECK(hist[n] <= window_max * (1.0 + 1e-4));
    }
    CHECK(hist.back() < hist.front());
}

TEST_CASE("optimizer: feasibility and complementarity under mu halving") {
    Scenario sc = wa();
    sc.model.n_pop = 50'000.0;
    sc.initial = {49'000.0, 500.0, 450.0, 50.0, 0.0, 0.0};
    DescentConfig cfg;
    cfg.max_iters = 150'000;

    ControlPolicy warm = suppression_seed(sc);
    std::vector<double> comps, violations;
    double mu = 0.01;
    for (int stage = 0; stage < 7; ++stage) {
        cfg.mu = mu;
        // The penalty wall stiffens as 1/mu; the stable step shrinks with it.
        cfg.step_size = 1e-6 * (mu / 0.01);
        const auto res = optimize(sc, warm, cfg);
        CHECK(res.converged);
        CHECK(res.sigma >= 0.0);
        comps.push_back(res.sigma * res.constraint_violation);
        violations.push_back(res.constraint_violation);
        warm = res.policy;
        mu /= 2.0;
    }
    // The violation contracts at every halving and the complementarity
    // product decreases toward zero along the schedule.
    for (std::size_t j = 1; j < violations.size(); ++j) {
        CHECK(violations[j] < 0.8 * violations[j - 1]);
        CHECK(comps[j] <= comps[j - 1] * (1.0 + 1e-9));
    }
    CHECK(violations.back() < 0.15 * violations.front());
}

TEST_CASE("optimizer rejects empty or non-positive seeds") {
    const Scenario sc = wa();
    DescentConfig cfg;
    CHECK_THROWS_AS(optimize(sc, ControlPolicy{{}, 1.0}, cfg), std::invalid_argument);
    CHECK_THROWS_AS(optimize(sc, ControlPolicy::constant(0.0, 5), cfg),
                    std::invalid_argument);
}

TEST_CASE("strategy classification on constructed results") {
    const Scenario sc = wa();
    // Constant baseline beta, epidemic runs: mitigation or other, never
    // suppression.
    DescentConfig cfg;
    cfg.max_iters = 0;
    OptimizationResult res;
    res.policy = ControlPolicy::constant(sc.cost.b, 400);
    res.trajectory = integrate(sc.initial, res.policy, sc.model);
    const std::string label = classify_strategy(res, sc);
    CHECK(label != "suppression");
    CHECK((label == "mitigation" || label == "other"));
}

TEST_CASE("seeds: suppression seed starts on the constraint boundary") {
    const Scenario sc = wa();
    const ControlPolicy seed = suppression_seed(sc);
    const auto traj = integrate(sc.initial, seed, sc.model);
    CHECK(traj.back().infected_mass() <= kExtinctionThreshold);
    // One step earlier the constraint was still violated.
    CHECK(traj[traj.size() - 2].infected_mass() > kExtinctionThreshold);
    const ControlPolicy mit = mitigation_seed(sc);
    CHECK(mit.beta.size() == 1500);
    CHECK(mit.beta.front() == sc.cost.b);
}
