#include "seihrd/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace seihrd {

namespace {

constexpr int kS = 0, kE = 1, kI = 2, kH = 3, kR = 4, kD = 5;

double penalty_overshoot(const StateVector& terminal) {
    return std::max(0.0, terminal.infected_mass() - kExtinctionThreshold);
}

}  // namespace

TotalCost total_cost(const Trajectory& traj, const ControlPolicy& policy,
                     const ModelParams& model, const CostParams& cost,
                     std::optional<double> mu) {
    if (traj.size() != policy.beta.size() + 1)
        throw std::invalid_argument("trajectory length must be horizon_steps + 1");

    TotalCost out;
    for (std::size_t n = 0; n < policy.beta.size(); ++n) {
        out.breakdown.control += policy.dt * control_cost(policy.beta[n], cost, model.n_pop);
        out.breakdown.hospitalization +=
            policy.dt * hospitalization_cost(traj[n].h, cost, model.n_pop);
    }
    out.breakdown.death = death_cost(traj.back().d, cost);
    if (mu) {
        const double over = penalty_overshoot(traj.back());
        out.penalty = model.n_pop / (2.0 * *mu) * over * over;
    }
    return out;
}

AdjointTrajectory adjoint_sweep(const Trajectory& traj, const ControlPolicy& policy,
                                const ModelParams& model, const CostParams& cost,
                                double sigma) {
    if (traj.size() != policy.beta.size() + 1)
        throw std::invalid_argument("trajectory length must be horizon_steps + 1");

    const std::size_t m = policy.beta.size();
    const double dt = policy.dt;
    const double xi = model.infectious_exit_rate();

    AdjointTrajectory adj;
    adj.sigma = sigma;
    adj.p.assign(m + 1, {});
    adj.p[m] = {0.0, -sigma, -sigma, -sigma, 0.0, -cost.d};

    for (std::size_t n = m; n-- > 0;) {
        const StateVector& x = traj[n];
        const double beta = policy.beta[n];
        const auto& pn = adj.p[n + 1];
        auto& po = adj.p[n];

        const auto flows = detail::step_flows(x, beta, model, dt);
        const double dinf_ds = dt * beta * x.i / model.n_pop;
        const double dinf_di = dt * beta * x.s / model.n_pop;

        // Transpose of the Euler step Jacobian applied to P_{n+1}, minus
        // the running-cost derivative (costate runs in the -gradient sign
        // convention throughout).
        po[kE] = pn[kE] * (1.0 - dt * model.alpha) + pn[kI] * dt * model.alpha;
        po[kH] = pn[kH] * (1.0 - dt * (model.gamma1 + model.delta1)) +
                 pn[kR] * dt * model.gamma1 + pn[kD] * dt * model.delta1 -
                 dt * hospitalization_cost_derivative(x.h, cost, model.n_pop);
        po[kR] = pn[kR];
        po[kD] = pn[kD];

        if (flows.clamped) {
            // S' pinned at 0; the infected and vaccinated outflow both end
            // up in R, so S and I sensitivities route through P^R.
            po[kS] = pn[kE] * dinf_ds + pn[kR] * (1.0 - dinf_ds);
            po[kI] = pn[kE] * dinf_di + pn[kI] * (1.0 - dt * xi) + pn[kH] * dt * model.lambda0 +
                     pn[kR] * (dt * model.gamma0 - dinf_di) + pn[kD] * dt * model.delta0;
        } else {
            po[kS] = pn[kS] * (1.0 - dinf_ds) + pn[kE] * dinf_ds;
            po[kI] = -pn[kS] * dinf_di + pn[kE] * dinf_di + pn[kI] * (1.0 - dt * xi) +
                     pn[kH] * dt * model.lambda0 + pn[kR] * dt * model.gamma0 +
                     pn[kD] * dt * model.delta0;
        }
    }
    return adj;
}

std::vector<double> policy_gradient(const Trajectory& traj,
                                    const AdjointTrajectory& adjoint,
                                    const ControlPolicy& policy,
                                    const ModelParams& model, const CostParams& cost) {
    if (traj.size() != policy.beta.size() + 1 || adjoint.p.size() != traj.size())
        throw std::invalid_argument("trajectory, adjoint, and policy must be aligned");

    const std::size_t m = policy.beta.size();
    std::vector<double> grad(m);
    for (std::size_t n = 0; n < m; ++n) {
        const StateVector& x = traj[n];
        const auto& pn = adjoint.p[n + 1];
        const auto flows = detail::step_flows(x, policy.beta[n], model, policy.dt);
        const double dinf_dbeta = policy.dt * x.s * x.i / model.n_pop;
        const double sink = flows.clamped ? pn[kR] : pn[kS];
        grad[n] = policy.dt * control_cost_derivative(policy.beta[n], cost, model.n_pop) -
                  dinf_dbeta * (pn[kE] - sink);
    }
    return grad;
}

double hamiltonian(const StateVector& state, const std::array<double, 6>& costate,
                   double beta, const ModelParams& model, const CostParams& cost) {
    const StateVector f = drift(state, beta, model);
    const auto fa = f.to_array();
    double dot = 0.0;
    for (int j = 0; j < 6; ++j) dot += fa[j] * costate[j];
    return dot - control_cost(beta, cost, model.n_pop) -
           hospitalization_cost(state.h, cost, model.n_pop);
}

double hamiltonian_maximizing_beta(const StateVector& state,
                                   const std::array<double, 6>& costate,
                                   const ModelParams& model, const CostParams& cost,
                                   double beta_min) {
    // dH/dbeta = (S I / N)(P^E - P^S) - L'(beta); H is concave in beta, so
    // the stationary point clamped to [beta_min, b] is the maximizer.
    const double a = state.s * state.i / model.n_pop * (costate[kE] - costate[kS]);
    const double nk = model.n_pop * cost.k;
    const double inv_beta = 1.0 / cost.b - a / nk;
    double beta_star = cost.b;
    if (inv_beta > 0.0) beta_star = 1.0 / inv_beta;
    return std::clamp(beta_star, beta_min, cost.b);
}

namespace {

struct SweepScratch {
    Trajectory traj;
    AdjointTrajectory adj;
    std::vector<double> grad;
};

double projected_gradient_norm(const std::vector<double>& grad,
                               const std::vector<double>& beta, double beta_min,
                               double beta_max) {
    double norm = 0.0;
    for (std::size_t n = 0; n < grad.size(); ++n) {
        const bool at_lower = beta[n] <= beta_min * (1.0 + 1e-12);
        const bool at_upper = beta[n] >= beta_max * (1.0 - 1e-12);
        if (at_lower && grad[n] > 0.0) continue;
        if (at_upper && grad[n] < 0.0) continue;
        norm = std::max(norm, std::abs(grad[n]));
    }
    return norm;
}

}  // namespace

OptimizationResult optimize(const Scenario& scenario, const ControlPolicy& init_policy,
                            const DescentConfig& config) {
    scenario.validate();
    if (init_policy.beta.empty())
        throw std::invalid_argument("initial policy must have at least one step");
    for (double b : init_policy.beta) {
        if (!(b > 0.0)) throw std::invalid_argument("initial policy must be strictly positive");
    }

    const ModelParams& model = scenario.model;
    const CostParams& cost = scenario.cost;
    const double dt = init_policy.dt;
    const double beta_min = config.beta_min_frac * cost.b;
    const double grad_tol = config.grad_tol_scale * cost.k * dt;
    const auto max_steps =
        static_cast<std::size_t>(std::llround(config.end_time_cap / dt));

    ControlPolicy policy = init_policy;
    for (double& b : policy.beta) b = std::clamp(b, beta_min, cost.b);
    std::vector<double> velocity(policy.beta.size(), 0.0);

    const double step = config.step_size / model.n_pop;

    OptimizationResult result;
    result.cost_history.reserve(config.record_cost_history ? 1024 : 0);

    SweepScratch ws;
    // At its fixed point the discrete transversality test flips the horizon
    // by one step forever, which keeps sigma (and the gradient) swinging.
    // Settling is therefore detected on a window: the horizon stays within
    // one step, both an extend and a shrink occurred (a genuine flip, not a
    // pause in a slow crawl), and the half-window means of the augmented
    // cost agree.
    constexpr double kFreezeDriftTol = 1e-7;
    constexpr double kExitDriftTol = 1e-9;
    std::vector<std::size_t> recent_horizons;
    std::vector<double> recent_costs;
    std::vector<int> recent_moves;
    recent_horizons.reserve(config.endtime_patience + 1);
    recent_costs.reserve(config.endtime_patience + 1);
    recent_moves.reserve(config.endtime_patience + 1);

    auto finalize = [&](bool converged, std::int64_t iterations) {
        ws.traj = integrate(scenario.initial, policy, model);
        const TotalCost tc = total_cost(ws.traj, policy, model, cost, config.mu);
        OptimizationResult out = std::move(result);
        out.policy = policy;
        out.trajectory = std::move(ws.traj);
        out.breakdown = tc.breakdown;
        out.total_cost = tc.breakdown.total();
        out.penalized_cost = tc.augmented();
        out.end_time = policy.end_time();
        out.constraint_violation = penalty_overshoot(out.trajectory.back());
        out.sigma = model.n_pop / config.mu * out.constraint_violation;
        out.converged = converged;
        out.capped = policy.beta.size() >= max_steps;
        out.iterations = iterations;
        out.label = classify_strategy(out, scenario);
        return out;
    };

    auto horizon_settled = [&]() {
        if (static_cast<int>(recent_horizons.size()) < config.endtime_patience) return false;
        const auto [lo, hi] =
            std::minmax_element(recent_horizons.begin(), recent_horizons.end());
        return *hi - *lo <= 1;
    };

    auto cost_drift_below = [&](double tol) {
        const std::size_t w = recent_costs.size();
        if (static_cast<int>(w) < config.endtime_patience) return false;
        // Even half-length so a period-2 oscillation cancels exactly.
        const std::size_t half = (w / 2) & ~std::size_t{1};
        if (half == 0) return true;
        double m1 = 0.0, m2 = 0.0;
        for (std::size_t j = 0; j < half; ++j) m1 += recent_costs[j];
        for (std::size_t j = w - half; j < w; ++j) m2 += recent_costs[j];
        m1 /= static_cast<double>(half);
        m2 /= static_cast<double>(half);
        return std::abs(m2 - m1) <= tol * std::abs(m2);
    };

    auto augmented_at_horizon = [&](std::size_t steps) {
        ControlPolicy probe = policy;
        while (probe.beta.size() > steps) probe.beta.pop_back();
        while (probe.beta.size() < steps) probe.beta.push_back(probe.beta.back());
        const Trajectory traj = integrate(scenario.initial, probe, model);
        return total_cost(traj, probe, model, cost, config.mu).augmented();
    };

    bool horizon_frozen = false;

    for (std::int64_t iter = 0; iter < config.max_iters; ++iter) {
        ws.traj = integrate(scenario.initial, policy, model);
        const TotalCost tc = total_cost(ws.traj, policy, model, cost, config.mu);
        const double augmented = tc.augmented();
        if (!std::isfinite(augmented)) {
            OptimizationResult last = finalize(false, iter);
            throw OptimizationError("cost diverged at iteration " + std::to_string(iter),
                                    std::move(last));
        }
        if (config.record_cost_history) result.cost_history.push_back(augmented);

        const double sigma =
            model.n_pop / config.mu * penalty_overshoot(ws.traj.back());
        ws.adj = adjoint_sweep(ws.traj, policy, model, cost, sigma);
        ws.grad = policy_gradient(ws.traj, ws.adj, policy, model, cost);

        const double gnorm =
            projected_gradient_norm(ws.grad, policy.beta, beta_min, cost.b);
        result.final_gradient_norm = gnorm;

        recent_horizons.push_back(policy.beta.size());
        recent_costs.push_back(augmented);
        if (static_cast<int>(recent_horizons.size()) > config.endtime_patience) {
            recent_horizons.erase(recent_horizons.begin());
            recent_costs.erase(recent_costs.begin());
            recent_moves.erase(recent_moves.begin());
        }
        const bool window_full =
            static_cast<int>(recent_horizons.size()) >= config.endtime_patience;

        if (!horizon_frozen && window_full) {
            bool saw_extend = false, saw_shrink = false, saw_move = false;
            for (int mv : recent_moves) {
                saw_extend |= mv > 0;
                saw_shrink |= mv < 0;
                saw_move |= mv != 0;
            }
            // A one-step flip with a drift-free cost is the fixed point of
            // the transversality test: pin T at the cheaper phase and let
            // the control finish converging at fixed horizon.
            if (saw_extend && saw_shrink && horizon_settled() &&
                cost_drift_below(kFreezeDriftTol)) {
                const auto [lo, hi] =
                    std::minmax_element(recent_horizons.begin(), recent_horizons.end());
                std::size_t target = *lo;
                if (*hi != *lo && augmented_at_horizon(*hi) < augmented_at_horizon(*lo))
                    target = *hi;
                while (policy.beta.size() > target) {
                    policy.beta.pop_back();
                    velocity.pop_back();
                }
                while (policy.beta.size() < target) {
                    policy.beta.push_back(policy.beta.back());
                    velocity.push_back(0.0);
                }
                horizon_frozen = true;
                recent_costs.clear();
                recent_horizons.clear();
                recent_moves.clear();
                continue;
            }
            // A horizon that never moved across the window is stationary
            // outright (possibly pinned at the cap).
            if (!saw_move) {
                const bool at_cap = policy.beta.size() >= max_steps;
                if (gnorm < grad_tol || (at_cap && cost_drift_below(kExitDriftTol)))
                    return finalize(true, iter + 1);
            }
        }

        // At a stiff penalty wall the momentum iteration chatters with a
        // gradient floor well above tolerance while the cost is stationary
        // to machine precision; either signal counts as converged.
        if (horizon_frozen && window_full &&
            (gnorm < grad_tol || cost_drift_below(kExitDriftTol)))
            return finalize(true, iter + 1);

        const std::size_t m = policy.beta.size();
        for (std::size_t n = 0; n < m; ++n) {
            velocity[n] = config.momentum * velocity[n] + ws.grad[n];
            double b = policy.beta[n] - step * velocity[n];
            if (b < beta_min) {
                b = beta_min;
                velocity[n] = 0.0;
            } else if (b > cost.b) {
                b = cost.b;
                velocity[n] = 0.0;
            }
            policy.beta[n] = b;
        }

        // End-time rule: a positive maximized Hamiltonian at T extends the
        // horizon one step; otherwise a negative one at T - dt shrinks it.
        int move = 0;
        if (!horizon_frozen) {
            const StateVector& xt = ws.traj[m];
            const auto& pt = ws.adj.p[m];
            const double bstar = hamiltonian_maximizing_beta(xt, pt, model, cost, beta_min);
            const double h_end = hamiltonian(xt, pt, bstar, model, cost);
            if (h_end > 0.0 && m < max_steps) {
                policy.beta.push_back(policy.beta.back());
                velocity.push_back(0.0);
                move = 1;
            } else if (m > 1) {
                const StateVector& xp = ws.traj[m - 1];
                const auto& pp = ws.adj.p[m - 1];
                const double bprev =
                    hamiltonian_maximizing_beta(xp, pp, model, cost, beta_min);
                if (hamiltonian(xp, pp, bprev, model, cost) < 0.0) {
                    policy.beta.pop_back();
                    velocity.pop_back();
                    move = -1;
                }
            }
        }
        recent_moves.push_back(move);
    }
    return finalize(false, config.max_iters);
}

std::string classify_strategy(const OptimizationResult& result, const Scenario& scenario) {
    const auto& beta = result.policy.beta;
    const auto& traj = result.trajectory;
    if (beta.empty() || traj.size() != beta.size() + 1) return "other";

    const std::size_t m = beta.size();
    const double n_pop = scenario.model.n_pop;

    double re_max = 0.0;
    for (std::size_t n = 0; n < m; ++n) {
        const double re =
            effective_reproduction_number(beta[n], traj[n].s, scenario.model);
        re_max = std::max(re_max, re);
    }
    const double re_final =
        effective_reproduction_number(beta[m - 1], traj[m - 1].s, scenario.model);
    const double s_final = traj.back().s;

    // Delay-mitigation ends with the susceptible pool emptied by
    // vaccination and Re driven to zero; a suppression run with a vaccine
    // ends with roughly half the population still susceptible, which keeps
    // the two apart.
    if (scenario.model.vacc_rate > 0.0 && s_final < 0.1 * n_pop && re_final < 0.5)
        return "delay-mitigation";
    if (re_max < 1.0) return "suppression";

    bool returns_to_baseline = false;
    for (std::size_t n = m / 2; n < m; ++n) {
        if (beta[n] >= 0.95 * scenario.cost.b) {
            returns_to_baseline = true;
            break;
        }
    }
    if (returns_to_baseline && s_final < 0.5 * n_pop) return "mitigation";
    return "other";
}

ControlPolicy suppression_seed(const Scenario& scenario) {
    const double beta = 0.3 * scenario.model.infectious_exit_rate();
    const auto max_steps =
        static_cast<std::size_t>(std::llround(scenario.end_time_cap / scenario.dt));
    // Horizon = first passage of E+I+H below the extinction threshold under
    // the constant seed beta, so the descent starts on the constraint.
    StateVector x = scenario.initial;
    std::size_t steps = 1;
    for (std::size_t n = 1; n <= max_steps; ++n) {
        x = detail::euler_step(x, beta, scenario.model, scenario.dt);
        steps = n;
        if (x.infected_mass() <= kExtinctionThreshold) break;
    }
    return ControlPolicy::constant(beta, steps, scenario.dt);
}

ControlPolicy mitigation_seed(const Scenario& scenario) {
    const auto steps = static_cast<std::size_t>(std::llround(1500.0 / scenario.dt));
    return ControlPolicy::constant(scenario.cost.b, steps, scenario.dt);
}

}  // namespace seihrd
