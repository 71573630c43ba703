#include "seihrd/model.hpp"

#include <cmath>
#include <limits>

namespace seihrd {

void ModelParams::validate() const {
    auto nonneg = [](double v, const char* name) {
        if (!(v >= 0.0)) throw std::domain_error(std::string(name) + " must be >= 0");
    };
    nonneg(alpha, "alpha");
    nonneg(lambda0, "lambda0");
    nonneg(gamma0, "gamma0");
    nonneg(delta0, "delta0");
    nonneg(gamma1, "gamma1");
    nonneg(delta1, "delta1");
    nonneg(vacc_rate, "vacc_rate");
    if (!(n_pop > 0.0)) throw std::domain_error("n_pop must be > 0");
    if (!(infectious_exit_rate() > 0.0))
        throw std::domain_error("lambda0 + gamma0 + delta0 must be > 0");
}

namespace {

void check_state_domain(const StateVector& state) {
    const auto a = state.to_array();
    for (double v : a) {
        if (!(v >= 0.0)) throw std::domain_error("state component must be >= 0");
    }
}

}  // namespace

StateVector drift(const StateVector& state, double beta, const ModelParams& params) {
    if (!(beta >= 0.0)) throw std::domain_error("beta must be >= 0");
    check_state_domain(state);

    const double infection = beta * state.s * state.i / params.n_pop;
    const double vaccination = (params.vacc_rate > 0.0 && state.s > 0.0)
                                   ? params.vacc_rate * params.n_pop
                                   : 0.0;

    StateVector out;
    out.s = -infection - vaccination;
    out.e = infection - params.alpha * state.e;
    out.i = params.alpha * state.e - params.infectious_exit_rate() * state.i;
    out.h = params.lambda0 * state.i - (params.gamma1 + params.delta1) * state.h;
    out.r = params.gamma0 * state.i + params.gamma1 * state.h + vaccination;
    out.d = params.delta0 * state.i + params.delta1 * state.h;
    return out;
}

namespace detail {

StepFlows step_flows(const StateVector& state, double beta, const ModelParams& params,
                     double dt) {
    StepFlows f;
    f.infection = dt * beta * state.s * state.i / params.n_pop;
    if (params.vacc_rate > 0.0) {
        const double supply = params.vacc_rate * params.n_pop * dt;
        const double available = state.s - f.infection;
        if (supply >= available) {
            f.vaccination = available;
            f.clamped = true;
        } else {
            f.vaccination = supply;
        }
    }
    return f;
}

StateVector euler_step(const StateVector& state, double beta, const ModelParams& params,
                       double dt) {
    const StepFlows f = step_flows(state, beta, params, dt);
    StateVector next;
    next.s = state.s - f.infection - f.vaccination;
    next.e = state.e + f.infection - dt * params.alpha * state.e;
    next.i = state.i + dt * (params.alpha * state.e -
                             params.infectious_exit_rate() * state.i);
    next.h = state.h + dt * (params.lambda0 * state.i -
                             (params.gamma1 + params.delta1) * state.h);
    next.r = state.r + dt * (params.gamma0 * state.i + params.gamma1 * state.h) +
             f.vaccination;
    next.d = state.d + dt * (params.delta0 * state.i + params.delta1 * state.h);
    return next;
}

}  // namespace detail

Trajectory integrate(const StateVector& initial, const ControlPolicy& policy,
                     const ModelParams& params) {
    if (!(policy.dt > 0.0)) throw std::domain_error("dt must be > 0");
    check_state_domain(initial);

    Trajectory traj;
    traj.reserve(policy.beta.size() + 1);
    traj.push_back(initial);
    for (std::size_t n = 0; n < policy.beta.size(); ++n) {
        if (!(policy.beta[n] >= 0.0))
            throw std::domain_error("beta must be >= 0 at every step");
        const StateVector next = detail::euler_step(traj.back(), policy.beta[n], params,
                                                    policy.dt);
        const auto a = next.to_array();
        for (double v : a) {
            if (!std::isfinite(v))
                throw IntegrationError(n, "non-finite state at step " + std::to_string(n));
            if (v < 0.0)
                throw IntegrationError(n, "negative state component at step " +
                                              std::to_string(n) +
                                              "; reduce dt or check parameters");
        }
        traj.push_back(next);
    }
    return traj;
}

double reproduction_number(double beta, const ModelParams& params) {
    if (!(beta >= 0.0)) throw std::domain_error("beta must be >= 0");
    const double exit_rate = params.infectious_exit_rate();
    if (!(exit_rate > 0.0)) throw std::domain_error("infectious exit rate must be > 0");
    return beta / exit_rate;
}

double effective_reproduction_number(double beta, double s, const ModelParams& params) {
    if (!(s >= 0.0) || s > params.n_pop * (1.0 + 1e-12))
        throw std::domain_error("s must lie in [0, N]");
    return reproduction_number(beta, params) * s / params.n_pop;
}

EigenReport jacobian_eigenvalues(const StateVector& state, double beta,
                                 const ModelParams& params) {
    if (!(beta >= 0.0)) throw std::domain_error("beta must be >= 0");
    if (state.infected_mass() > 1e-6 * params.n_pop)
        throw std::invalid_argument("state is not an equilibrium (e + i + h > 1e-6 N)");

    const double xi = params.infectious_exit_rate();
    const double susceptible_pressure = beta * state.s / params.n_pop;

    // eps^2 + (alpha + xi) eps + alpha (xi - beta s / N) = 0
    const double half_trace = 0.5 * (params.alpha + xi);
    const double det = params.alpha * (xi - susceptible_pressure);
    const double disc = half_trace * half_trace - det;

    std::complex<double> root_plus, root_minus;
    if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        root_plus = {-half_trace + sq, 0.0};
        root_minus = {-half_trace - sq, 0.0};
    } else {
        const double sq = std::sqrt(-disc);
        root_plus = {-half_trace, sq};
        root_minus = {-half_trace, -sq};
    }

    EigenReport report;
    report.eigenvalues = {std::complex<double>(0.0),
                          std::complex<double>(0.0),
                          std::complex<double>(0.0),
                          std::complex<double>(-(params.gamma1 + params.delta1)),
                          root_plus,
                          root_minus};
    report.stable = xi > susceptible_pressure;
    return report;
}

}  // namespace seihrd
