#ifndef SEIHRD_MODEL_HPP
#define SEIHRD_MODEL_HPP

#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace seihrd {

/**
 * @brief Rate parameters of the SEIHRD compartmental model.
 *
 * All rates are per day and per person. The infection rate beta is not a
 * model parameter; it is the control variable and is passed to each
 * operation separately. vacc_rate is the fraction of the total population
 * vaccinated per day (zero when no vaccine is available).
 */
struct ModelParams {
    double alpha = 0.0;      ///< exposed -> infectious
    double lambda0 = 0.0;    ///< infectious -> hospitalized
    double gamma0 = 0.0;     ///< infectious -> recovered
    double delta0 = 0.0;     ///< infectious -> dead
    double gamma1 = 0.0;     ///< hospitalized -> recovered
    double delta1 = 0.0;     ///< hospitalized -> dead
    double n_pop = 0.0;      ///< total population N
    double vacc_rate = 0.0;  ///< fraction of N vaccinated per day (o)

    /// Total rate of leaving the infectious state.
    double infectious_exit_rate() const { return lambda0 + gamma0 + delta0; }

    /// Throws std::domain_error if any invariant is violated.
    void validate() const;
};

/**
 * @brief Compartment counts at one time instant.
 *
 * Counts are continuous-valued in the deterministic model; integer-valued
 * states live in the stochastic simulator.
 */
struct StateVector {
    double s = 0.0;
    double e = 0.0;
    double i = 0.0;
    double h = 0.0;
    double r = 0.0;
    double d = 0.0;

    double sum() const { return s + e + i + h + r + d; }
    /// Mass subject to the extinction constraint: E + I + H.
    double infected_mass() const { return e + i + h; }

    std::array<double, 6> to_array() const { return {s, e, i, h, r, d}; }
    static StateVector from_array(const std::array<double, 6>& a) {
        return {a[0], a[1], a[2], a[3], a[4], a[5]};
    }
};

/// Piecewise-constant control on a uniform time grid.
struct ControlPolicy {
    std::vector<double> beta;  ///< one value per step, constant on [n*dt, (n+1)*dt)
    double dt = 1.0;

    std::size_t horizon_steps() const { return beta.size(); }
    double end_time() const { return static_cast<double>(beta.size()) * dt; }

    static ControlPolicy constant(double beta_value, std::size_t steps, double dt = 1.0) {
        return ControlPolicy{std::vector<double>(steps, beta_value), dt};
    }
};

using Trajectory = std::vector<StateVector>;

/// Raised when an Euler step produces a negative or non-finite component.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(std::size_t step, const std::string& what)
        : std::runtime_error(what), step_(step) {}
    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

/// Right-hand side of the six ODEs at the given state and infection rate.
/// With vacc_rate > 0 the susceptible derivative gains -o*N and the
/// recovered derivative +o*N while s > 0; the term vanishes at s = 0.
StateVector drift(const StateVector& state, double beta, const ModelParams& params);

/// Explicit first-order Euler integration of the controlled dynamics.
/// Returns the state at every grid point (horizon_steps + 1 entries).
/// Vaccination outflow is clamped per step so s reaches exactly 0 and
/// stays there. A step that would drive any component negative (or
/// non-finite) raises IntegrationError with the step index; no silent
/// clamping of unstable steps.
Trajectory integrate(const StateVector& initial, const ControlPolicy& policy,
                     const ModelParams& params);

/// R0 = beta / (lambda0 + delta0 + gamma0).
double reproduction_number(double beta, const ModelParams& params);

/// Re = R0 * s / N.
double effective_reproduction_number(double beta, double s, const ModelParams& params);

/**
 * @brief Jacobian eigenvalues at an equilibrium (e = i = h = 0).
 *
 * The characteristic polynomial factors in closed form: a zero eigenvalue
 * of multiplicity three, -(gamma1 + delta1), and the two roots of
 *   eps^2 + (alpha + xi) eps + alpha (xi - beta s / N) = 0,
 * with xi = lambda0 + gamma0 + delta0. The equilibrium is stable iff
 * xi > beta * s / N.
 */
struct EigenReport {
    std::array<std::complex<double>, 6> eigenvalues;
    bool stable = false;
};

/// Precondition: e + i + h <= 1e-6 * N (equilibrium within tolerance),
/// otherwise throws std::invalid_argument.
EigenReport jacobian_eigenvalues(const StateVector& state, double beta,
                                 const ModelParams& params);

namespace detail {

/// Per-step flows shared by the Euler integrator and the adjoint sweep so
/// both sides agree bit-for-bit on the vaccination clamp branch.
struct StepFlows {
    double infection = 0.0;    ///< dt * beta * S * I / N
    double vaccination = 0.0;  ///< min(o * N * dt, S - infection)
    bool clamped = false;      ///< true when the vaccination clamp is active
};

StepFlows step_flows(const StateVector& state, double beta, const ModelParams& params,
                     double dt);

StateVector euler_step(const StateVector& state, double beta, const ModelParams& params,
                       double dt);

}  // namespace detail

}  // namespace seihrd

#endif
