#ifndef SEIHRD_CONTROL_HPP
#define SEIHRD_CONTROL_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "seihrd/costs.hpp"
#include "seihrd/model.hpp"
#include "seihrd/scenario.hpp"

namespace seihrd {

/// Terminal constraint threshold: the disease counts as eliminated once
/// E + I + H falls to 1/e, the level at which the deterministic end time
/// matches the expected stochastic extinction time.
inline constexpr double kExtinctionThreshold = 0.36787944117144233;  // exp(-1)

/// Step sizes (per N) that keep each basin of the descent stable: the
/// suppression basin sits against the penalty wall and needs the smaller
/// step; the mitigation basin tolerates the larger one and its long
/// horizon wants it.
inline constexpr double kSuppressionStepSize = 1e-6;
inline constexpr double kMitigationStepSize = 1e-5;

/// Costate trajectory P_t (one six-vector per grid point, ordered
/// S,E,I,H,R,D) together with the multiplier sigma of the extinction
/// constraint. Terminal values satisfy P_T = (0,-sigma,-sigma,-sigma,0,-d).
struct AdjointTrajectory {
    std::vector<std::array<double, 6>> p;
    double sigma = 0.0;
};

struct CostBreakdown {
    double control = 0.0;
    double hospitalization = 0.0;
    double death = 0.0;
    double total() const { return control + hospitalization + death; }
};

/// Cost of a trajectory/policy pair. `penalty` is the quadratic relaxation
/// of the extinction constraint, (N/2mu) max(0, E_T+I_T+H_T - 1/e)^2; it is
/// reported separately and excluded from the headline total.
struct TotalCost {
    CostBreakdown breakdown;
    double penalty = 0.0;
    double total() const { return breakdown.total(); }
    double augmented() const { return total() + penalty; }
};

/// Hyperparameters of the momentum descent. step_size is multiplied by
/// 1/N internally so configured values are population-scale-free.
struct DescentConfig {
    double step_size = kSuppressionStepSize;  ///< per-N gradient step
    double momentum = 0.9;
    double mu = 0.01;               ///< quadratic penalty parameter
    std::int64_t max_iters = 400'000;
    double grad_tol_scale = 1e-3;   ///< converged when max |proj. grad| < scale*k*dt
    int endtime_patience = 50;      ///< window over which T must stay within one step
    double end_time_cap = 6000.0;
    double beta_min_frac = 1e-4;    ///< lower clamp on beta, as a fraction of b
    bool record_cost_history = false;
};

struct OptimizationResult {
    ControlPolicy policy;
    Trajectory trajectory;
    double total_cost = 0.0;        ///< control + hospitalization + death
    double penalized_cost = 0.0;    ///< total_cost + extinction penalty (the descent objective)
    CostBreakdown breakdown;
    double end_time = 0.0;
    double sigma = 0.0;
    bool converged = false;
    bool capped = false;
    std::string label;              ///< suppression | mitigation | delay-mitigation | other
    std::int64_t iterations = 0;
    double constraint_violation = 0.0;  ///< max(0, E_T+I_T+H_T - 1/e)
    double final_gradient_norm = 0.0;
    std::vector<double> cost_history;   ///< augmented cost per iteration, if recorded
};

/// Raised when the descent produces a non-finite cost; carries the last
/// finite iterate.
class OptimizationError : public std::runtime_error {
public:
    OptimizationError(const std::string& what, OptimizationResult last_stable)
        : std::runtime_error(what), last_stable_(std::move(last_stable)) {}
    const OptimizationResult& last_stable() const { return last_stable_; }

private:
    OptimizationResult last_stable_;
};

/// Left-endpoint rectangle sum of L + F over the horizon plus the terminal
/// death cost; adds the quadratic extinction penalty when mu is given.
/// Throws std::invalid_argument when trajectory and policy lengths disagree.
TotalCost total_cost(const Trajectory& traj, const ControlPolicy& policy,
                     const ModelParams& model, const CostParams& cost,
                     std::optional<double> mu = std::nullopt);

/// Backward sweep of the discrete costate equation. The result is the
/// exact gradient of the Euler-discretized cost (back-propagation through
/// the scheme), not a discretization of the continuous costate flow.
AdjointTrajectory adjoint_sweep(const Trajectory& traj, const ControlPolicy& policy,
                                const ModelParams& model, const CostParams& cost,
                                double sigma);

/// d(augmented cost)/d(beta_n) for every step, assembled from the adjoint.
std::vector<double> policy_gradient(const Trajectory& traj,
                                    const AdjointTrajectory& adjoint,
                                    const ControlPolicy& policy,
                                    const ModelParams& model, const CostParams& cost);

/// H(state, costate, beta) = f . P - L(beta) - F(H).
double hamiltonian(const StateVector& state, const std::array<double, 6>& costate,
                   double beta, const ModelParams& model, const CostParams& cost);

/// argmax of the Hamiltonian over beta in [beta_min, b], in closed form
/// (the Hamiltonian is concave in beta).
double hamiltonian_maximizing_beta(const StateVector& state,
                                   const std::array<double, 6>& costate,
                                   const ModelParams& model, const CostParams& cost,
                                   double beta_min);

/// Momentum gradient descent over (beta_t) with one-step end-time
/// adjustment from the transversality condition. sigma is recovered as
/// (N/mu) max(0, E_T+I_T+H_T - 1/e) at the final iterate.
OptimizationResult optimize(const Scenario& scenario, const ControlPolicy& init_policy,
                            const DescentConfig& config);

/// Qualitative tag for a converged result: "suppression" (Re < 1
/// throughout), "mitigation" (control returns to the baseline and the
/// epidemic runs its course), "delay-mitigation" (Re held near 1 until
/// vaccination empties the susceptible pool), else "other".
std::string classify_strategy(const OptimizationResult& result, const Scenario& scenario);

/// Constant-beta initializations that land the descent in each basin.
/// The suppression seed holds R0 = 0.3 with the horizon set to the first
/// passage of E+I+H below the extinction threshold under that beta, so the
/// iterate starts on the constraint boundary where the suppression basin
/// lives. The mitigation seed is beta = b over 1500 days.
ControlPolicy suppression_seed(const Scenario& scenario);
ControlPolicy mitigation_seed(const Scenario& scenario);

}  // namespace seihrd

#endif
