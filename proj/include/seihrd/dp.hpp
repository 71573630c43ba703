#ifndef SEIHRD_DP_HPP
#define SEIHRD_DP_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "seihrd/costs.hpp"
#include "seihrd/model.hpp"

namespace seihrd {

/**
 * @brief Parameters of the reduced two-variable chain (susceptible and
 * infected; removed is implied).
 *
 * The infected state aggregates exposed and infectious; hospitalized and
 * dead are tracked as fixed fractions p_h (of infected) and p_d (of
 * removed) obtained from the quasi-equilibrium of the full model.
 */
struct SimplifiedParams {
    double lambda_tilde = 0.0;  ///< total infected exit rate
    double p_h = 0.0;           ///< hospitalized fraction of infected
    double p_d = 0.0;           ///< dead fraction of removed
    double n_pop = 0.0;
    double vacc_rate = 0.0;     ///< o, fraction of N vaccinated per day
    CostParams cost;

    void validate() const;
};

/// lambda_tilde = lambda0+gamma0+delta0, p_h = lambda0/(gamma1+delta1),
/// p_d = (delta0 + lambda0 * delta1/(gamma1+delta1)) / lambda_tilde.
SimplifiedParams reduce_parameters(const ModelParams& full, const CostParams& cost);

/// Partial harmonic sum H(k) = sum_{j=1..k} 1/j; exact summation for small
/// k, the log(k) + gamma_e + 1/(2k) - 1/(12k^2) expansion for large k.
double harmonic_number(std::int64_t k);

/// Rate of the coarse lattice jump (i_index -> i_index - 1, covering dk
/// persons at once), renormalized so the expected descent time matches the
/// exact birth-death chain: lambda_tilde / sum_{j=I-dk+1..I} 1/j with
/// I = i_index * dk. For dk = 1 this is exactly lambda_tilde * I.
double renormalized_exit_rate(std::int64_t i_index, std::int64_t dk,
                              double lambda_tilde);

/// Admissible control values for the feedback problem.
struct BetaMenu {
    std::vector<double> values;
    bool discrete = false;

    /// {0.01, 0.02, ..., b}.
    static BetaMenu continuous(double b);
    /// The four policy levels beta = r0 * lambda_tilde for r0 in
    /// {0.5, 1, 2, 4}, clamped to b.
    static BetaMenu discrete_levels(double lambda_tilde, double b);
};

struct GridConfig {
    std::int64_t dk = 0;      ///< lattice increment in persons; 0 = auto
                              ///< (0.001*N above 1e6 population, else 1)
    bool renormalize = true;  ///< harmonic exit-rate renormalization
};

/**
 * @brief Value function and feedback policy on the (S, I) lattice.
 *
 * Lattice index (s_idx, i_idx) covers s_idx*dk susceptible and i_idx*dk
 * infected persons; only the triangle s + i <= N is reachable and cells
 * outside it hold NaN. With vaccination a second layer is solved for the
 * vaccine-available regime; the base layer is the no-vaccine problem, so
 * the two can be compared cell by cell.
 */
struct DpSolution {
    std::int64_t dk = 1;
    int n = 0;  ///< lattice cells per axis (indices 0..n)
    double n_pop = 0.0;
    BetaMenu menu;
    bool renormalized = true;

    std::vector<double> value;       ///< layer u=0 (no vaccination term)
    std::vector<double> beta;        ///< argmax control per cell, layer u=0
    std::vector<double> value_vacc;  ///< layer u=1, empty when vacc_rate = 0
    std::vector<double> beta_vacc;

    double bellman_residual = 0.0;  ///< max relative residual after the sweep

    std::size_t index(int s_idx, int i_idx) const {
        return static_cast<std::size_t>(s_idx) * (n + 1) + i_idx;
    }
    bool in_triangle(int s_idx, int i_idx) const {
        return s_idx >= 0 && i_idx >= 0 && s_idx + i_idx <= n;
    }
    double value_at(int s_idx, int i_idx, bool vacc_layer = false) const;
    double beta_at(int s_idx, int i_idx, bool vacc_layer = false) const;

    /// Nearest-cell feedback lookup for population counts. Positive
    /// infected mass below half a lattice cell maps to the first interior
    /// row: row zero is the absorbing boundary and carries no control
    /// decision.
    double policy_lookup(double s_persons, double i_persons,
                         bool vacc_layer = false) const;
};

/// Solves the coarse-grained Bellman equation in one sweep (ascending S
/// outer, ascending I inner; every referenced neighbor is already final),
/// then verifies the residual. With vaccination the vaccine-available
/// layer is solved first, then the base layer.
DpSolution solve_bellman(const SimplifiedParams& params, const BetaMenu& menu,
                         const GridConfig& grid);

enum class SliceAxis { fixed_s, fixed_i };

/// One-dimensional slice of the feedback policy with the crossing points
/// between adjacent control levels.
struct ThresholdCurve {
    SliceAxis axis = SliceAxis::fixed_s;
    double fixed_value = 0.0;   ///< persons, snapped to the lattice
    bool snapped = false;       ///< fixed_value was off-lattice
    std::vector<double> population;  ///< persons along the free axis
    std::vector<double> beta;
    /// (population, beta_low, beta_high) where the policy switches level.
    struct Crossing {
        double population;
        double beta_from;
        double beta_to;
    };
    std::vector<Crossing> crossings;
};

ThresholdCurve switching_thresholds(const DpSolution& solution, SliceAxis axis,
                                    double fixed_value, bool vacc_layer = false);

}  // namespace seihrd

#endif
