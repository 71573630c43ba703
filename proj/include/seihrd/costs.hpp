#ifndef SEIHRD_COSTS_HPP
#define SEIHRD_COSTS_HPP

#include <stdexcept>

namespace seihrd {

/**
 * @brief Cost coefficients for the control criterion, in USD.
 *
 * The running control cost is L(beta) = N k (-log(beta/b) + beta/b - 1):
 * zero at the baseline infection rate b, +infinity as beta -> 0. The
 * running hospitalization cost is F(H) = c0 H + (c1/N) H^2 and the
 * terminal death cost is G(D) = d D.
 */
struct CostParams {
    double k = 0.0;   ///< USD/person per unit of proportional infection-rate reduction
    double b = 0.0;   ///< baseline (uncontrolled) infection rate, per day
    double c0 = 0.0;  ///< USD per hospitalized person per day
    double c1 = 0.0;  ///< USD per day, quadratic occupancy coefficient (divided by N)
    double d = 0.0;   ///< USD per death

    void validate() const {
        if (!(k > 0.0)) throw std::domain_error("k must be > 0");
        if (!(b > 0.0)) throw std::domain_error("b must be > 0");
        if (!(c0 >= 0.0)) throw std::domain_error("c0 must be >= 0");
        if (!(c1 >= 0.0)) throw std::domain_error("c1 must be >= 0");
        if (!(d >= 0.0)) throw std::domain_error("d must be >= 0");
    }
};

/// L(beta), USD/day. Returns +infinity for beta <= 0.
double control_cost(double beta, const CostParams& cost, double n_pop);

/// dL/dbeta. Unbounded as beta -> 0+; throws for beta <= 0.
double control_cost_derivative(double beta, const CostParams& cost, double n_pop);

/// F(h), USD/day. Throws std::domain_error for h < 0.
double hospitalization_cost(double h, const CostParams& cost, double n_pop);

/// dF/dh.
double hospitalization_cost_derivative(double h, const CostParams& cost, double n_pop);

/// G(d_count), USD. Throws std::domain_error for d_count < 0.
double death_cost(double d_count, const CostParams& cost);

}  // namespace seihrd

#endif
