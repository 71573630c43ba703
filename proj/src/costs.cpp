#include "seihrd/costs.hpp"

#include <cmath>
#include <limits>

namespace seihrd {

double control_cost(double beta, const CostParams& cost, double n_pop) {
    if (!(beta > 0.0)) return std::numeric_limits<double>::infinity();
    const double ratio = beta / cost.b;
    return n_pop * cost.k * (-std::log(ratio) + ratio - 1.0);
}

double control_cost_derivative(double beta, const CostParams& cost, double n_pop) {
    if (!(beta > 0.0)) throw std::domain_error("beta must be > 0");
    return n_pop * cost.k * (1.0 / cost.b - 1.0 / beta);
}

double hospitalization_cost(double h, const CostParams& cost, double n_pop) {
    if (!(h >= 0.0)) throw std::domain_error("h must be >= 0");
    return cost.c0 * h + cost.c1 / n_pop * h * h;
}

double hospitalization_cost_derivative(double h, const CostParams& cost, double n_pop) {
    if (!(h >= 0.0)) throw std::domain_error("h must be >= 0");
    return cost.c0 + 2.0 * cost.c1 / n_pop * h;
}

double death_cost(double d_count, const CostParams& cost) {
    if (!(d_count >= 0.0)) throw std::domain_error("d_count must be >= 0");
    return cost.d * d_count;
}

}  // namespace seihrd
