#ifndef SEIHRD_SCENARIO_HPP
#define SEIHRD_SCENARIO_HPP

#include <string>
#include <vector>

#include "seihrd/costs.hpp"
#include "seihrd/model.hpp"

namespace seihrd {

/// A fully specified problem instance: model rates, cost coefficients,
/// initial compartment counts, time step, and end-time cap.
struct Scenario {
    std::string label;
    ModelParams model;
    CostParams cost;
    StateVector initial;
    double dt = 1.0;
    double end_time_cap = 6000.0;

    /// Throws std::domain_error on invalid parameters or when the initial
    /// compartments do not sum to N.
    void validate() const;
};

/// The two built-in scenarios: "wa-2020-06" (Washington State, June 2020)
/// and "us-2021-01" (United States, January 2021).
std::vector<Scenario> builtin_scenarios();

/// Looks up a built-in scenario by label; throws std::invalid_argument if
/// the name is unknown.
Scenario scenario_by_name(const std::string& name);

}  // namespace seihrd

#endif
