#ifndef SEIHRD_SWEEP_HPP
#define SEIHRD_SWEEP_HPP

#include <string>
#include <vector>

#include "seihrd/control.hpp"
#include "seihrd/scenario.hpp"

namespace seihrd {

enum class SweepAxis { n_pop, k, i0_scale, mean_infectious_period, vacc_rate };

SweepAxis sweep_axis_from_string(const std::string& name);
std::string to_string(SweepAxis axis);

/// One optimizer run per (axis value, strategy seed).
struct SweepSpec {
    SweepAxis axis = SweepAxis::k;
    std::vector<double> values;
    std::vector<std::string> strategy_seeds = {"suppression", "mitigation"};
};

struct SweepRow {
    double axis_value = 0.0;
    std::string strategy_seed;
    double cost_per_person = 0.0;  ///< penalized objective per person
    double end_time = 0.0;
    bool converged = false;
    bool capped = false;
    std::string label;
    double sigma = 0.0;
    bool failed = false;
    std::string error;
};

/// Applies one axis value to a base scenario, recomputing derived
/// quantities: n_pop rescales every initial compartment; i0_scale rescales
/// E0, H0, R0 proportionally to I0 with S0 absorbing the remainder;
/// mean_infectious_period rescales lambda0, gamma0, delta0 keeping their
/// ratios fixed.
Scenario apply_axis(const Scenario& base, SweepAxis axis, double value);

/// Human-readable description of the derived-parameter rule, printed into
/// output metadata.
std::string axis_rule_description(SweepAxis axis);

/// Runs the sweep, dispatching independent points across threads
/// (threads <= 0 selects the hardware count). Failures are recorded
/// per-row and the sweep continues.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const Scenario& base,
                                const DescentConfig& config, int threads = 0);

/// Seed-appropriate descent configuration: suppression seeds use the
/// smaller step that keeps the constraint-hugging basin stable.
DescentConfig config_for_seed(const DescentConfig& base, const std::string& seed_tag);

}  // namespace seihrd

#endif
