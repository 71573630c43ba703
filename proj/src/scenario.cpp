#include "seihrd/scenario.hpp"

#include <cmath>

namespace seihrd {

void Scenario::validate() const {
    model.validate();
    cost.validate();
    if (!(dt > 0.0)) throw std::domain_error("dt must be > 0");
    if (!(end_time_cap > 0.0)) throw std::domain_error("end_time_cap must be > 0");
    const auto a = initial.to_array();
    for (double v : a) {
        if (!std::isfinite(v) || v < 0.0)
            throw std::domain_error("initial compartments must be finite and >= 0");
    }
    if (std::abs(initial.sum() - model.n_pop) > 1e-6 * model.n_pop)
        throw std::domain_error("initial compartments must sum to n_pop");
}

namespace {

ModelParams covid_rates(double n_pop) {
    ModelParams p;
    p.alpha = 0.192;      // 1 / 5.2-day incubation period
    p.lambda0 = 0.008;    // 3.69% of infections hospitalized
    p.gamma0 = 0.209;     // remainder of the 1 / 4.6-day infectious period
    p.delta0 = 0.000195;
    p.gamma1 = 0.1;       // 1 / 10-day hospital stay
    p.delta1 = 0.013;     // 11.8% of hospitalizations fatal
    p.n_pop = n_pop;
    p.vacc_rate = 0.0;
    return p;
}

CostParams covid_costs() {
    CostParams c;
    c.k = 100.0;      // cost of proportional infection-rate reduction
    c.b = 0.87;       // baseline beta, R0 = 4
    c.c0 = 3500.0;    // USD per hospital day
    c.c1 = 1750.0;    // occupancy-threshold term, c0 / 2
    c.d = 7.0e6;      // USD per death
    return c;
}

}  // namespace

std::vector<Scenario> builtin_scenarios() {
    Scenario wa;
    wa.label = "wa-2020-06";
    wa.model = covid_rates(7'600'000.0);
    wa.cost = covid_costs();
    wa.initial = {7'497'705.0, 7'044.0, 6'221.0, 338.0, 88'692.0, 0.0};

    Scenario us;
    us.label = "us-2021-01";
    us.model = covid_rates(328'200'000.0);
    us.cost = covid_costs();
    us.initial = {235'682'298.0, 4'569'525.0, 4'035'804.0, 237'589.0, 83'674'784.0, 0.0};

    return {wa, us};
}

Scenario scenario_by_name(const std::string& name) {
    for (auto& s : builtin_scenarios()) {
        if (s.label == name) return s;
    }
    throw std::invalid_argument("unknown scenario: " + name);
}

}  // namespace seihrd
