#include "seihrd/ctmc.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace seihrd {

namespace {

/// Uniform in [0, 1) from the top 53 bits; exponential via inverse CDF.
class ExpSampler {
public:
    explicit ExpSampler(std::uint64_t seed) : rng_(seed) {}

    double uniform() {
        return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    }
    double exponential(double rate) {
        return -std::log1p(-uniform()) / rate;
    }

private:
    std::mt19937_64 rng_;
};

}  // namespace

const char* to_string(EventKind kind) {
    switch (kind) {
        case EventKind::infection: return "infection";
        case EventKind::incubation: return "incubation";
        case EventKind::recovery_i: return "recovery-I";
        case EventKind::hospitalization: return "hospitalization";
        case EventKind::death_i: return "death-I";
        case EventKind::recovery_h: return "recovery-H";
        case EventKind::death_h: return "death-H";
        case EventKind::vaccination: return "vaccination";
    }
    return "unknown";
}

std::string rng_algorithm_id() { return "mt19937_64/inverse-cdf-exponential"; }

double PolicySource::beta_for(const IntState& state) const {
    if (feedback == nullptr) return constant_beta;
    return feedback->policy_lookup(static_cast<double>(state.s),
                                   static_cast<double>(state.e + state.i), vacc_layer);
}

SimulationRun simulate(const IntState& initial, const PolicySource& policy,
                       const ModelParams& params, const CostParams& cost,
                       std::uint64_t seed, const SimOptions& options) {
    params.validate();
    cost.validate();
    if (initial.s < 0 || initial.e < 0 || initial.i < 0 || initial.h < 0 ||
        initial.r < 0 || initial.d < 0)
        throw std::domain_error("initial compartments must be >= 0");
    if (static_cast<double>(initial.sum()) != params.n_pop)
        throw std::domain_error("initial compartments must sum to n_pop");

    ExpSampler sampler(seed);
    SimulationRun run;
    run.seed = seed;
    IntState x = initial;
    double t = 0.0;
    double cost_acc = 0.0;

    while (x.infected_mass() > 0) {
        if (run.event_count >= options.max_events)
            throw std::runtime_error("simulation exceeded max_events before extinction");

        const double beta = policy.beta_for(x);
        const double sd = static_cast<double>(x.s);
        const double ed = static_cast<double>(x.e);
        const double id = static_cast<double>(x.i);
        const double hd = static_cast<double>(x.h);

        // Per-transition rates; vaccination runs at o*N while anyone is
        // left to vaccinate.
        const std::array<double, 8> rates = {
            beta * sd * id / params.n_pop,                          // infection
            params.alpha * ed,                                      // incubation
            params.gamma0 * id,                                     // recovery-I
            params.lambda0 * id,                                    // hospitalization
            params.delta0 * id,                                     // death-I
            params.gamma1 * hd,                                     // recovery-H
            params.delta1 * hd,                                     // death-H
            (params.vacc_rate > 0.0 && x.s > 0) ? params.vacc_rate * params.n_pop : 0.0,
        };
        double total = 0.0;
        for (double r : rates) total += r;
        if (!(total > 0.0))
            throw std::runtime_error("zero total rate with infection still present");

        const double wait = sampler.exponential(total);
        cost_acc += wait * (control_cost(beta, cost, params.n_pop) +
                            hospitalization_cost(hd, cost, params.n_pop));
        t += wait;

        double pick = sampler.uniform() * total;
        int kind = 0;
        for (; kind < 7; ++kind) {
            if (pick < rates[kind]) break;
            pick -= rates[kind];
        }
        switch (static_cast<EventKind>(kind)) {
            case EventKind::infection: --x.s; ++x.e; break;
            case EventKind::incubation: --x.e; ++x.i; break;
            case EventKind::recovery_i: --x.i; ++x.r; break;
            case EventKind::hospitalization: --x.i; ++x.h; break;
            case EventKind::death_i: --x.i; ++x.d; break;
            case EventKind::recovery_h: --x.h; ++x.r; break;
            case EventKind::death_h: --x.h; ++x.d; break;
            case EventKind::vaccination: --x.s; ++x.r; break;
        }
        ++run.event_count;
        if (options.record_events)
            run.events.push_back({t, static_cast<EventKind>(kind), x, cost_acc});
    }

    run.end_time = t;
    run.final_state = x;
    run.realized_cost = cost_acc + death_cost(static_cast<double>(x.d), cost);
    return run;
}

SimplifiedRun simulate_simplified(std::int64_t s0, std::int64_t i0,
                                  const PolicySource& policy,
                                  const SimplifiedParams& params, std::uint64_t seed,
                                  std::int64_t max_events) {
    params.validate();
    if (s0 < 0 || i0 < 0 || static_cast<double>(s0 + i0) > params.n_pop)
        throw std::domain_error("initial (s, i) must satisfy 0 <= s + i <= N");

    ExpSampler sampler(seed);
    SimplifiedRun run;
    run.seed = seed;
    std::int64_t s = s0, i = i0;
    double t = 0.0, cost_acc = 0.0;

    while (i > 0) {
        if (run.event_count >= max_events)
            throw std::runtime_error("simulation exceeded max_events before extinction");

        IntState proxy;
        proxy.s = s;
        proxy.i = i;
        const double beta = policy.beta_for(proxy);
        const double infect = beta * static_cast<double>(s) *
                              static_cast<double>(i) / params.n_pop;
        const double exit = params.lambda_tilde * static_cast<double>(i);
        const double vacc =
            (params.vacc_rate > 0.0 && s > 0) ? params.vacc_rate * params.n_pop : 0.0;
        const double total = infect + exit + vacc;

        const double wait = sampler.exponential(total);
        cost_acc += wait * (control_cost(beta, params.cost, params.n_pop) +
                            hospitalization_cost(params.p_h * static_cast<double>(i),
                                                 params.cost, params.n_pop));
        t += wait;

        const double pick = sampler.uniform() * total;
        if (pick < infect) {
            --s;
            ++i;
        } else if (pick < infect + exit) {
            --i;
        } else {
            --s;
        }
        ++run.event_count;
    }

    run.end_time = t;
    run.final_s = s;
    const double removed = params.n_pop - static_cast<double>(s);
    run.realized_cost = cost_acc + death_cost(params.p_d * removed, params.cost);
    return run;
}

namespace {

double nearest_rank(std::vector<double> sorted, double p) {
    const auto n = sorted.size();
    auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return sorted[rank - 1];
}

void fill_stats(const std::vector<double>& values, double& mean, double& stddev,
                std::array<double, 5>& quantiles) {
    const auto n = values.size();
    double sum = 0.0;
    for (double v : values) sum += v;
    mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    stddev = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;

    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const std::array<double, 5> ps = {0.05, 0.25, 0.5, 0.75, 0.95};
    for (std::size_t j = 0; j < ps.size(); ++j)
        quantiles[j] = nearest_rank(sorted, ps[j]);
}

}  // namespace

EnsembleStats ensemble_stats(const std::vector<SimulationRun>& runs) {
    if (runs.empty()) throw std::invalid_argument("ensemble requires at least one run");
    EnsembleStats stats;
    stats.runs = runs.size();
    std::vector<double> costs, ends;
    costs.reserve(runs.size());
    ends.reserve(runs.size());
    for (const auto& r : runs) {
        costs.push_back(r.realized_cost);
        ends.push_back(r.end_time);
    }
    fill_stats(costs, stats.cost_mean, stats.cost_stddev, stats.cost_quantiles);
    fill_stats(ends, stats.end_time_mean, stats.end_time_stddev,
               stats.end_time_quantiles);
    return stats;
}

}  // namespace seihrd
