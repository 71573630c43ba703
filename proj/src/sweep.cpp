#include "seihrd/sweep.hpp"

#include <future>
#include <stdexcept>
#include <thread>

namespace seihrd {

SweepAxis sweep_axis_from_string(const std::string& name) {
    if (name == "n_pop") return SweepAxis::n_pop;
    if (name == "k") return SweepAxis::k;
    if (name == "i0_scale") return SweepAxis::i0_scale;
    if (name == "mean_infectious_period") return SweepAxis::mean_infectious_period;
    if (name == "vacc_rate") return SweepAxis::vacc_rate;
    throw std::invalid_argument("unknown sweep axis: " + name);
}

std::string to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::n_pop: return "n_pop";
        case SweepAxis::k: return "k";
        case SweepAxis::i0_scale: return "i0_scale";
        case SweepAxis::mean_infectious_period: return "mean_infectious_period";
        case SweepAxis::vacc_rate: return "vacc_rate";
    }
    return "unknown";
}

std::string axis_rule_description(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::n_pop:
            return "initial compartments scaled proportionally to n_pop";
        case SweepAxis::k:
            return "control cost coefficient set directly";
        case SweepAxis::i0_scale:
            return "E0, H0, R0 scaled proportionally to I0; S0 absorbs the remainder";
        case SweepAxis::mean_infectious_period:
            return "lambda0, gamma0, delta0 rescaled to the requested period at fixed "
                   "ratios";
        case SweepAxis::vacc_rate:
            return "vaccination rate set directly";
    }
    return "";
}

Scenario apply_axis(const Scenario& base, SweepAxis axis, double value) {
    Scenario s = base;
    switch (axis) {
        case SweepAxis::n_pop: {
            if (!(value > 0.0)) throw std::domain_error("n_pop must be > 0");
            const double scale = value / base.model.n_pop;
            s.model.n_pop = value;
            s.initial.s = base.initial.s * scale;
            s.initial.e = base.initial.e * scale;
            s.initial.i = base.initial.i * scale;
            s.initial.h = base.initial.h * scale;
            s.initial.r = base.initial.r * scale;
            s.initial.d = base.initial.d * scale;
            break;
        }
        case SweepAxis::k:
            if (!(value > 0.0)) throw std::domain_error("k must be > 0");
            s.cost.k = value;
            break;
        case SweepAxis::i0_scale: {
            if (!(value > 0.0)) throw std::domain_error("i0_scale must be > 0");
            s.initial.i = base.initial.i * value;
            s.initial.e = base.initial.e * value;
            s.initial.h = base.initial.h * value;
            s.initial.r = base.initial.r * value;
            s.initial.s = s.model.n_pop -
                          (s.initial.i + s.initial.e + s.initial.h + s.initial.r +
                           s.initial.d);
            if (s.initial.s < 0.0)
                throw std::domain_error("i0_scale exhausts the population");
            break;
        }
        case SweepAxis::mean_infectious_period: {
            if (!(value > 0.0)) throw std::domain_error("period must be > 0");
            const double scale = 1.0 / (value * base.model.infectious_exit_rate());
            s.model.lambda0 = base.model.lambda0 * scale;
            s.model.gamma0 = base.model.gamma0 * scale;
            s.model.delta0 = base.model.delta0 * scale;
            break;
        }
        case SweepAxis::vacc_rate:
            if (!(value >= 0.0)) throw std::domain_error("vacc_rate must be >= 0");
            s.model.vacc_rate = value;
            break;
    }
    return s;
}

DescentConfig config_for_seed(const DescentConfig& base, const std::string& seed_tag) {
    DescentConfig cfg = base;
    if (cfg.step_size <= 0.0)
        cfg.step_size = seed_tag == "mitigation" ? kMitigationStepSize
                                                 : kSuppressionStepSize;
    return cfg;
}

namespace {

SweepRow run_point(const Scenario& base, SweepAxis axis, const std::string& seed_tag,
                   double axis_value, const DescentConfig& base_config) {
    SweepRow row;
    row.axis_value = axis_value;
    row.strategy_seed = seed_tag;
    try {
        const Scenario scenario = apply_axis(base, axis, axis_value);
        scenario.validate();
        const ControlPolicy seed = seed_tag == "mitigation" ? mitigation_seed(scenario)
                                                            : suppression_seed(scenario);
        const DescentConfig cfg = config_for_seed(base_config, seed_tag);
        const OptimizationResult res = optimize(scenario, seed, cfg);
        row.cost_per_person = res.penalized_cost / scenario.model.n_pop;
        row.end_time = res.end_time;
        row.converged = res.converged;
        row.capped = res.capped;
        row.label = res.label;
        row.sigma = res.sigma;
    } catch (const std::exception& e) {
        row.failed = true;
        row.error = e.what();
    }
    return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const Scenario& base,
                                const DescentConfig& config, int threads) {
    if (spec.values.empty()) throw std::invalid_argument("sweep values must be non-empty");
    if (spec.strategy_seeds.empty())
        throw std::invalid_argument("sweep needs at least one strategy seed");

    struct Job {
        std::string seed;
        double value;
    };
    std::vector<Job> jobs;
    for (double v : spec.values)
        for (const auto& seed : spec.strategy_seeds) jobs.push_back({seed, v});

    if (threads <= 0)
        threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, threads);

    std::vector<SweepRow> rows(jobs.size());
    std::size_t next = 0;
    while (next < jobs.size()) {
        std::vector<std::pair<std::size_t, std::future<SweepRow>>> batch;
        for (int t = 0; t < threads && next < jobs.size(); ++t, ++next) {
            const Job& job = jobs[next];
            batch.emplace_back(next,
                               std::async(std::launch::async, [&base, &spec, &job,
                                                               &config]() {
                                   return run_point(base, spec.axis, job.seed,
                                                    job.value, config);
                               }));
        }
        for (auto& [idx, fut] : batch) rows[idx] = fut.get();
    }
    return rows;
}

}  // namespace seihrd
