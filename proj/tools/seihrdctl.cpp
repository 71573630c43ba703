#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "seihrd/control.hpp"
#include "seihrd/ctmc.hpp"
#include "seihrd/dp.hpp"
#include "seihrd/emit.hpp"
#include "seihrd/model.hpp"
#include "seihrd/scenario.hpp"
#include "seihrd/sweep.hpp"

using nlohmann::json;
using namespace seihrd;

namespace {

struct CommonOpts {
    std::string scenario = "wa-2020-06";
    std::string out;
    std::string format = "json";
    double dt = 1.0;
    double mu = 0.01;
    double cap = 6000.0;
    double vacc_rate = -1.0;  // <0 keeps the scenario's value
    std::uint64_t seed = 1;
};

Scenario resolve_scenario(const CommonOpts& opts) {
    Scenario s;
    if (opts.scenario.size() > 5 &&
        opts.scenario.substr(opts.scenario.size() - 5) == ".json") {
        s = load_scenario_file(opts.scenario);
    } else {
        s = scenario_by_name(opts.scenario);
    }
    s.dt = opts.dt;
    s.end_time_cap = opts.cap;
    if (opts.vacc_rate >= 0.0) s.model.vacc_rate = opts.vacc_rate;
    s.validate();
    return s;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--scenario", opts.scenario,
                    "built-in scenario name or path to a scenario .json file");
    cmd->add_option("--out", opts.out, "output path (stdout when omitted)");
    cmd->add_option("--format", opts.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--seed", opts.seed, "random seed for stochastic subcommands");
    cmd->add_option("--dt", opts.dt, "time step in days");
    cmd->add_option("--mu", opts.mu, "quadratic penalty parameter");
    cmd->add_option("--cap", opts.cap, "end-time cap in days");
    cmd->add_option("--vacc-rate", opts.vacc_rate,
                    "override the scenario's vaccination rate (fraction of N per day)");
}

void emit_or_print(const std::string& out, const json& j) {
    if (out.empty()) {
        std::cout << j.dump(2) << '\n';
    } else {
        write_json_file(out, j);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal infection-rate control for the SEIHRD epidemic model"};
    app.require_subcommand(1);

    CommonOpts opt_o, opt_sw, opt_dp, opt_sim, opt_th, opt_eig;

    // optimize
    auto* cmd_opt = app.add_subcommand("optimize", "momentum descent on (beta_t, T)");
    add_common(cmd_opt, opt_o);
    std::string seed_tag = "suppression";
    double step_size = 0.0;
    std::int64_t max_iters = 400'000;
    cmd_opt->add_option("--strategy-seed", seed_tag, "suppression or mitigation")
        ->check(CLI::IsMember({"suppression", "mitigation"}));
    cmd_opt->add_option("--step-size", step_size,
                        "gradient step per N (0 selects the seed default)");
    cmd_opt->add_option("--max-iters", max_iters, "iteration budget");

    // sweep
    auto* cmd_sweep = app.add_subcommand("sweep", "optimizer runs across one axis");
    add_common(cmd_sweep, opt_sw);
    std::string axis_name = "k";
    std::vector<double> axis_values;
    std::vector<std::string> sweep_seeds = {"suppression", "mitigation"};
    int threads = 0;
    cmd_sweep
        ->add_option("--axis", axis_name,
                     "n_pop | k | i0_scale | mean_infectious_period | vacc_rate")
        ->check(CLI::IsMember({"n_pop", "k", "i0_scale", "mean_infectious_period",
                               "vacc_rate"}));
    cmd_sweep->add_option("--values", axis_values, "axis values")->required();
    cmd_sweep->add_option("--seeds", sweep_seeds, "strategy seeds to run per value");
    cmd_sweep->add_option("--threads", threads, "parallel runs (0 = hardware)");

    // dp-solve
    auto* cmd_dp =
        app.add_subcommand("dp-solve", "value iteration on the simplified chain");
    add_common(cmd_dp, opt_dp);
    std::string menu_kind = "continuous";
    std::int64_t dk = 0;
    bool no_renormalize = false;
    cmd_dp->add_option("--menu", menu_kind, "continuous or discrete")
        ->check(CLI::IsMember({"continuous", "discrete"}));
    cmd_dp->add_option("--dk", dk, "lattice increment in persons (0 = auto)");
    cmd_dp->add_flag("--no-renormalize", no_renormalize,
                     "disable the harmonic exit-rate renormalization");

    // thresholds
    auto* cmd_th = app.add_subcommand("thresholds", "policy slice along one axis");
    add_common(cmd_th, opt_th);
    std::string th_menu = "continuous";
    std::string fixed_axis = "s";
    double fixed_value = 0.0;
    std::int64_t th_dk = 0;
    bool th_vacc_layer = false;
    cmd_th->add_option("--menu", th_menu, "continuous or discrete")
        ->check(CLI::IsMember({"continuous", "discrete"}));
    cmd_th->add_option("--fixed-axis", fixed_axis, "s or i")
        ->check(CLI::IsMember({"s", "i"}));
    cmd_th->add_option("--fixed-value", fixed_value, "persons on the fixed axis")
        ->required();
    cmd_th->add_option("--dk", th_dk, "lattice increment in persons (0 = auto)");
    cmd_th->add_flag("--vacc-layer", th_vacc_layer,
                     "slice the vaccination-active policy layer");

    // simulate
    auto* cmd_sim = app.add_subcommand("simulate", "exact-jump stochastic runs");
    add_common(cmd_sim, opt_sim);
    double const_beta = -1.0;
    bool feedback = false;
    int runs = 1;
    bool record_events = false;
    cmd_sim->add_option("--beta", const_beta, "constant infection rate");
    cmd_sim->add_flag("--feedback", feedback,
                      "control from the dynamic-program policy (solved first)");
    cmd_sim->add_option("--runs", runs, "number of seeded runs");
    cmd_sim->add_flag("--record-events", record_events,
                      "keep the full event log (first run only in CSV output)");

    // eigen
    auto* cmd_eig = app.add_subcommand("eigen", "equilibrium stability report");
    add_common(cmd_eig, opt_eig);
    double eig_beta = 0.87;
    double s_fraction = 1.0;
    cmd_eig->add_option("--beta", eig_beta, "infection rate at the equilibrium");
    cmd_eig->add_option("--s-frac", s_fraction,
                        "susceptible fraction of N at the equilibrium");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (cmd_opt->parsed()) {
            const Scenario scenario = resolve_scenario(opt_o);
            DescentConfig cfg;
            cfg.mu = opt_o.mu;
            cfg.end_time_cap = opt_o.cap;
            cfg.max_iters = max_iters;
            cfg.step_size = step_size;
            cfg = config_for_seed(cfg, seed_tag);
            const ControlPolicy seed = seed_tag == "mitigation"
                                           ? mitigation_seed(scenario)
                                           : suppression_seed(scenario);
            const OptimizationResult res = optimize(scenario, seed, cfg);
            if (opt_o.format == "csv") {
                if (opt_o.out.empty())
                    throw std::runtime_error("csv output requires --out");
                write_steps_csv(opt_o.out, res, scenario,
                                json{{"schema_version", kSchemaVersion},
                                     {"scenario", scenario.label},
                                     {"strategy_seed", seed_tag},
                                     {"dt", scenario.dt},
                                     {"mu", cfg.mu},
                                     {"end_time_cap", cfg.end_time_cap}});
            } else {
                emit_or_print(opt_o.out, result_to_json(res, scenario, cfg));
            }
            return res.converged ? 0 : 1;
        }

        if (cmd_sweep->parsed()) {
            const Scenario scenario = resolve_scenario(opt_sw);
            SweepSpec spec;
            spec.axis = sweep_axis_from_string(axis_name);
            spec.values = axis_values;
            spec.strategy_seeds = sweep_seeds;
            DescentConfig cfg;
            cfg.mu = opt_sw.mu;
            cfg.end_time_cap = opt_sw.cap;
            cfg.step_size = 0.0;  // per-seed default
            const auto rows = run_sweep(spec, scenario, cfg, threads);
            const json meta{{"schema_version", kSchemaVersion},
                            {"scenario", scenario.label},
                            {"axis", axis_name},
                            {"rule", axis_rule_description(spec.axis)},
                            {"dt", scenario.dt},
                            {"mu", cfg.mu},
                            {"end_time_cap", cfg.end_time_cap}};
            if (opt_sw.format == "csv") {
                if (opt_sw.out.empty())
                    throw std::runtime_error("csv output requires --out");
                write_sweep_csv(opt_sw.out, rows, meta);
            } else {
                json out{{"metadata", meta}, {"rows", json::array()}};
                for (const auto& r : rows)
                    out["rows"].push_back({{"axis", r.axis_value},
                                           {"strategy", r.strategy_seed},
                                           {"cost_per_person", r.cost_per_person},
                                           {"end_time", r.end_time},
                                           {"converged", r.converged},
                                           {"capped", r.capped},
                                           {"label", r.label},
                                           {"sigma", r.sigma},
                                           {"error", r.error}});
                emit_or_print(opt_sw.out, out);
            }
            for (const auto& r : rows)
                if (r.failed) return 1;
            return 0;
        }

        if (cmd_dp->parsed()) {
            const Scenario scenario = resolve_scenario(opt_dp);
            const SimplifiedParams params =
                reduce_parameters(scenario.model, scenario.cost);
            const BetaMenu menu =
                menu_kind == "discrete"
                    ? BetaMenu::discrete_levels(params.lambda_tilde, scenario.cost.b)
                    : BetaMenu::continuous(scenario.cost.b);
            GridConfig grid;
            grid.dk = dk;
            grid.renormalize = !no_renormalize;
            const DpSolution sol = solve_bellman(params, menu, grid);
            if (opt_dp.out.empty())
                throw std::runtime_error("dp-solve writes csv; --out is required");
            write_dp_csv(opt_dp.out, sol, params);
            return 0;
        }

        if (cmd_th->parsed()) {
            const Scenario scenario = resolve_scenario(opt_th);
            const SimplifiedParams params =
                reduce_parameters(scenario.model, scenario.cost);
            const BetaMenu menu =
                th_menu == "discrete"
                    ? BetaMenu::discrete_levels(params.lambda_tilde, scenario.cost.b)
                    : BetaMenu::continuous(scenario.cost.b);
            GridConfig grid;
            grid.dk = th_dk;
            const DpSolution sol = solve_bellman(params, menu, grid);
            const ThresholdCurve curve = switching_thresholds(
                sol, fixed_axis == "s" ? SliceAxis::fixed_s : SliceAxis::fixed_i,
                fixed_value, th_vacc_layer);
            if (opt_th.out.empty())
                throw std::runtime_error("thresholds writes csv; --out is required");
            write_threshold_csv(opt_th.out, curve,
                                json{{"schema_version", kSchemaVersion},
                                     {"scenario", scenario.label},
                                     {"menu", th_menu}});
            return 0;
        }

        if (cmd_sim->parsed()) {
            const Scenario scenario = resolve_scenario(opt_sim);
            std::optional<DpSolution> dp;
            PolicySource policy = PolicySource::constant(scenario.cost.b);
            if (feedback) {
                const SimplifiedParams params =
                    reduce_parameters(scenario.model, scenario.cost);
                dp = solve_bellman(params, BetaMenu::continuous(scenario.cost.b), {});
                policy = PolicySource::from_dp(*dp, scenario.model.vacc_rate > 0.0);
            } else if (const_beta >= 0.0) {
                policy = PolicySource::constant(const_beta);
            } else {
                throw std::invalid_argument("simulate needs --beta or --feedback");
            }
            IntState initial{
                static_cast<std::int64_t>(std::llround(scenario.initial.s)),
                static_cast<std::int64_t>(std::llround(scenario.initial.e)),
                static_cast<std::int64_t>(std::llround(scenario.initial.i)),
                static_cast<std::int64_t>(std::llround(scenario.initial.h)),
                static_cast<std::int64_t>(std::llround(scenario.initial.r)),
                static_cast<std::int64_t>(std::llround(scenario.initial.d))};
            const auto total = initial.sum();
            const auto n_pop =
                static_cast<std::int64_t>(std::llround(scenario.model.n_pop));
            initial.s += n_pop - total;  // absorb rounding into S

            SimOptions sim_opts;
            sim_opts.record_events = record_events;
            std::vector<SimulationRun> all_runs;
            for (int j = 0; j < runs; ++j) {
                SimOptions this_opts = sim_opts;
                if (j > 0) this_opts.record_events = false;
                all_runs.push_back(simulate(initial, policy, scenario.model,
                                            scenario.cost, opt_sim.seed + j,
                                            this_opts));
            }
            const EnsembleStats stats = ensemble_stats(all_runs);
            const json meta{{"schema_version", kSchemaVersion},
                            {"scenario", scenario.label},
                            {"policy", feedback ? "dp-feedback" : "constant"},
                            {"beta", const_beta},
                            {"base_seed", opt_sim.seed},
                            {"dt", scenario.dt}};
            if (opt_sim.format == "csv") {
                if (opt_sim.out.empty())
                    throw std::runtime_error("csv output requires --out");
                if (!record_events)
                    throw std::runtime_error("csv output requires --record-events");
                write_events_csv(opt_sim.out, all_runs.front(), meta);
            } else {
                emit_or_print(opt_sim.out, ensemble_to_json(stats, all_runs, meta));
            }
            return 0;
        }

        if (cmd_eig->parsed()) {
            const Scenario scenario = resolve_scenario(opt_eig);
            StateVector eq;
            eq.s = s_fraction * scenario.model.n_pop;
            eq.r = scenario.model.n_pop - eq.s;
            const EigenReport report = jacobian_eigenvalues(eq, eig_beta, scenario.model);
            json eigs = json::array();
            for (const auto& ev : report.eigenvalues)
                eigs.push_back({{"re", ev.real()}, {"im", ev.imag()}});
            emit_or_print(opt_eig.out,
                          json{{"schema_version", kSchemaVersion},
                               {"scenario", scenario.label},
                               {"beta", eig_beta},
                               {"s", eq.s},
                               {"reproduction_number",
                                reproduction_number(eig_beta, scenario.model)},
                               {"effective_reproduction_number",
                                effective_reproduction_number(eig_beta, eq.s,
                                                              scenario.model)},
                               {"eigenvalues", eigs},
                               {"stable", report.stable}});
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
