#include "seihrd/emit.hpp"

#include <fstream>
#include <sstream>

namespace seihrd {

using nlohmann::json;

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

json scenario_to_json(const Scenario& s) {
    return json{
        {"label", s.label},
        {"model",
         {{"alpha", s.model.alpha},
          {"lambda0", s.model.lambda0},
          {"gamma0", s.model.gamma0},
          {"delta0", s.model.delta0},
          {"gamma1", s.model.gamma1},
          {"delta1", s.model.delta1},
          {"n_pop", s.model.n_pop},
          {"vacc_rate", s.model.vacc_rate}}},
        {"cost",
         {{"k", s.cost.k},
          {"b", s.cost.b},
          {"c0", s.cost.c0},
          {"c1", s.cost.c1},
          {"d", s.cost.d}}},
        {"initial",
         {{"s", s.initial.s},
          {"e", s.initial.e},
          {"i", s.initial.i},
          {"h", s.initial.h},
          {"r", s.initial.r},
          {"d", s.initial.d}}},
        {"dt", s.dt},
        {"end_time_cap", s.end_time_cap},
    };
}

Scenario scenario_from_json(const json& j) {
    Scenario s;
    s.label = j.value("label", "");
    const auto& m = j.at("model");
    s.model.alpha = m.at("alpha");
    s.model.lambda0 = m.at("lambda0");
    s.model.gamma0 = m.at("gamma0");
    s.model.delta0 = m.at("delta0");
    s.model.gamma1 = m.at("gamma1");
    s.model.delta1 = m.at("delta1");
    s.model.n_pop = m.at("n_pop");
    s.model.vacc_rate = m.value("vacc_rate", 0.0);
    const auto& c = j.at("cost");
    s.cost.k = c.at("k");
    s.cost.b = c.at("b");
    s.cost.c0 = c.at("c0");
    s.cost.c1 = c.at("c1");
    s.cost.d = c.at("d");
    const auto& x = j.at("initial");
    s.initial = {x.at("s"), x.at("e"), x.at("i"), x.at("h"), x.at("r"), x.at("d")};
    s.dt = j.value("dt", 1.0);
    s.end_time_cap = j.value("end_time_cap", 6000.0);
    s.validate();
    return s;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    json j;
    in >> j;
    return scenario_from_json(j);
}

json result_to_json(const OptimizationResult& result, const Scenario& scenario,
                    const DescentConfig& config, std::optional<std::uint64_t> seed) {
    json steps;
    const std::size_t m = result.policy.beta.size();
    std::vector<double> t(m + 1), s(m + 1), e(m + 1), i(m + 1), h(m + 1), r(m + 1),
        d(m + 1), beta(m + 1), re(m + 1), cum_control(m + 1), cum_hosp(m + 1),
        cum_death(m + 1);
    double acc_control = 0.0, acc_hosp = 0.0;
    for (std::size_t n = 0; n <= m; ++n) {
        const StateVector& x = result.trajectory[n];
        t[n] = static_cast<double>(n) * result.policy.dt;
        s[n] = x.s;
        e[n] = x.e;
        i[n] = x.i;
        h[n] = x.h;
        r[n] = x.r;
        d[n] = x.d;
        const double b = m > 0 ? result.policy.beta[std::min(n, m - 1)] : 0.0;
        beta[n] = b;
        re[n] = effective_reproduction_number(b, x.s, scenario.model);
        cum_control[n] = acc_control;
        cum_hosp[n] = acc_hosp;
        cum_death[n] = death_cost(x.d, scenario.cost);
        if (n < m) {
            acc_control +=
                result.policy.dt * control_cost(b, scenario.cost, scenario.model.n_pop);
            acc_hosp += result.policy.dt *
                        hospitalization_cost(x.h, scenario.cost, scenario.model.n_pop);
        }
    }
    steps["t"] = t;
    steps["s"] = s;
    steps["e"] = e;
    steps["i"] = i;
    steps["h"] = h;
    steps["r"] = r;
    steps["d"] = d;
    steps["beta"] = beta;
    steps["r_e"] = re;
    steps["cumulative_control_cost"] = cum_control;
    steps["cumulative_hospitalization_cost"] = cum_hosp;
    steps["cumulative_death_cost"] = cum_death;

    json j{
        {"schema_version", kSchemaVersion},
        {"dt", result.policy.dt},
        {"mu", config.mu},
        {"end_time_cap", config.end_time_cap},
        {"seed", seed ? json(*seed) : json(nullptr)},
        {"scenario", scenario_to_json(scenario)},
        {"strategy", result.label},
        {"converged", result.converged},
        {"capped", result.capped},
        {"iterations", result.iterations},
        {"total_cost", result.total_cost},
        {"penalized_cost", result.penalized_cost},
        {"cost_per_person", result.total_cost / scenario.model.n_pop},
        {"penalized_cost_per_person", result.penalized_cost / scenario.model.n_pop},
        {"cost_breakdown",
         {{"control", result.breakdown.control},
          {"hospitalization", result.breakdown.hospitalization},
          {"death", result.breakdown.death}}},
        {"end_time", result.end_time},
        {"sigma", result.sigma},
        {"constraint_violation", result.constraint_violation},
        {"steps", steps},
    };
    return j;
}

OptimizationResult result_from_json(const json& j) {
    OptimizationResult r;
    r.total_cost = j.at("total_cost");
    r.penalized_cost = j.at("penalized_cost");
    r.end_time = j.at("end_time");
    r.sigma = j.at("sigma");
    r.converged = j.at("converged");
    r.capped = j.at("capped");
    r.iterations = j.at("iterations");
    r.label = j.at("strategy");
    r.constraint_violation = j.at("constraint_violation");
    const auto& b = j.at("cost_breakdown");
    r.breakdown = {b.at("control"), b.at("hospitalization"), b.at("death")};
    const auto& steps = j.at("steps");
    const auto& t = steps.at("t");
    const auto& beta = steps.at("beta");
    r.policy.dt = t.size() > 1 ? double(t[1]) - double(t[0]) : 1.0;
    for (std::size_t n = 0; n + 1 < beta.size(); ++n)
        r.policy.beta.push_back(beta[n]);
    const auto& s = steps.at("s");
    const auto& e = steps.at("e");
    const auto& i = steps.at("i");
    const auto& h = steps.at("h");
    const auto& rr = steps.at("r");
    const auto& d = steps.at("d");
    for (std::size_t n = 0; n < s.size(); ++n)
        r.trajectory.push_back({s[n], e[n], i[n], h[n], rr[n], d[n]});
    return r;
}

json ensemble_to_json(const EnsembleStats& stats, const std::vector<SimulationRun>& runs,
                      const json& metadata) {
    json per_run = json::array();
    for (const auto& r : runs) {
        per_run.push_back({{"seed", r.seed},
                           {"realized_cost", r.realized_cost},
                           {"end_time", r.end_time},
                           {"events", r.event_count}});
    }
    return json{
        {"schema_version", kSchemaVersion},
        {"metadata", metadata},
        {"rng", rng_algorithm_id()},
        {"runs", stats.runs},
        {"cost",
         {{"mean", stats.cost_mean},
          {"stddev", stats.cost_stddev},
          {"quantiles", stats.cost_quantiles}}},
        {"end_time",
         {{"mean", stats.end_time_mean},
          {"stddev", stats.end_time_stddev},
          {"quantiles", stats.end_time_quantiles}}},
        {"per_run", per_run},
    };
}

void write_steps_csv(const std::string& path, const OptimizationResult& result,
                     const Scenario& scenario, const json& metadata) {
    auto out = open_out(path);
    out << "# " << metadata.dump() << "\n";
    out << "t,s,e,i,h,r,d,beta,r_e,cumulative_control_cost,"
           "cumulative_hospitalization_cost,cumulative_death_cost\n";
    const json j = result_to_json(result, scenario, DescentConfig{});
    const auto& steps = j.at("steps");
    const auto& t = steps.at("t");
    for (std::size_t n = 0; n < t.size(); ++n) {
        out << fmt(steps.at("t")[n]) << ',' << fmt(steps.at("s")[n]) << ','
            << fmt(steps.at("e")[n]) << ',' << fmt(steps.at("i")[n]) << ','
            << fmt(steps.at("h")[n]) << ',' << fmt(steps.at("r")[n]) << ','
            << fmt(steps.at("d")[n]) << ',' << fmt(steps.at("beta")[n]) << ','
            << fmt(steps.at("r_e")[n]) << ','
            << fmt(steps.at("cumulative_control_cost")[n]) << ','
            << fmt(steps.at("cumulative_hospitalization_cost")[n]) << ','
            << fmt(steps.at("cumulative_death_cost")[n]) << '\n';
    }
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows,
                     const json& metadata) {
    auto out = open_out(path);
    out << "# " << metadata.dump() << "\n";
    out << "axis,strategy,cost_per_person,end_time,converged,capped,label,sigma,error\n";
    for (const auto& r : rows) {
        out << fmt(r.axis_value) << ',' << r.strategy_seed << ','
            << fmt(r.cost_per_person) << ',' << fmt(r.end_time) << ','
            << (r.converged ? 1 : 0) << ',' << (r.capped ? 1 : 0) << ',' << r.label
            << ',' << fmt(r.sigma) << ',' << (r.failed ? r.error : "") << '\n';
    }
}

void write_dp_csv(const std::string& path, const DpSolution& solution,
                  const SimplifiedParams& params) {
    auto out = open_out(path);
    json menu = solution.menu.values;
    json header{
        {"schema_version", kSchemaVersion},
        {"dk", solution.dk},
        {"n_pop", solution.n_pop},
        {"menu", menu},
        {"discrete_menu", solution.menu.discrete},
        {"renormalized", solution.renormalized},
        {"bellman_residual", solution.bellman_residual},
        {"params",
         {{"lambda_tilde", params.lambda_tilde},
          {"p_h", params.p_h},
          {"p_d", params.p_d},
          {"vacc_rate", params.vacc_rate},
          {"k", params.cost.k},
          {"b", params.cost.b},
          {"c0", params.cost.c0},
          {"c1", params.cost.c1},
          {"d", params.cost.d}}},
    };
    out << "# " << header.dump() << "\n";
    const bool vacc = !solution.value_vacc.empty();
    out << (vacc ? "s_index,i_index,v,beta,v_vacc,beta_vacc\n" : "s_index,i_index,v,beta\n");
    for (int s = 0; s <= solution.n; ++s) {
        for (int i = 0; i <= solution.n - s; ++i) {
            out << s << ',' << i << ',' << fmt(solution.value_at(s, i)) << ','
                << fmt(solution.beta_at(s, i));
            if (vacc)
                out << ',' << fmt(solution.value_at(s, i, true)) << ','
                    << fmt(solution.beta_at(s, i, true));
            out << '\n';
        }
    }
}

void write_threshold_csv(const std::string& path, const ThresholdCurve& curve,
                         const json& metadata) {
    auto out = open_out(path);
    json meta = metadata;
    meta["fixed_axis"] = curve.axis == SliceAxis::fixed_s ? "s" : "i";
    meta["fixed_value"] = curve.fixed_value;
    meta["snapped"] = curve.snapped;
    json crossings = json::array();
    for (const auto& c : curve.crossings)
        crossings.push_back({{"population", c.population},
                             {"beta_from", c.beta_from},
                             {"beta_to", c.beta_to}});
    meta["crossings"] = crossings;
    out << "# " << meta.dump() << "\n";
    out << "population,beta\n";
    for (std::size_t j = 0; j < curve.population.size(); ++j)
        out << fmt(curve.population[j]) << ',' << fmt(curve.beta[j]) << '\n';
}

void write_events_csv(const std::string& path, const SimulationRun& run,
                      const json& metadata) {
    auto out = open_out(path);
    json meta = metadata;
    meta["seed"] = run.seed;
    meta["rng"] = rng_algorithm_id();
    meta["end_time"] = run.end_time;
    meta["realized_cost"] = run.realized_cost;
    out << "# " << meta.dump() << "\n";
    out << "time,kind,s,e,i,h,r,d,cumulative_cost\n";
    for (const auto& ev : run.events) {
        out << fmt(ev.time) << ',' << to_string(ev.kind) << ',' << ev.state_after.s
            << ',' << ev.state_after.e << ',' << ev.state_after.i << ','
            << ev.state_after.h << ',' << ev.state_after.r << ',' << ev.state_after.d
            << ',' << fmt(ev.cumulative_cost) << '\n';
    }
}

void write_json_file(const std::string& path, const json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}


}  // namespace seihrd
