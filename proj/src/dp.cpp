#include "seihrd/dp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace seihrd {

namespace {

constexpr double kEulerMascheroni = 0.5772156649015328606;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

void SimplifiedParams::validate() const {
    if (!(lambda_tilde > 0.0)) throw std::domain_error("lambda_tilde must be > 0");
    if (!(p_h >= 0.0 && p_h <= 1.0)) throw std::domain_error("p_h must lie in [0,1]");
    if (!(p_d >= 0.0 && p_d <= 1.0)) throw std::domain_error("p_d must lie in [0,1]");
    if (!(n_pop > 0.0)) throw std::domain_error("n_pop must be > 0");
    if (!(vacc_rate >= 0.0)) throw std::domain_error("vacc_rate must be >= 0");
    cost.validate();
}

SimplifiedParams reduce_parameters(const ModelParams& full, const CostParams& cost) {
    full.validate();
    const double hospital_exit = full.gamma1 + full.delta1;
    if (!(hospital_exit > 0.0))
        throw std::domain_error("gamma1 + delta1 must be > 0 for the reduction");

    SimplifiedParams p;
    p.lambda_tilde = full.infectious_exit_rate();
    p.p_h = full.lambda0 / hospital_exit;
    p.p_d = (full.delta0 + full.lambda0 * full.delta1 / hospital_exit) / p.lambda_tilde;
    p.n_pop = full.n_pop;
    p.vacc_rate = full.vacc_rate;
    p.cost = cost;
    return p;
}

double harmonic_number(std::int64_t k) {
    if (k <= 0) return 0.0;
    if (k <= 10'000) {
        double sum = 0.0;
        for (std::int64_t j = k; j >= 1; --j) sum += 1.0 / static_cast<double>(j);
        return sum;
    }
    const double kd = static_cast<double>(k);
    return std::log(kd) + kEulerMascheroni + 1.0 / (2.0 * kd) - 1.0 / (12.0 * kd * kd);
}

double renormalized_exit_rate(std::int64_t i_index, std::int64_t dk,
                              double lambda_tilde) {
    if (i_index < 1 || dk < 1) throw std::domain_error("i_index and dk must be >= 1");
    const double infected = static_cast<double>(i_index) * static_cast<double>(dk);
    // dk = 1 must reproduce the exact chain rate bit-for-bit.
    if (dk == 1) return lambda_tilde * infected;
    const double segment =
        harmonic_number(i_index * dk) - harmonic_number((i_index - 1) * dk);
    return lambda_tilde / segment;
}

BetaMenu BetaMenu::continuous(double b) {
    BetaMenu menu;
    menu.discrete = false;
    const int count = static_cast<int>(std::floor(b * 100.0 + 1e-9));
    for (int j = 1; j <= count; ++j) menu.values.push_back(j / 100.0);
    if (menu.values.empty() || menu.values.back() < b) menu.values.push_back(b);
    return menu;
}

BetaMenu BetaMenu::discrete_levels(double lambda_tilde, double b) {
    BetaMenu menu;
    menu.discrete = true;
    for (double r0 : {0.5, 1.0, 2.0, 4.0})
        menu.values.push_back(std::min(r0 * lambda_tilde, b));
    return menu;
}

double DpSolution::value_at(int s_idx, int i_idx, bool vacc_layer) const {
    const auto& layer = vacc_layer ? value_vacc : value;
    if (!in_triangle(s_idx, i_idx) || layer.empty()) return kNaN;
    return layer[index(s_idx, i_idx)];
}

double DpSolution::beta_at(int s_idx, int i_idx, bool vacc_layer) const {
    const auto& layer = vacc_layer ? beta_vacc : beta;
    if (!in_triangle(s_idx, i_idx) || layer.empty()) return kNaN;
    return layer[index(s_idx, i_idx)];
}

double DpSolution::policy_lookup(double s_persons, double i_persons,
                                 bool vacc_layer) const {
    const double dkd = static_cast<double>(dk);
    int s_idx = static_cast<int>(std::lround(s_persons / dkd));
    int i_idx = static_cast<int>(std::lround(i_persons / dkd));
    if (i_persons > 0.0 && i_idx < 1) i_idx = 1;
    s_idx = std::clamp(s_idx, 0, n);
    i_idx = std::clamp(i_idx, 0, n);
    if (s_idx + i_idx > n) s_idx = n - i_idx;
    return beta_at(s_idx, i_idx, vacc_layer);
}

namespace {

// One layer of the Bellman solve. The recursion at cell (s,i):
//   0 = max_beta { r_inf(beta) (V(s-1,i+1) - V) + r_exit (V(s,i-1) - V)
//                  + r_vacc (V(s-1,i) - V) - L(beta) - F(p_h I) }
// with all rates expressed per lattice jump (dk persons at a time), so
//   V = max_beta [ r_inf V(s-1,i+1) + r_exit V(s,i-1) + r_vacc V(s-1,i)
//                  - L - F ] / (r_inf + r_exit + r_vacc).
// Sweeping S ascending then I ascending makes every referenced neighbor
// final before it is read, so a single pass solves the fixed point.
void solve_layer(const SimplifiedParams& params, const BetaMenu& menu,
                 std::int64_t dk, int n, bool renormalize, bool with_vacc,
                 std::vector<double>& value, std::vector<double>& beta_out,
                 double& residual) {
    const double n_pop = params.n_pop;
    const double dkd = static_cast<double>(dk);
    const auto idx = [n](int s, int i) {
        return static_cast<std::size_t>(s) * (n + 1) + i;
    };

    value.assign(static_cast<std::size_t>(n + 1) * (n + 1), kNaN);
    beta_out.assign(static_cast<std::size_t>(n + 1) * (n + 1), kNaN);

    // Absorbing boundary: with no infected left, the chain is dead and the
    // only remaining cost is the deaths among the removed.
    for (int s = 0; s <= n; ++s) {
        const double removed = n_pop - static_cast<double>(s) * dkd;
        value[idx(s, 0)] = -death_cost(params.p_d * removed, params.cost);
        beta_out[idx(s, 0)] = params.cost.b;
    }

    std::vector<double> exit_rate(n + 1, 0.0);
    for (int i = 1; i <= n; ++i) {
        // Unrenormalized lattice jump: per-person rate lambda*I over dk
        // persons per jump, i.e. lambda * i exactly.
        exit_rate[i] = renormalize
                           ? renormalized_exit_rate(i, dk, params.lambda_tilde)
                           : params.lambda_tilde * static_cast<double>(i);
    }

    residual = 0.0;
    for (int s = 0; s <= n; ++s) {
        const double susceptible = static_cast<double>(s) * dkd;
        const double vacc_jump_rate =
            (with_vacc && s >= 1) ? params.vacc_rate * n_pop / dkd : 0.0;
        for (int i = 1; i <= n - s; ++i) {
            const double infected = static_cast<double>(i) * dkd;
            const double running_f =
                hospitalization_cost(params.p_h * infected, params.cost, n_pop);
            const double v_exit = value[idx(s, i - 1)];
            const double v_inf = s >= 1 ? value[idx(s - 1, i + 1)] : 0.0;
            const double v_vacc = s >= 1 ? value[idx(s - 1, i)] : 0.0;
            const double inf_rate_scale =
                s >= 1 ? susceptible * infected / (n_pop * dkd) : 0.0;

            double best = -std::numeric_limits<double>::infinity();
            double best_beta = params.cost.b;
            for (double b : menu.values) {
                const double r_inf = b * inf_rate_scale;
                const double total_rate = r_inf + exit_rate[i] + vacc_jump_rate;
                const double numer = r_inf * v_inf + exit_rate[i] * v_exit +
                                     vacc_jump_rate * v_vacc -
                                     control_cost(b, params.cost, n_pop) - running_f;
                const double candidate = numer / total_rate;
                if (candidate > best) {
                    best = candidate;
                    best_beta = b;
                }
            }
            if (!std::isfinite(best))
                throw std::runtime_error("Bellman update not finite at cell (" +
                                         std::to_string(s) + ", " + std::to_string(i) +
                                         ")");
            value[idx(s, i)] = best;
            beta_out[idx(s, i)] = best_beta;

            // Residual of the solved cell, relative to its rate scale.
            double max_term = 0.0, scale = 1.0;
            for (double b : menu.values) {
                const double r_inf = b * inf_rate_scale;
                const double term = r_inf * (v_inf - best) +
                                    exit_rate[i] * (v_exit - best) +
                                    vacc_jump_rate * (v_vacc - best) -
                                    control_cost(b, params.cost, n_pop) - running_f;
                max_term = std::max(max_term, term);
                scale = std::max(scale, std::abs(r_inf * v_inf) +
                                            std::abs(exit_rate[i] * v_exit) +
                                            std::abs(vacc_jump_rate * v_vacc));
            }
            residual = std::max(residual, std::abs(max_term) / scale);
        }
    }
}

}  // namespace

DpSolution solve_bellman(const SimplifiedParams& params, const BetaMenu& menu,
                         const GridConfig& grid) {
    params.validate();
    if (menu.values.empty()) throw std::invalid_argument("menu must be non-empty");

    DpSolution sol;
    sol.menu = menu;
    sol.n_pop = params.n_pop;
    sol.renormalized = grid.renormalize;
    sol.dk = grid.dk;
    if (sol.dk <= 0) {
        // Exact lattice up to 1e5 persons; one part in a thousand above
        // (a dk-1 grid between 1e5 and 1e6 would need ~1e12 cells).
        sol.dk = params.n_pop > 1e5
                     ? std::max<std::int64_t>(
                           1, static_cast<std::int64_t>(std::llround(0.001 * params.n_pop)))
                     : 1;
    }
    sol.n = static_cast<int>(std::llround(params.n_pop / static_cast<double>(sol.dk)));

    double residual = 0.0;
    if (params.vacc_rate > 0.0) {
        solve_layer(params, menu, sol.dk, sol.n, grid.renormalize, true, sol.value_vacc,
                    sol.beta_vacc, residual);
        sol.bellman_residual = residual;
    }
    solve_layer(params, menu, sol.dk, sol.n, grid.renormalize, false, sol.value,
                sol.beta, residual);
    sol.bellman_residual = std::max(sol.bellman_residual, residual);
    return sol;
}

ThresholdCurve switching_thresholds(const DpSolution& solution, SliceAxis axis,
                                    double fixed_value, bool vacc_layer) {
    const auto& layer = vacc_layer ? solution.beta_vacc : solution.beta;
    if (layer.empty()) throw std::invalid_argument("requested policy layer is empty");

    ThresholdCurve curve;
    curve.axis = axis;
    const double dkd = static_cast<double>(solution.dk);
    int fixed_idx = static_cast<int>(std::lround(fixed_value / dkd));
    fixed_idx = std::clamp(fixed_idx, 0, solution.n);
    curve.snapped = std::abs(fixed_idx * dkd - fixed_value) > 1e-9 * solution.n_pop;
    curve.fixed_value = fixed_idx * dkd;

    const int free_max = solution.n - fixed_idx;
    for (int j = 0; j <= free_max; ++j) {
        const int s_idx = axis == SliceAxis::fixed_s ? fixed_idx : j;
        const int i_idx = axis == SliceAxis::fixed_s ? j : fixed_idx;
        const double b = solution.beta_at(s_idx, i_idx, vacc_layer);
        curve.population.push_back(j * dkd);
        curve.beta.push_back(b);
        if (j > 0 && std::isfinite(b) && std::isfinite(curve.beta[j - 1]) &&
            b != curve.beta[j - 1]) {
            curve.crossings.push_back({j * dkd, curve.beta[j - 1], b});
        }
    }
    return curve;
}

}  // namespace seihrd
