#ifndef SEIHRD_CTMC_HPP
#define SEIHRD_CTMC_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "seihrd/costs.hpp"
#include "seihrd/dp.hpp"
#include "seihrd/model.hpp"

namespace seihrd {

/// Integer compartment counts for the exact-jump chain.
struct IntState {
    std::int64_t s = 0, e = 0, i = 0, h = 0, r = 0, d = 0;
    std::int64_t sum() const { return s + e + i + h + r + d; }
    std::int64_t infected_mass() const { return e + i + h; }
};

enum class EventKind : std::uint8_t {
    infection,
    incubation,
    recovery_i,
    hospitalization,
    death_i,
    recovery_h,
    death_h,
    vaccination,
};

const char* to_string(EventKind kind);

struct JumpEvent {
    double time = 0.0;
    EventKind kind = EventKind::infection;
    IntState state_after;
    double cumulative_cost = 0.0;  ///< running cost accrued up to this event
};

struct SimulationRun {
    std::vector<JumpEvent> events;  ///< empty when event recording is off
    double realized_cost = 0.0;     ///< running L+F plus terminal G
    double end_time = 0.0;          ///< first time E+I+H = 0
    std::uint64_t seed = 0;
    std::int64_t event_count = 0;
    IntState final_state;
};

/// Control source for a simulation: either a constant rate or a feedback
/// table from the dynamic program (looked up as S -> susceptible axis,
/// E+I -> infected axis, nearest cell).
struct PolicySource {
    double constant_beta = 0.0;
    const DpSolution* feedback = nullptr;
    bool vacc_layer = false;

    static PolicySource constant(double beta) { return {beta, nullptr, false}; }
    static PolicySource from_dp(const DpSolution& dp, bool vacc_layer = false) {
        return {0.0, &dp, vacc_layer};
    }
    double beta_for(const IntState& state) const;
};

struct SimOptions {
    bool record_events = false;
    std::int64_t max_events = 200'000'000;
};

/// Exact-jump (event-by-event) simulation of the six-compartment chain
/// until extinction (E+I+H = 0). Exponential waiting times use the
/// inverse-CDF method on a seeded mt19937_64 stream, so runs replay
/// identically for equal seeds.
SimulationRun simulate(const IntState& initial, const PolicySource& policy,
                       const ModelParams& params, const CostParams& cost,
                       std::uint64_t seed, const SimOptions& options = {});

/// Identifier of the generator/sampling algorithm, recorded in emitted
/// metadata so runs can be compared across implementations.
std::string rng_algorithm_id();

/// Exact-jump simulation of the reduced two-variable chain (infection
/// S,I -> S-1,I+1; exit I -> I-1; vaccination S -> S-1), accruing
/// L(beta) + F(p_h I) and the terminal death cost. This is the chain the
/// dynamic program solves, at dk = 1.
struct SimplifiedRun {
    double realized_cost = 0.0;
    double end_time = 0.0;
    std::uint64_t seed = 0;
    std::int64_t event_count = 0;
    std::int64_t final_s = 0;
};

SimplifiedRun simulate_simplified(std::int64_t s0, std::int64_t i0,
                                  const PolicySource& policy,
                                  const SimplifiedParams& params, std::uint64_t seed,
                                  std::int64_t max_events = 200'000'000);

struct EnsembleStats {
    std::size_t runs = 0;
    double cost_mean = 0.0, cost_stddev = 0.0;
    double end_time_mean = 0.0, end_time_stddev = 0.0;
    std::array<double, 5> cost_quantiles{};      ///< 5%, 25%, 50%, 75%, 95%
    std::array<double, 5> end_time_quantiles{};  ///< nearest-rank
};

/// Summary statistics over an ensemble; throws std::invalid_argument on
/// empty input. A single run yields stddev 0.
EnsembleStats ensemble_stats(const std::vector<SimulationRun>& runs);

}  // namespace seihrd

#endif
