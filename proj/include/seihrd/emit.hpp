#ifndef SEIHRD_EMIT_HPP
#define SEIHRD_EMIT_HPP

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "seihrd/control.hpp"
#include "seihrd/ctmc.hpp"
#include "seihrd/dp.hpp"
#include "seihrd/scenario.hpp"
#include "seihrd/sweep.hpp"

namespace seihrd {

inline constexpr int kSchemaVersion = 1;

nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario_file(const std::string& path);

/// Full result document: header (schema_version, dt, mu, end_time_cap,
/// seed, scenario) plus per-step arrays (t, S, E, I, H, R, D, beta, R_e,
/// cumulative cost split). Numbers survive a round trip exactly.
nlohmann::json result_to_json(const OptimizationResult& result,
                              const Scenario& scenario, const DescentConfig& config,
                              std::optional<std::uint64_t> seed = std::nullopt);
OptimizationResult result_from_json(const nlohmann::json& j);

nlohmann::json ensemble_to_json(const EnsembleStats& stats,
                                const std::vector<SimulationRun>& runs,
                                const nlohmann::json& metadata);

/// CSV writers; each file starts with a single `# {json}` metadata line.
void write_steps_csv(const std::string& path, const OptimizationResult& result,
                     const Scenario& scenario, const nlohmann::json& metadata);
void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows,
                     const nlohmann::json& metadata);
void write_dp_csv(const std::string& path, const DpSolution& solution,
                  const SimplifiedParams& params);
void write_threshold_csv(const std::string& path, const ThresholdCurve& curve,
                         const nlohmann::json& metadata);
void write_events_csv(const std::string& path, const SimulationRun& run,
                      const nlohmann::json& metadata);

void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace seihrd

#endif
