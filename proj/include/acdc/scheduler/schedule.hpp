#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "acdc/grid/topology.hpp"
#include "acdc/scheduler/mcdm.hpp"
#include "acdc/scheduler/oracle.hpp"

namespace acdc::scheduler {

enum class Mode { exact, data_driven, day_ahead, no_mcdm };

std::string_view mode_name(Mode mode) noexcept;  // exact, data-driven, day-ahead, no-mcdm
Mode parse_mode(std::string_view name);

struct ScheduleRecord {
  std::size_t slot = 0;  // 15-min index
  Mode mode = Mode::exact;
  grid::CcrcId ccrc = 0;     // applied after this slot
  grid::CcrcId planned = 0;  // day-ahead plan entry, otherwise equal to ccrc
  bool plan_stable = true;   // exact check of the planned CCRC at both OPs
  bool verified = false;     // applied CCRC exactly stable at both OPs
  std::optional<Indicators> indicators;  // exact, at the slot OP under the applied CCRC
  int gamma = 0;                         // role changes against the previous slot
  int gamma_star = 0;                    // after relaxation
  int relaxations = 0;
  std::size_t alternatives = 0;
  std::size_t verification_calls = 0;
  double solve_ms = 0.0;   // filtering, matrix and ranking
  double verify_ms = 0.0;  // exact checks of ranked candidates
  std::string error;       // per-slot failure, schedule continues
};

struct VerifiedAssignment {
  grid::Ccrc ccrc;
  std::size_t calls = 0;
  bool fallback = false;  // every ranked candidate failed; exact filter used instead
  int gamma_star = 0;     // fallback filter only
  int relaxations = 0;
};

// Walks the ranking and returns the first candidate the exact chain finds
// stable at both OPs. When none is, the alternatives are recomputed with the
// exact oracle and ranked again with `source` (or the exact indicators when
// the source has none); throws NoStableAlternative if that set is empty too.
VerifiedAssignment verify_and_assign(const PerformanceMatrix& matrix, const Ranking& ranking,
                                     const TransitionContext& ctx, const std::vector<grid::Ccrc>& reduced,
                                     const ExactOracle& exact, const Oracle& source);

struct ScheduleConfig {
  std::vector<grid::Ccrc> reduced;
  // default: the reduced CCRC with the lowest weighted indicator sum at the
  // first OP (no-mcdm: the first stable fallback)
  std::optional<grid::CcrcId> initial;
  int gamma_star = 1;
  Weights weights = kUniformWeights;
  std::vector<grid::OperatingPoint> forecast;  // day-ahead only, same length as the actual sequence
  std::vector<grid::CcrcId> fallback_pair;     // no-mcdm only, default: fallback_pair() over the sequence
};

// Slot t moves from OP t-1 to OP t; slot 0 starts and ends at OP 0. The
// data-driven mode needs `surrogate`; the others ignore it.
std::vector<ScheduleRecord> run_schedule(const grid::GridTopology& topology,
                                         const std::vector<grid::OperatingPoint>& ops, Mode mode,
                                         const ScheduleConfig& config, const Oracle* surrogate = nullptr);

// The two reduced CCRCs stable at the largest share of `ops` (ties to lower id).
std::vector<grid::CcrcId> fallback_pair(const ExactOracle& exact, const std::vector<grid::Ccrc>& reduced,
                                        const std::vector<grid::OperatingPoint>& ops);

struct DayScenario {
  std::vector<grid::OperatingPoint> forecast, actual;
};

// 96 smooth quarter-hour OPs inside the ranges, then actual = forecast with
// multiplicative Gaussian noise (sigma 8 % on generation, 4 % on demand),
// clamped to the ranges.
inline constexpr double kGenerationNoise = 0.08;
inline constexpr double kDemandNoise = 0.04;
DayScenario day_scenario(const grid::OperatingRanges& ranges, std::size_t slots, std::uint64_t seed);

// Operating-point sequences as CSV: P_<gen>, cosphi_<gen>, demand,
// share_<load> (topology ids), one row per slot.
void write_ops_csv(const grid::GridTopology& topology, const std::vector<grid::OperatingPoint>& ops,
                   const std::filesystem::path& path);
// Throws InvalidInput on missing columns or rows outside the ranges.
std::vector<grid::OperatingPoint> read_ops_csv(const grid::GridTopology& topology, const std::filesystem::path& path);

struct Quartiles {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
  double mean = 0;
  std::size_t count = 0;
};

struct ModeSummary {
  Mode mode = Mode::exact;
  std::size_t slots = 0;
  double agreement = 0.0;    // % of slots with the same CCRC as the exact mode
  double instability = 0.0;  // % of slots with an unstable plan or an unverified assignment
  std::array<Quartiles, kCriteria> indicators;  // over verified slots only
  double mean_solve_ms = 0.0, mean_verify_ms = 0.0;
  std::size_t errors = 0;
};

struct BenchmarkReport {
  std::vector<ModeSummary> modes;
  std::optional<double> speedup;  // 1 - t_dd / t_exact over mean solve times
};

// Needs at least two modes over the same sequence, one of them exact.
BenchmarkReport compare_schedules(const std::vector<std::vector<ScheduleRecord>>& runs);

nlohmann::json report_to_json(const BenchmarkReport& report);

// schedule_<mode>.csv per run, roles_<mode>.csv (per-IPC sequences),
// timing.csv, indicator_boxplot.csv, benchmark.json and matching SVGs.
void write_schedule_outputs(const grid::GridTopology& topology,
                            const std::vector<std::vector<ScheduleRecord>>& runs, const std::filesystem::path& dir);

}  // namespace acdc::scheduler
