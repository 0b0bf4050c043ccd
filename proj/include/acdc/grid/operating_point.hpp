#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace acdc::grid {

struct GeneratorRange {
  double p_min_mw = 0.0, p_max_mw = 0.0;
  double cos_phi_min = 0.8, cos_phi_max = 0.95;
};

struct OperatingRanges {
  std::vector<GeneratorRange> generators;  // same order as topology generators
  double demand_min_mw = 0.0, demand_max_mw = 0.0;
  std::vector<double> load_base_share;  // same order as topology loads, sums to 1
  double share_band = 0.3;              // relative +/- band around the base share

  void validate() const;  // throws InvalidInput
};

struct GeneratorSetpoint {
  double p_mw = 0.0;
  double cos_phi = 1.0;  // lagging (injecting Q >= 0)
};

// One snapshot of generation and demand. IPC schedules are filled by the
// power-flow dispatch rule and are empty until then.
struct OperatingPoint {
  std::vector<GeneratorSetpoint> generators;
  double demand_mw = 0.0;
  std::vector<double> load_shares;
  std::vector<double> ipc_schedule_mw;

  double load_mw(std::size_t load) const { return load_shares.at(load) * demand_mw; }
};

// Throws InvalidInput if any value lies outside the ranges or shares do not
// sum to one within 1e-9.
void validate_operating_point(const OperatingRanges& ranges, const OperatingPoint& op);

// Maps raw shares (each inside its band) to shares that sum to one while
// staying inside the bands: the excess is removed in proportion to each
// load's remaining room, iterating until the budget is spent.
std::vector<double> project_shares(std::span<const double> raw, std::span<const double> base,
                                   double band);

nlohmann::json operating_point_to_json(const OperatingPoint& op);
OperatingPoint operating_point_from_json(const nlohmann::json& doc);

}  // namespace acdc::grid
