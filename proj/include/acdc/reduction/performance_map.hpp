#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "acdc/dataforge/dataset.hpp"
#include "acdc/grid/ccrc.hpp"
#include "acdc/grid/topology.hpp"
#include "acdc/reduction/partition.hpp"

namespace acdc::reduction {

using dataforge::DatasetRole;

// One exact evaluation; values follow dataforge::kIndicatorRoles and are NaN
// when the point is unstable or has no power-flow solution.
struct IndicatorSample {
  grid::CcrcId ccrc = 0;
  std::size_t op = 0;
  bool stable = false;
  std::array<double, 4> values{};
};

struct IndicatorTable {
  std::vector<grid::OperatingPoint> ops;
  std::vector<grid::CcrcId> ccrcs;
  std::vector<IndicatorSample> samples;  // ccrc-major, ops inner
};

std::size_t indicator_index(DatasetRole role);

// Exact pipeline on every (ccrc, op) pair. Points without a power-flow
// solution count as unstable.
IndicatorTable build_indicator_table(const grid::GridTopology& topology, const std::vector<grid::Ccrc>& ccrcs,
                                     const std::vector<grid::OperatingPoint>& ops);
void save_indicator_table(const IndicatorTable& table, const std::filesystem::path& dir);
IndicatorTable load_indicator_table(const std::filesystem::path& dir);

// Level 1..4 = global quartile of the cell's mean indicator over stable
// samples (1 best); level 5 = unstable for a strict majority of the cell.
struct PerformanceMap {
  DatasetRole indicator = DatasetRole::h2_f;
  std::vector<grid::CcrcId> ccrcs;
  Eigen::MatrixXi level;   // ccrcs x regions
  Eigen::MatrixXd value;   // cell mean over stable samples, NaN for level 5
  std::array<double, 3> quartiles{};

  std::size_t rows() const noexcept { return ccrcs.size(); }
  std::size_t regions() const noexcept { return static_cast<std::size_t>(level.cols()); }
  double row_mean(std::size_t r) const;
  double column_mean(std::size_t c) const;
  std::size_t row_of(grid::CcrcId id) const;  // throws InvalidInput
};

int quartile_level(double value, const std::array<double, 3>& q);

// Throws IncompleteMap when a (ccrc, region) cell has no sample.
PerformanceMap build_performance_map(const IndicatorTable& table, const Subregions& regions, DatasetRole indicator);

// Rows from worst to best mean level; columns best mean level first. Ties keep
// the original order.
std::vector<std::size_t> row_order(const PerformanceMap& map);
std::vector<std::size_t> column_order(const PerformanceMap& map);

PerformanceMap restrict_rows(const PerformanceMap& map, const std::vector<grid::CcrcId>& keep);

}  // namespace acdc::reduction
