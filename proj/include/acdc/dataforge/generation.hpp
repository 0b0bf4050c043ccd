#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "acdc/dataforge/dataset.hpp"
#include "acdc/dataforge/exact.hpp"
#include "acdc/dataforge/sampling.hpp"
#include "acdc/grid/ccrc.hpp"
#include "acdc/grid/topology.hpp"

namespace acdc::dataforge {

using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct LabeledPoint {
  grid::OperatingPoint op;
  Eigen::VectorXd unit;  // OpSpace coordinates
  RowProvenance provenance;
  ExactEvaluation exact;
};

struct EntropyOptions {
  double cell_fraction = 0.1;    // cell edge as a fraction of each range
  std::size_t neighbours = 15;
  double lhs_share = 0.5;        // budget spent on the initial LHS phase
  std::size_t candidates = 64;   // random cells scored per refinement step
};

// Binary entropy in bits; 0 at p = 0 or 1, 1 at p = 0.5.
double binary_entropy(double p) noexcept;

// Fraction of stable labels among the k labeled points nearest to `at`.
// 0.5 when there are no points.
double local_stable_fraction(const PointMatrix& points, const std::vector<bool>& stable,
                             const Eigen::Ref<const Eigen::VectorXd>& at, std::size_t k);

// LHS phase followed by entropy-guided refinement: each step scores random
// candidate cells by the entropy of the local stable fraction and samples a
// new OP inside the best one. Throws InvalidInput for budget < 2.
std::vector<LabeledPoint> entropy_guided_generate(const grid::GridTopology& topology, const grid::Ccrc& ccrc,
                                                  std::size_t budget, std::uint64_t seed,
                                                  const EntropyOptions& options = {});

// Plain LHS labeled under one CCRC; `phase` tags the provenance.
std::vector<LabeledPoint> lhs_generate(const grid::GridTopology& topology, const grid::Ccrc& ccrc, std::size_t n,
                                       std::uint64_t seed, SamplingPhase phase);

// Validation OPs come from a seed stream disjoint from every training stream.
std::uint64_t validation_seed(std::uint64_t seed) noexcept;

struct ClassBalance {
  std::size_t rows = 0, stable = 0, diverged = 0;
  double stable_fraction = 0.0;
};

// One categorical XC_<ipc> column per IPC.
std::vector<powerflow::ColumnInfo> xc_columns(const grid::GridTopology& topology);

// Pooled D_Y: features plus one categorical XC_<ipc> column per IPC (role
// code 0 = GFL, 1 = AC-GFM, 2 = DC-GFM). Diverged points are dropped.
Dataset stability_dataset(const grid::GridTopology& topology, const std::vector<LabeledPoint>& points,
                          ClassBalance* balance = nullptr);
Dataset build_stability_dataset(const grid::GridTopology& topology, const std::vector<grid::Ccrc>& ccrcs,
                                std::size_t budget_per_ccrc, std::uint64_t seed, ClassBalance* balance = nullptr);

inline constexpr std::size_t kMinIndicatorRows = 50;

// The four per-CCRC indicator datasets (H2_f, H2_Vdc, K_f, K_Vdc) from stable
// points only. Throws InsufficientData below kMinIndicatorRows.
std::vector<Dataset> indicator_datasets(const grid::GridTopology& topology, grid::CcrcId owner,
                                        const std::vector<LabeledPoint>& points);
std::vector<Dataset> build_indicator_datasets(const grid::GridTopology& topology, const grid::Ccrc& ccrc,
                                              std::size_t budget, std::uint64_t seed);

}  // namespace acdc::dataforge
