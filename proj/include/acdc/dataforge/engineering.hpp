#pragma once

#include <string>
#include <vector>

#include "acdc/dataforge/dataset.hpp"

namespace acdc::dataforge {

// Adds S = sqrt(P^2 + Q^2) for generators, loads and Thevenins, S (AC side)
// and Sdc = |Pdc| for every IPC, and dir_<id> = (P >= 0) flags for IPCs and
// Thevenins.
Dataset engineer_features(const Dataset& ds);

struct RemovedColumn {
  std::string name;
  std::string reason;   // constant | duplicate | correlated
  std::string partner;  // kept column for duplicate / correlated removals
};

struct CorrelatedPair {
  std::string a, b;
  double rho = 0.0;
  bool both_kept = false;
};

struct CleaningReport {
  std::vector<RemovedColumn> removed;
  std::vector<CorrelatedPair> flagged;
};

inline constexpr double kDefaultCorrelationThreshold = 0.95;

// Drops constant columns, exact duplicates, then resolves |rho| >= threshold
// pairs: power/power and different-node pairs are both kept, otherwise the
// column lower in the retention order (current < AC voltage < DC voltage <
// angle < flag < power) is removed. Categorical columns are never touched.
Dataset clean_features(const Dataset& ds, double corr_threshold = kDefaultCorrelationThreshold,
                       CleaningReport* report = nullptr);

// Fits z-score statistics when `stats` is null, otherwise reuses them (by
// column name). Categorical columns pass through; zero-variance columns get
// identity scaling and a warning.
Dataset scale_features(const Dataset& ds, const ScalerStats* stats = nullptr,
                       std::vector<std::string>* warnings = nullptr);
ScalerStats fit_scaler(const Dataset& ds, std::vector<std::string>* warnings = nullptr);
Eigen::MatrixXd apply_scaler(const ScalerStats& stats, const std::vector<powerflow::ColumnInfo>& columns,
                             const Eigen::MatrixXd& X);
Eigen::MatrixXd invert_scaler(const ScalerStats& stats, const std::vector<powerflow::ColumnInfo>& columns,
                              const Eigen::MatrixXd& X);

// Linear-interpolation percentile (same convention as numpy's default).
double percentile(std::vector<double> values, double p);

struct Winsorized {
  std::vector<double> values;
  double upper = 0.0;
};

// Upper-tail winsorization at percentile p in (0.5, 1).
Winsorized winsorize(const std::vector<double>& values, double p);

inline constexpr double kDefaultWinsorPercentile = 0.95;

}  // namespace acdc::dataforge
