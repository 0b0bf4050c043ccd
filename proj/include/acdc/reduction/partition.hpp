#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "acdc/grid/operating_point.hpp"

namespace acdc::reduction {

// Raw OP descriptors: P and cos(phi) per generator, total demand, load shares.
std::vector<std::string> op_feature_names(std::size_t generators, std::size_t loads);
Eigen::MatrixXd op_features(const std::vector<grid::OperatingPoint>& ops);
Eigen::VectorXd op_features(const grid::OperatingPoint& op);

// Centroid partition of z-scored descriptors. Cells that end up empty are
// dropped (their points already sit with the nearest centroid).
struct Subregions {
  std::vector<std::string> feature_names;
  Eigen::VectorXd mean, scale;     // z-score statistics of the partitioned points
  Eigen::MatrixXd centroids;       // cells x features, standardized
  std::vector<int> assignment;     // cell per input point
  std::size_t merged = 0;          // empty cells removed

  std::size_t size() const noexcept { return static_cast<std::size_t>(centroids.rows()); }
  // Nearest-centroid rule on raw descriptors.
  int assign(const Eigen::Ref<const Eigen::VectorXd>& raw) const;
  int assign(const grid::OperatingPoint& op) const { return assign(op_features(op)); }
  Eigen::MatrixXd raw_centroids() const;
};

// k-means (k-means++ seeding, Lloyd iterations) on the rows of F.
Subregions partition_points(const Eigen::MatrixXd& F, std::vector<std::string> names, std::size_t n_regions,
                            std::uint64_t seed);
Subregions partition_operating_space(const std::vector<grid::OperatingPoint>& ops, std::size_t n_regions,
                                     std::uint64_t seed);

inline constexpr std::size_t kDefaultRegions = 20;

}  // namespace acdc::reduction
