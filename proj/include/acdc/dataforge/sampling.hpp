#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "acdc/grid/operating_point.hpp"

namespace acdc::dataforge {

// Unit-cube parameterization of the operating space. Coordinates, in order:
// P and cos(phi) of every generator, total demand, then one share coordinate
// per load (0 = bottom of its band, 1 = top). Shares are projected so they
// sum to one, so the load coordinates are not exactly invertible.
class OpSpace {
 public:
  explicit OpSpace(grid::OperatingRanges ranges);

  std::size_t dimension() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const grid::OperatingRanges& ranges() const noexcept { return ranges_; }

  grid::OperatingPoint to_op(const Eigen::Ref<const Eigen::VectorXd>& u) const;
  Eigen::VectorXd to_unit(const grid::OperatingPoint& op) const;
  // Indices of dimensions whose range is a single value.
  std::vector<std::size_t> degenerate_dimensions() const;

 private:
  grid::OperatingRanges ranges_;
  std::vector<std::string> names_;
};

// n x d Latin hypercube on [0, 1)^d: each column holds exactly one sample in
// every stratum [k/n, (k+1)/n).
Eigen::MatrixXd lhs_unit(std::size_t n, std::size_t d, std::uint64_t seed);

struct LhsSample {
  std::vector<grid::OperatingPoint> points;
  Eigen::MatrixXd unit;  // n x d coordinates the points were built from
  std::vector<std::string> warnings;
};

// Throws InvalidInput for n == 0. Degenerate ranges (min == max) hold the
// dimension constant and record a warning.
LhsSample lhs_sample(const grid::OperatingRanges& ranges, std::size_t n, std::uint64_t seed);

}  // namespace acdc::dataforge
