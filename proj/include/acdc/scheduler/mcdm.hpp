#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "acdc/grid/ccrc.hpp"
#include "acdc/grid/operating_point.hpp"
#include "acdc/scheduler/oracle.hpp"

namespace acdc::scheduler {

using Weights = std::array<double, kCriteria>;
inline constexpr Weights kUniformWeights = {0.25, 0.25, 0.25, 0.25};

// Transition from the current OP (•) under its applied CCRC to the next OP (∘).
struct TransitionContext {
  grid::OperatingPoint current_op, next_op;
  grid::Ccrc current;
  std::optional<Indicators> current_indicators;  // exact, only when stable at •
  int gamma_star = 1;
  Weights weights = kUniformWeights;

  // Throws InvalidInput: current not in the reduced set, negative weights or
  // gamma_star, or an all-zero weight vector.
  void validate(const std::vector<grid::CcrcId>& reduced) const;
};

struct Alternatives {
  std::vector<grid::Ccrc> ccrcs;  // reduced-set order
  int gamma_star = 0;             // after relaxation
  int relaxations = 0;
};

// Keeps members of `reduced` that the oracle deems stable at both OPs and
// that differ from the current CCRC in at most gamma_star roles. An empty set
// relaxes gamma_star by one until something qualifies; throws
// NoStableAlternative once gamma_star reaches the IPC count.
Alternatives compute_alternatives(const TransitionContext& ctx, const std::vector<grid::Ccrc>& reduced,
                                  const Oracle& stability);

struct PerformanceMatrix {
  std::vector<grid::Ccrc> alternatives;
  Eigen::Matrix<double, Eigen::Dynamic, kCriteria> rho;  // indicator at ∘ minus exact indicator at •
  Weights weights = kUniformWeights;

  std::size_t rows() const noexcept { return alternatives.size(); }
};

// Rows whose indicators the source cannot provide are dropped with a warning.
// Throws InvalidInput when the context has no current indicators.
PerformanceMatrix performance_matrix(const TransitionContext& ctx, const std::vector<grid::Ccrc>& alternatives,
                                     const Oracle& source);

struct Ranking {
  std::vector<std::size_t> order;  // matrix rows, best first
  std::vector<double> score;       // weighted sum per matrix row
  std::size_t best() const { return order.front(); }
};

// Ascending weighted sum; ties go to the smaller distance from `current`,
// then to the lower CCRC id. Throws InvalidInput on an empty matrix.
Ranking solve(const PerformanceMatrix& matrix, const grid::Ccrc& current);

}  // namespace acdc::scheduler
