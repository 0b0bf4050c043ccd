#include "acdc/scheduler/mcdm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <spdlog/spdlog.h>

#include "acdc/common/error.hpp"
#include "acdc/common/parallel.hpp"

namespace acdc::scheduler {

void TransitionContext::validate(const std::vector<grid::CcrcId>& reduced) const {
  if (std::find(reduced.begin(), reduced.end(), current.id()) == reduced.end())
    throw InvalidInput("transition: current CCRC " + std::to_string(current.id()) + " is not in the reduced set");
  if (gamma_star < 0) throw InvalidInput("transition: gamma* must be >= 0");
  double total = 0;
  for (double w : weights) {
    if (!(w >= 0) || !std::isfinite(w)) throw InvalidInput("transition: weights must be finite and >= 0");
    total += w;
  }
  if (total <= 0) throw InvalidInput("transition: all weights are zero");
}

Alternatives compute_alternatives(const TransitionContext& ctx, const std::vector<grid::Ccrc>& reduced,
                                  const Oracle& stability) {
  const auto n = reduced.size();
  std::vector<char> ok(n, 0);
  std::vector<int> dist(n);
  parallel_for(n, [&](std::size_t i) {
    dist[i] = grid::ccr_distance(reduced[i], ctx.current);
    const auto here = stability.stable(ctx.current_op, reduced[i]);
    if (!here || !*here) return;
    const auto next = stability.stable(ctx.next_op, reduced[i]);
    ok[i] = next && *next;
  });
  Alternatives a;
  const int limit = static_cast<int>(ctx.current.size());
  for (a.gamma_star = std::max(0, ctx.gamma_star);; ++a.gamma_star) {
    for (std::size_t i = 0; i < n; ++i)
      if (ok[i] && dist[i] <= a.gamma_star) a.ccrcs.push_back(reduced[i]);
    if (!a.ccrcs.empty()) return a;
    if (a.gamma_star >= limit) break;
    ++a.relaxations;
  }
  throw NoStableAlternative("no reduced CCRC is stable at both operating points");
}

PerformanceMatrix performance_matrix(const TransitionContext& ctx, const std::vector<grid::Ccrc>& alternatives,
                                     const Oracle& source) {
  if (!ctx.current_indicators) throw InvalidInput("performance matrix: no exact indicators at the current OP");
  std::vector<std::optional<Indicators>> at(alternatives.size());
  parallel_for(alternatives.size(), [&](std::size_t i) { at[i] = source.indicators(ctx.next_op, alternatives[i]); });
  PerformanceMatrix m;
  m.weights = ctx.weights;
  std::vector<Indicators> rows;
  for (std::size_t i = 0; i < alternatives.size(); ++i) {
    bool finite = at[i].has_value();
    if (finite)
      for (double v : *at[i]) finite = finite && std::isfinite(v);
    if (!finite) {
      spdlog::warn("performance matrix: no indicators for CCRC {}, alternative dropped", alternatives[i].id());
      continue;
    }
    m.alternatives.push_back(alternatives[i]);
    rows.push_back(*at[i]);
  }
  m.rho.resize(static_cast<Eigen::Index>(rows.size()), kCriteria);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < kCriteria; ++j)
      m.rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j] - (*ctx.current_indicators)[j];
  return m;
}

Ranking solve(const PerformanceMatrix& matrix, const grid::Ccrc& current) {
  if (matrix.rows() == 0) throw InvalidInput("solve: empty performance matrix");
  Ranking r;
  const Eigen::Map<const Eigen::Matrix<double, kCriteria, 1>> w(matrix.weights.data());
  r.score.resize(matrix.rows());
  for (std::size_t i = 0; i < matrix.rows(); ++i) r.score[i] = matrix.rho.row(static_cast<Eigen::Index>(i)).dot(w);
  r.order.resize(matrix.rows());
  std::iota(r.order.begin(), r.order.end(), std::size_t{0});
  std::vector<int> gamma(matrix.rows());
  for (std::size_t i = 0; i < matrix.rows(); ++i) gamma[i] = grid::ccr_distance(matrix.alternatives[i], current);
  std::sort(r.order.begin(), r.order.end(), [&](std::size_t a, std::size_t b) {
    if (r.score[a] != r.score[b]) return r.score[a] < r.score[b];
    if (gamma[a] != gamma[b]) return gamma[a] < gamma[b];
    return matrix.alternatives[a].id() < matrix.alternatives[b].id();
  });
  return r;
}

}  // namespace acdc::scheduler
