#include "acdc/dataforge/sampling.hpp"

#include <algorithm>
#include <random>

#include "acdc/common/error.hpp"
#include "acdc/common/rng.hpp"

namespace acdc::dataforge {

OpSpace::OpSpace(grid::OperatingRanges ranges) : ranges_(std::move(ranges)) {
  const auto& r = ranges_;
  for (std::size_t i = 0; i < r.generators.size(); ++i) {
    const auto& g = r.generators[i];
    if (g.p_min_mw > g.p_max_mw || g.cos_phi_min > g.cos_phi_max)
      throw InvalidInput("generator range " + std::to_string(i) + " is inverted");
    names_.push_back("gen" + std::to_string(i) + "_P");
    names_.push_back("gen" + std::to_string(i) + "_cosphi");
  }
  if (r.demand_min_mw > r.demand_max_mw) throw InvalidInput("demand range is inverted");
  names_.push_back("demand");
  if (r.load_base_share.empty()) throw InvalidInput("operating ranges list no loads");
  for (std::size_t i = 0; i < r.load_base_share.size(); ++i) names_.push_back("load" + std::to_string(i) + "_share");
}

grid::OperatingPoint OpSpace::to_op(const Eigen::Ref<const Eigen::VectorXd>& u) const {
  if (static_cast<std::size_t>(u.size()) != dimension()) throw InvalidInput("unit point has the wrong dimension");
  const auto& r = ranges_;
  auto lerp = [](double a, double b, double t) { return a + std::clamp(t, 0.0, 1.0) * (b - a); };
  grid::OperatingPoint op;
  Eigen::Index k = 0;
  for (const auto& g : r.generators) {
    const double p = lerp(g.p_min_mw, g.p_max_mw, u(k++));
    const double c = lerp(g.cos_phi_min, g.cos_phi_max, u(k++));
    op.generators.push_back({p, c});
  }
  op.demand_mw = lerp(r.demand_min_mw, r.demand_max_mw, u(k++));
  std::vector<double> raw;
  for (double base : r.load_base_share) raw.push_back(base * (1.0 + r.share_band * (2.0 * std::clamp(u(k++), 0.0, 1.0) - 1.0)));
  op.load_shares = grid::project_shares(raw, r.load_base_share, r.share_band);
  return op;
}

Eigen::VectorXd OpSpace::to_unit(const grid::OperatingPoint& op) const {
  const auto& r = ranges_;
  if (op.generators.size() != r.generators.size() || op.load_shares.size() != r.load_base_share.size())
    throw InvalidInput("operating point does not match the ranges");
  auto inv = [](double a, double b, double v) { return b > a ? (v - a) / (b - a) : 0.5; };
  Eigen::VectorXd u(static_cast<Eigen::Index>(dimension()));
  Eigen::Index k = 0;
  for (std::size_t i = 0; i < r.generators.size(); ++i) {
    u(k++) = inv(r.generators[i].p_min_mw, r.generators[i].p_max_mw, op.generators[i].p_mw);
    u(k++) = inv(r.generators[i].cos_phi_min, r.generators[i].cos_phi_max, op.generators[i].cos_phi);
  }
  u(k++) = inv(r.demand_min_mw, r.demand_max_mw, op.demand_mw);
  for (std::size_t i = 0; i < r.load_base_share.size(); ++i) {
    const double base = r.load_base_share[i];
    u(k++) = r.share_band > 0.0 ? 0.5 * (op.load_shares[i] / base - 1.0) / r.share_band + 0.5 : 0.5;
  }
  return u;
}

std::vector<std::size_t> OpSpace::degenerate_dimensions() const {
  std::vector<std::size_t> out;
  const auto& r = ranges_;
  std::size_t k = 0;
  for (const auto& g : r.generators) {
    if (g.p_min_mw == g.p_max_mw) out.push_back(k);
    if (g.cos_phi_min == g.cos_phi_max) out.push_back(k + 1);
    k += 2;
  }
  if (r.demand_min_mw == r.demand_max_mw) out.push_back(k);
  ++k;
  if (r.share_band == 0.0)
    for (std::size_t i = 0; i < r.load_base_share.size(); ++i) out.push_back(k + i);
  return out;
}

Eigen::MatrixXd lhs_unit(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (n == 0) throw InvalidInput("LHS needs at least one sample");
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  std::vector<std::size_t> perm(n);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng() % (i + 1)]);
    for (std::size_t i = 0; i < n; ++i) {
      double v = (static_cast<double>(perm[i]) + u(rng)) / static_cast<double>(n);
      // guard against rounding up to the next stratum
      v = std::min(v, std::nextafter((static_cast<double>(perm[i]) + 1.0) / static_cast<double>(n), 0.0));
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  return out;
}

LhsSample lhs_sample(const grid::OperatingRanges& ranges, std::size_t n, std::uint64_t seed) {
  const OpSpace space(ranges);
  LhsSample s;
  s.unit = lhs_unit(n, space.dimension(), seed);
  for (auto k : space.degenerate_dimensions())
    s.warnings.push_back("dimension " + space.names()[k] + " has an empty range and is held constant");
  s.points.reserve(n);
  for (Eigen::Index i = 0; i < s.unit.rows(); ++i) s.points.push_back(space.to_op(s.unit.row(i).transpose()));
  return s;
}

}  // namespace acdc::dataforge
