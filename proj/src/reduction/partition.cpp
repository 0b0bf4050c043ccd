#include "acdc/reduction/partition.hpp"

#include <limits>

#include <spdlog/spdlog.h>

#include "acdc/common/error.hpp"
#include "acdc/common/rng.hpp"
#include "acdc/simd/kernels.hpp"

namespace acdc::reduction {

namespace {

std::span<const double> row(const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& M,
                            Eigen::Index i) {
  return {M.data() + i * M.cols(), static_cast<std::size_t>(M.cols())};
}

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

int nearest(const RowMatrix& C, std::span<const double> x) {
  int best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < C.rows(); ++c) {
    const double d = simd::squared_l2(row(C, c), x);
    if (d < bd) {
      bd = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

}  // namespace

std::vector<std::string> op_feature_names(std::size_t generators, std::size_t loads) {
  std::vector<std::string> n;
  for (std::size_t g = 0; g < generators; ++g) n.push_back("gen" + std::to_string(g) + "_P");
  for (std::size_t g = 0; g < generators; ++g) n.push_back("gen" + std::to_string(g) + "_cosphi");
  n.push_back("demand");
  for (std::size_t l = 0; l < loads; ++l) n.push_back("load" + std::to_string(l) + "_share");
  return n;
}

Eigen::VectorXd op_features(const grid::OperatingPoint& op) {
  const auto G = op.generators.size(), L = op.load_shares.size();
  Eigen::VectorXd f(static_cast<Eigen::Index>(2 * G + 1 + L));
  for (std::size_t g = 0; g < G; ++g) {
    f(static_cast<Eigen::Index>(g)) = op.generators[g].p_mw;
    f(static_cast<Eigen::Index>(G + g)) = op.generators[g].cos_phi;
  }
  f(static_cast<Eigen::Index>(2 * G)) = op.demand_mw;
  for (std::size_t l = 0; l < L; ++l) f(static_cast<Eigen::Index>(2 * G + 1 + l)) = op.load_shares[l];
  return f;
}

Eigen::MatrixXd op_features(const std::vector<grid::OperatingPoint>& ops) {
  if (ops.empty()) return {};
  Eigen::MatrixXd F(static_cast<Eigen::Index>(ops.size()), op_features(ops[0]).size());
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const auto f = op_features(ops[i]);
    if (f.size() != F.cols()) throw InvalidInput("op_features: operating points of different shapes");
    F.row(static_cast<Eigen::Index>(i)) = f.transpose();
  }
  return F;
}

int Subregions::assign(const Eigen::Ref<const Eigen::VectorXd>& raw) const {
  if (raw.size() != mean.size()) throw InvalidInput("Subregions::assign: descriptor width mismatch");
  const Eigen::VectorXd z = (raw - mean).cwiseQuotient(scale);
  const RowMatrix C = centroids;
  return nearest(C, {z.data(), static_cast<std::size_t>(z.size())});
}

Eigen::MatrixXd Subregions::raw_centroids() const {
  return (centroids.array().rowwise() * scale.transpose().array()).rowwise() + mean.transpose().array();
}

Subregions partition_points(const Eigen::MatrixXd& F, std::vector<std::string> names, std::size_t n_regions,
                            std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(F.rows());
  if (n_regions == 0) throw InvalidInput("partition: n_regions must be >= 1");
  if (n < n_regions) throw InvalidInput("partition: fewer points than regions");
  if (!names.empty() && names.size() != static_cast<std::size_t>(F.cols()))
    throw InvalidInput("partition: feature name count mismatch");
  Subregions s;
  s.feature_names = std::move(names);
  s.mean = F.colwise().mean().transpose();
  s.scale.resize(F.cols());
  for (Eigen::Index j = 0; j < F.cols(); ++j) {
    const double sd = std::sqrt((F.col(j).array() - s.mean(j)).square().mean());
    s.scale(j) = sd > 1e-12 * std::max(1.0, std::abs(s.mean(j))) ? sd : 1.0;
  }
  const RowMatrix Z = (F.rowwise() - s.mean.transpose()).array().rowwise() / s.scale.transpose().array();
  const auto k = static_cast<Eigen::Index>(n_regions);

  // k-means++ seeding
  Rng rng(seed);
  RowMatrix C(k, Z.cols());
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::size_t first = rng() % n;
  C.row(0) = Z.row(static_cast<Eigen::Index>(first));
  for (Eigen::Index c = 1; c < k; ++c) {
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], simd::squared_l2(row(C, c - 1), row(Z, static_cast<Eigen::Index>(i))));
      total += d2[i];
    }
    std::size_t pick = 0;
    if (total > 0) {
      double u = std::uniform_real_distribution<double>(0.0, total)(rng);
      for (pick = 0; pick + 1 < n; ++pick) {
        u -= d2[pick];
        if (u < 0) break;
      }
    } else {
      pick = rng() % n;
    }
    C.row(c) = Z.row(static_cast<Eigen::Index>(pick));
  }

  std::vector<int> a(n, -1);
  for (int it = 0; it < 300; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const int c = nearest(C, row(Z, static_cast<Eigen::Index>(i)));
      changed |= c != a[i];
      a[i] = c;
    }
    if (!changed) break;
    RowMatrix sum = RowMatrix::Zero(k, Z.cols());
    std::vector<int> cnt(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < n; ++i) {
      sum.row(a[i]) += Z.row(static_cast<Eigen::Index>(i));
      ++cnt[static_cast<std::size_t>(a[i])];
    }
    for (Eigen::Index c = 0; c < k; ++c)
      if (cnt[static_cast<std::size_t>(c)] > 0) C.row(c) = sum.row(c) / cnt[static_cast<std::size_t>(c)];
  }

  std::vector<int> cnt(static_cast<std::size_t>(k), 0);
  for (int c : a) ++cnt[static_cast<std::size_t>(c)];
  std::vector<Eigen::Index> keep;
  for (Eigen::Index c = 0; c < k; ++c)
    if (cnt[static_cast<std::size_t>(c)] > 0) keep.push_back(c);
  s.merged = static_cast<std::size_t>(k) - keep.size();
  if (s.merged > 0) spdlog::warn("partition: {} empty cells merged into their nearest neighbours", s.merged);
  RowMatrix kept(static_cast<Eigen::Index>(keep.size()), Z.cols());
  for (std::size_t c = 0; c < keep.size(); ++c) kept.row(static_cast<Eigen::Index>(c)) = C.row(keep[c]);
  s.centroids = kept;
  s.assignment.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.assignment[i] = nearest(kept, row(Z, static_cast<Eigen::Index>(i)));
  return s;
}

Subregions partition_operating_space(const std::vector<grid::OperatingPoint>& ops, std::size_t n_regions,
                                     std::uint64_t seed) {
  if (ops.empty()) throw InvalidInput("partition: no operating points");
  return partition_points(op_features(ops),
                          op_feature_names(ops[0].generators.size(), ops[0].load_shares.size()), n_regions, seed);
}

}  // namespace acdc::reduction
