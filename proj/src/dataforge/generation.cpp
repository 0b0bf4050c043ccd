#include "acdc/dataforge/generation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "acdc/common/error.hpp"
#include "acdc/common/parallel.hpp"
#include "acdc/common/rng.hpp"
#include "acdc/powerflow/features.hpp"
#include "acdc/simd/kernels.hpp"

namespace acdc::dataforge {

double binary_entropy(double p) noexcept {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -(p * std::log2(p) + (1.0 - p) * std::log2(1.0 - p));
}

double local_stable_fraction(const PointMatrix& points, const std::vector<bool>& stable,
                             const Eigen::Ref<const Eigen::VectorXd>& at, std::size_t k) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (stable.size() != n) throw InvalidInput("label count does not match point count");
  if (n == 0 || k == 0) return 0.5;
  if (at.size() != points.cols()) throw InvalidInput("query point has the wrong dimension");
  const Eigen::VectorXd q = at;
  const auto d = static_cast<std::size_t>(points.cols());
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i)
    dist[i] = {simd::squared_l2({points.data() + i * d, d}, {q.data(), d}), i};
  k = std::min(k, n);
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1), dist.end());
  std::size_t s = 0;
  for (std::size_t i = 0; i < k; ++i) s += stable[dist[i].second] ? 1 : 0;
  return static_cast<double>(s) / static_cast<double>(k);
}

std::uint64_t validation_seed(std::uint64_t seed) noexcept { return derive_seed(seed, "validation"); }

std::vector<LabeledPoint> lhs_generate(const grid::GridTopology& topology, const grid::Ccrc& ccrc, std::size_t n,
                                       std::uint64_t seed, SamplingPhase phase) {
  const auto sample = lhs_sample(topology.ranges(), n, seed);
  std::vector<LabeledPoint> out(n);
  parallel_for(n, [&](std::size_t i) {
    auto& p = out[i];
    p.op = sample.points[i];
    p.unit = sample.unit.row(static_cast<Eigen::Index>(i)).transpose();
    p.provenance = {seed, ccrc.id(), phase};
    p.exact = evaluate_exact(topology, p.op, ccrc);
  });
  return out;
}

std::vector<LabeledPoint> entropy_guided_generate(const grid::GridTopology& topology, const grid::Ccrc& ccrc,
                                                  std::size_t budget, std::uint64_t seed,
                                                  const EntropyOptions& options) {
  if (budget < 2) throw InvalidInput("entropy-guided generation needs a budget of at least 2");
  if (!(options.cell_fraction > 0.0 && options.cell_fraction <= 1.0))
    throw InvalidInput("cell fraction must lie in (0, 1]");
  const OpSpace space(topology.ranges());
  const auto n_lhs = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(options.lhs_share * static_cast<double>(budget))), 1, budget);
  auto points = lhs_generate(topology, ccrc, n_lhs, derive_seed(seed, "lhs"), SamplingPhase::lhs);

  const auto d = static_cast<Eigen::Index>(space.dimension());
  PointMatrix labeled(0, d);
  std::vector<bool> stable;
  auto add_labeled = [&](const LabeledPoint& p) {
    if (p.exact.diverged) return;
    labeled.conservativeResize(labeled.rows() + 1, d);
    labeled.row(labeled.rows() - 1) = p.unit.transpose();
    stable.push_back(p.exact.stable());
  };
  for (const auto& p : points) add_labeled(p);

  const long n_cells = std::max(1L, std::lround(1.0 / options.cell_fraction));
  const double width = 1.0 / static_cast<double>(n_cells);
  const std::uint64_t refine_seed = derive_seed(seed, "refine");
  Rng rng(refine_seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::VectorXd center(d), best_cell(d);
  for (std::size_t step = n_lhs; step < budget; ++step) {
    double best_h = -1.0;
    for (std::size_t c = 0; c < std::max<std::size_t>(1, options.candidates); ++c) {
      Eigen::VectorXd cell(d);
      for (Eigen::Index j = 0; j < d; ++j) {
        cell(j) = std::min<double>(static_cast<double>(n_cells - 1), std::floor(unif(rng) * static_cast<double>(n_cells)));
        center(j) = (cell(j) + 0.5) * width;
      }
      const double h = binary_entropy(local_stable_fraction(labeled, stable, center, options.neighbours));
      if (h > best_h) {
        best_h = h;
        best_cell = cell;
      }
    }
    LabeledPoint p;
    const std::uint64_t row_seed = derive_seed(refine_seed, step);
    Rng local(row_seed);
    p.unit.resize(d);
    for (Eigen::Index j = 0; j < d; ++j) p.unit(j) = std::min(1.0, (best_cell(j) + unif(local)) * width);
    p.op = space.to_op(p.unit);
    p.provenance = {row_seed, ccrc.id(), SamplingPhase::entropy_refined};
    p.exact = evaluate_exact(topology, p.op, ccrc);
    add_labeled(p);
    points.push_back(std::move(p));
  }
  return points;
}

std::vector<powerflow::ColumnInfo> xc_columns(const grid::GridTopology& topology) {
  std::vector<powerflow::ColumnInfo> cols;
  for (const auto& ipc : topology.ipcs())
    cols.push_back({"XC_" + ipc.id, powerflow::FeatureKind::categorical, ipc.id, ipc.id, "XC",
                    powerflow::ElementGroup::ipc});
  return cols;
}

Dataset stability_dataset(const grid::GridTopology& topology, const std::vector<LabeledPoint>& points,
                          ClassBalance* balance) {
  Dataset ds;
  ds.role = DatasetRole::stability;
  ds.columns = powerflow::feature_columns(topology);
  const std::size_t nf = ds.columns.size();
  for (auto& c : xc_columns(topology)) ds.columns.push_back(std::move(c));
  std::size_t rows = 0, diverged = 0;
  for (const auto& p : points) (p.exact.diverged ? diverged : rows)++;
  ds.X.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(ds.columns.size()));
  ds.y.resize(static_cast<Eigen::Index>(rows));
  Eigen::Index r = 0;
  std::size_t n_stable = 0;
  for (const auto& p : points) {
    if (p.exact.diverged) continue;
    if (p.exact.features.size() != nf) throw InvalidInput("feature vector does not match the topology");
    for (std::size_t j = 0; j < nf; ++j) ds.X(r, static_cast<Eigen::Index>(j)) = p.exact.features[j];
    const auto roles = grid::Ccrc::from_id(p.provenance.ccrc, topology.ipc_count());
    for (std::size_t k = 0; k < topology.ipc_count(); ++k)
      ds.X(r, static_cast<Eigen::Index>(nf + k)) = static_cast<double>(roles.role(k));
    ds.y(r) = p.exact.stable() ? 1.0 : 0.0;
    n_stable += p.exact.stable() ? 1 : 0;
    ds.provenance.push_back(p.provenance);
    ++r;
  }
  if (balance) {
    balance->rows = rows;
    balance->stable = n_stable;
    balance->diverged = diverged;
    balance->stable_fraction = rows ? static_cast<double>(n_stable) / static_cast<double>(rows) : 0.0;
  }
  ds.validate();
  return ds;
}

Dataset build_stability_dataset(const grid::GridTopology& topology, const std::vector<grid::Ccrc>& ccrcs,
                                std::size_t budget_per_ccrc, std::uint64_t seed, ClassBalance* balance) {
  if (ccrcs.empty()) throw InvalidInput("stability dataset needs at least one CCRC");
  std::vector<LabeledPoint> all;
  for (const auto& c : ccrcs) {
    auto pts = entropy_guided_generate(topology, c, budget_per_ccrc, derive_seed(seed, c.id()));
    all.insert(all.end(), std::make_move_iterator(pts.begin()), std::make_move_iterator(pts.end()));
  }
  return stability_dataset(topology, all, balance);
}

std::vector<Dataset> indicator_datasets(const grid::GridTopology& topology, grid::CcrcId owner,
                                        const std::vector<LabeledPoint>& points) {
  std::vector<const LabeledPoint*> stable;
  for (const auto& p : points) {
    if (p.provenance.ccrc != owner) throw InvalidInput("indicator dataset mixes CCRCs");
    if (p.exact.stable() && p.exact.indicators.complete()) stable.push_back(&p);
  }
  if (stable.size() < kMinIndicatorRows)
    throw InsufficientData("CCRC " + std::to_string(owner) + " has only " + std::to_string(stable.size()) +
                           " stable rows (need " + std::to_string(kMinIndicatorRows) + ")");
  const auto cols = powerflow::feature_columns(topology);
  const auto n = static_cast<Eigen::Index>(stable.size());
  Eigen::MatrixXd X(n, static_cast<Eigen::Index>(cols.size()));
  std::vector<RowProvenance> prov;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& f = stable[static_cast<std::size_t>(i)]->exact.features;
    X.row(i) = Eigen::Map<const Eigen::RowVectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
    prov.push_back(stable[static_cast<std::size_t>(i)]->provenance);
  }
  std::vector<Dataset> out;
  for (auto role : kIndicatorRoles) {
    Dataset ds;
    ds.role = role;
    ds.owner = owner;
    ds.columns = cols;
    ds.X = X;
    ds.provenance = prov;
    ds.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& ind = stable[static_cast<std::size_t>(i)]->exact.indicators;
      switch (role) {
        case DatasetRole::h2_f: ds.y(i) = *ind.h2_f; break;
        case DatasetRole::h2_vdc: ds.y(i) = *ind.h2_vdc; break;
        case DatasetRole::k_f: ds.y(i) = *ind.k_f; break;
        case DatasetRole::k_vdc: ds.y(i) = *ind.k_vdc; break;
        case DatasetRole::stability: break;
      }
    }
    ds.validate();
    out.push_back(std::move(ds));
  }
  return out;
}

std::vector<Dataset> build_indicator_datasets(const grid::GridTopology& topology, const grid::Ccrc& ccrc,
                                              std::size_t budget, std::uint64_t seed) {
  const auto points =
      lhs_generate(topology, ccrc, budget, derive_seed(seed, "indicators:" + std::to_string(ccrc.id())),
                   SamplingPhase::lhs);
  return indicator_datasets(topology, ccrc.id(), points);
}

}  // namespace acdc::dataforge
