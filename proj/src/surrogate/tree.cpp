#include <algorithm>
#include <cmath>
#include <numeric>

#include "acdc/common/error.hpp"
#include "acdc/common/rng.hpp"
#include "binary_io.hpp"
#include "learners.hpp"

namespace acdc::surrogate::detail {

namespace {

// Per-feature split candidates and the bin code of every training value.
// code(x) = number of cuts strictly below x, so x <= cut[b] <=> code <= b.
struct Bins {
  std::vector<std::vector<double>> cuts;
  std::vector<std::uint16_t> codes;  // column-major, rows x features
  Eigen::Index n = 0;

  std::uint16_t code(Eigen::Index row, std::size_t j) const { return codes[j * static_cast<std::size_t>(n) + row]; }
};

Bins make_bins(const Eigen::MatrixXd& X, int max_bins) {
  Bins b;
  b.n = X.rows();
  b.cuts.resize(static_cast<std::size_t>(X.cols()));
  b.codes.resize(static_cast<std::size_t>(X.rows() * X.cols()));
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    std::vector<double> u(X.col(j).data(), X.col(j).data() + X.rows());
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    auto& cuts = b.cuts[static_cast<std::size_t>(j)];
    auto cut_between = [&](std::size_t hi) {
      double c = u[hi - 1] + (u[hi] - u[hi - 1]) / 2;
      if (!(c < u[hi])) c = u[hi - 1];
      cuts.push_back(c);
    };
    const std::size_t U = u.size();
    if (U <= static_cast<std::size_t>(max_bins)) {
      for (std::size_t k = 1; k < U; ++k) cut_between(k);
    } else {
      for (std::size_t k = 1; k < static_cast<std::size_t>(max_bins); ++k) cut_between(k * U / max_bins);
    }
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const auto c = std::lower_bound(cuts.begin(), cuts.end(), X(i, j)) - cuts.begin();
      b.codes[static_cast<std::size_t>(j * X.rows() + i)] = static_cast<std::uint16_t>(c);
    }
  }
  return b;
}

struct Node {
  std::int32_t feature = -1;
  std::int32_t left = -1, right = -1;
  double threshold = 0.0;
  double value = 0.0;
};

struct Tree {
  std::vector<Node> nodes;

  double eval(const Eigen::MatrixXd& X, Eigen::Index i) const {
    std::size_t k = 0;
    while (nodes[k].feature >= 0) k = static_cast<std::size_t>(X(i, nodes[k].feature) <= nodes[k].threshold ? nodes[k].left : nodes[k].right);
    return nodes[k].value;
  }
  void save(BinaryWriter& out) const {
    out.u64(nodes.size());
    for (const auto& n : nodes) {
      out.i32(n.feature);
      out.i32(n.left);
      out.i32(n.right);
      out.f64(n.threshold);
      out.f64(n.value);
    }
  }
  static Tree load(BinaryReader& in) {
    Tree t;
    t.nodes.resize(in.count());
    if (t.nodes.empty()) throw IoError("params.bin: empty tree");
    for (auto& n : t.nodes) {
      n.feature = in.i32();
      n.left = in.i32();
      n.right = in.i32();
      n.threshold = in.f64();
      n.value = in.f64();
    }
    const auto size = static_cast<std::int32_t>(t.nodes.size());
    for (const auto& n : t.nodes)
      if (n.feature >= 0 && (n.left <= 0 || n.right <= 0 || n.left >= size || n.right >= size))
        throw IoError("params.bin: corrupt tree");
    return t;
  }
};

struct GrowParams {
  int max_depth = 0;  // 0 = unlimited
  int min_samples_leaf = 1;
  double lambda = 0.0;
  double min_hess = 0.0;
  double scale = 1.0;  // leaf shrinkage
};

// Second-order tree growth on gradient/hessian pairs; with g = -y, h = 1 and
// lambda = 0 this is the ordinary least-squares (Gini for 0/1) CART.
class Grower {
 public:
  Grower(const Bins& bins, const std::vector<double>& g, const std::vector<double>& h, const GrowParams& p)
      : bins_(bins), g_(g), h_(h), p_(p) {
    std::size_t total = 0;
    for (const auto& c : bins.cuts) {
      offset_.push_back(total);
      total += c.size() + 1;
    }
    hg_.resize(total);
    hh_.resize(total);
    hc_.resize(total);
  }

  Tree grow(std::vector<Eigen::Index> rows) {
    Tree t;
    t.nodes.emplace_back();
    split(t, 0, rows, 0);
    return t;
  }

 private:
  double leaf(double G, double H) const { return H + p_.lambda > 0 ? -G / (H + p_.lambda) : 0.0; }
  double score(double G, double H) const { return H + p_.lambda > 0 ? G * G / (H + p_.lambda) : 0.0; }

  void split(Tree& t, std::size_t at, std::vector<Eigen::Index>& rows, int depth) {
    double G = 0, H = 0;
    for (auto r : rows) {
      G += g_[static_cast<std::size_t>(r)];
      H += h_[static_cast<std::size_t>(r)];
    }
    t.nodes[at].value = p_.scale * leaf(G, H);
    const auto n = static_cast<long>(rows.size());
    if ((p_.max_depth > 0 && depth >= p_.max_depth) || n < 2L * p_.min_samples_leaf) return;

    std::fill(hg_.begin(), hg_.end(), 0.0);
    std::fill(hh_.begin(), hh_.end(), 0.0);
    std::fill(hc_.begin(), hc_.end(), 0);
    const std::size_t d = bins_.cuts.size();
    for (std::size_t j = 0; j < d; ++j) {
      if (bins_.cuts[j].empty()) continue;
      const std::size_t off = offset_[j];
      const std::uint16_t* codes = bins_.codes.data() + j * static_cast<std::size_t>(bins_.n);
      for (auto r : rows) {
        const std::size_t k = off + codes[r];
        hg_[k] += g_[static_cast<std::size_t>(r)];
        hh_[k] += h_[static_cast<std::size_t>(r)];
        ++hc_[k];
      }
    }
    const double parent = score(G, H);
    double best_gain = 1e-12 * std::max(1.0, parent);
    int best_j = -1, best_b = -1;
    for (std::size_t j = 0; j < d; ++j) {
      const std::size_t nb = bins_.cuts[j].size(), off = offset_[j];
      double GL = 0, HL = 0;
      long cl = 0;
      for (std::size_t b = 0; b < nb; ++b) {
        GL += hg_[off + b];
        HL += hh_[off + b];
        cl += hc_[off + b];
        if (cl < p_.min_samples_leaf) continue;
        if (n - cl < p_.min_samples_leaf) break;
        const double GR = G - GL, HR = H - HL;
        if (HL < p_.min_hess || HR < p_.min_hess) continue;
        const double gain = score(GL, HL) + score(GR, HR) - parent;
        if (gain > best_gain) {
          best_gain = gain;
          best_j = static_cast<int>(j);
          best_b = static_cast<int>(b);
        }
      }
    }
    if (best_j < 0) return;

    const auto j = static_cast<std::size_t>(best_j);
    auto mid = std::partition(rows.begin(), rows.end(),
                              [&](Eigen::Index r) { return bins_.code(r, j) <= static_cast<std::uint16_t>(best_b); });
    std::vector<Eigen::Index> left(rows.begin(), mid), right(mid, rows.end());
    rows.clear();
    rows.shrink_to_fit();
    const auto l = t.nodes.size();
    t.nodes.emplace_back();
    t.nodes.emplace_back();
    t.nodes[at].feature = best_j;
    t.nodes[at].threshold = bins_.cuts[j][static_cast<std::size_t>(best_b)];
    t.nodes[at].left = static_cast<std::int32_t>(l);
    t.nodes[at].right = static_cast<std::int32_t>(l + 1);
    split(t, l, left, depth + 1);
    split(t, l + 1, right, depth + 1);
  }

  const Bins& bins_;
  const std::vector<double>& g_;
  const std::vector<double>& h_;
  GrowParams p_;
  std::vector<std::size_t> offset_;
  std::vector<double> hg_, hh_;
  std::vector<long> hc_;
};

class SingleTree final : public Estimator {
 public:
  explicit SingleTree(Tree t) : t_(std::move(t)) {}
  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const override {
    Eigen::VectorXd out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) out(i) = t_.eval(X, i);
    return out;
  }
  void save(BinaryWriter& out) const override { t_.save(out); }

 private:
  Tree t_;
};

class Boosted final : public Estimator {
 public:
  Boosted(double base, bool logistic, std::vector<Tree> trees)
      : base_(base), logistic_(logistic), trees_(std::move(trees)) {}
  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const override {
    Eigen::VectorXd out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      double f = base_;
      for (const auto& t : trees_) f += t.eval(X, i);
      out(i) = logistic_ ? sigmoid(f) : f;
    }
    return out;
  }
  void save(BinaryWriter& out) const override {
    out.u8(logistic_);
    out.f64(base_);
    out.u64(trees_.size());
    for (const auto& t : trees_) t.save(out);
  }

 private:
  double base_;
  bool logistic_;
  std::vector<Tree> trees_;
};

}  // namespace

std::unique_ptr<Estimator> fit_tree(const ModelSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const Bins bins = make_bins(X, spec.hp.max_bins);
  std::vector<double> g(static_cast<std::size_t>(y.size())), h(g.size(), 1.0);
  for (Eigen::Index i = 0; i < y.size(); ++i) g[static_cast<std::size_t>(i)] = -y(i);
  GrowParams p;
  p.max_depth = spec.hp.max_depth;
  p.min_samples_leaf = spec.hp.min_samples_leaf;
  p.lambda = spec.hp.l2;
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(y.size()));
  std::iota(rows.begin(), rows.end(), Eigen::Index{0});
  return std::make_unique<SingleTree>(Grower(bins, g, h, p).grow(std::move(rows)));
}

std::unique_ptr<Estimator> load_tree(BinaryReader& in) { return std::make_unique<SingleTree>(Tree::load(in)); }

std::unique_ptr<Estimator> fit_gbt(const ModelSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                   std::uint64_t seed) {
  const auto& hp = spec.hp;
  const bool logistic = spec.task == Task::classification;
  const auto n = static_cast<std::size_t>(y.size());
  const Bins bins = make_bins(X, hp.max_bins);
  double base = y.mean();
  if (logistic) {
    const double p = std::clamp(base, 1e-6, 1 - 1e-6);
    base = std::log(p / (1 - p));
  }
  GrowParams gp;
  gp.max_depth = hp.max_depth;
  gp.min_samples_leaf = hp.min_samples_leaf;
  gp.lambda = hp.l2;
  gp.min_hess = logistic ? 1e-3 : 0.0;
  gp.scale = hp.learning_rate;
  std::vector<double> f(n, base), g(n), h(n, 1.0);
  Grower grower(bins, g, h, gp);
  std::vector<Eigen::Index> all(n);
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  const auto m = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(hp.subsample * static_cast<double>(n))));
  Rng rng(seed);
  std::vector<Tree> trees;
  trees.reserve(static_cast<std::size_t>(hp.n_estimators));
  for (int round = 0; round < hp.n_estimators; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      if (logistic) {
        const double p = sigmoid(f[i]);
        g[i] = p - y(static_cast<Eigen::Index>(i));
        h[i] = p * (1 - p);
      } else {
        g[i] = f[i] - y(static_cast<Eigen::Index>(i));
      }
    }
    std::vector<Eigen::Index> rows = all;
    if (m < n) {
      for (std::size_t i = 0; i < m; ++i) std::swap(rows[i], rows[i + rng() % (n - i)]);
      rows.resize(m);
    }
    Tree t = grower.grow(std::move(rows));
    for (std::size_t i = 0; i < n; ++i) f[i] += t.eval(X, static_cast<Eigen::Index>(i));
    trees.push_back(std::move(t));
  }
  return std::make_unique<Boosted>(base, logistic, std::move(trees));
}

std::unique_ptr<Estimator> load_gbt(BinaryReader& in) {
  const bool logistic = in.u8() != 0;
  const double base = in.f64();
  std::vector<Tree> trees(in.count());
  for (auto& t : trees) t = Tree::load(in);
  return std::make_unique<Boosted>(base, logistic, std::move(trees));
}

}  // namespace acdc::surrogate::detail
