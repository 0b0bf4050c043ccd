#include "acdc/surrogate/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <spdlog/spdlog.h>

#include "acdc/common/error.hpp"
#include "acdc/common/parallel.hpp"

namespace acdc::surrogate {

namespace {

std::pair<double, double> mean_std(const std::vector<double>& v) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return {m, std::sqrt(s / static_cast<double>(v.size()))};
}

}  // namespace

std::vector<int> assign_folds(const Eigen::VectorXd& y, int k, Task task, std::uint64_t seed) {
  if (k < 2) throw InvalidInput("kfold: k must be >= 2");
  if (y.size() < k) throw InvalidInput("kfold: fewer rows than folds");
  Rng rng(seed);
  std::vector<Eigen::Index> order;
  if (task == Task::classification) {
    std::vector<Eigen::Index> neg, pos;
    for (Eigen::Index i = 0; i < y.size(); ++i) (y(i) >= 0.5 ? pos : neg).push_back(i);
    std::shuffle(neg.begin(), neg.end(), rng);
    std::shuffle(pos.begin(), pos.end(), rng);
    order = neg;
    order.insert(order.end(), pos.begin(), pos.end());
  } else {
    order.resize(static_cast<std::size_t>(y.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::shuffle(order.begin(), order.end(), rng);
  }
  std::vector<int> fold(order.size());
  for (std::size_t p = 0; p < order.size(); ++p) fold[static_cast<std::size_t>(order[p])] = static_cast<int>(p % static_cast<std::size_t>(k));
  return fold;
}

CvResult kfold_cv(const ModelSpec& spec, const dataforge::Dataset& ds, int k, const Metric& metric,
                  std::uint64_t seed) {
  spec.validate();
  if (spec.task == Task::classification) {
    const auto pos = static_cast<int>((ds.y.array() >= 0.5).count());
    const int smallest = std::min(pos, static_cast<int>(ds.rows()) - pos);
    if (smallest < k) {
      if (smallest >= 2) {
        spdlog::warn("kfold: a class has only {} rows; refolding with k = {}", smallest, smallest);
        k = smallest;
      } else {
        spdlog::warn("kfold: a class has {} rows and is absent from some folds", smallest);
      }
    }
  }
  const auto fold = assign_folds(ds.y, k, spec.task, seed);
  CvResult res;
  res.metric = metric;
  res.fold_scores.assign(static_cast<std::size_t>(k), 0.0);
  parallel_for(static_cast<std::size_t>(k), [&](std::size_t f) {
    std::vector<Eigen::Index> train, test;
    for (std::size_t i = 0; i < fold.size(); ++i)
      (fold[i] == static_cast<int>(f) ? test : train).push_back(static_cast<Eigen::Index>(i));
    const auto model = fit_model(spec, ds.subset(train), derive_seed(seed, f));
    const auto held = ds.subset(test);
    const Eigen::VectorXd pred = model.predict(held);
    res.fold_scores[f] = metric({pred.data(), static_cast<std::size_t>(pred.size())},
                                {held.y.data(), static_cast<std::size_t>(held.y.size())});
  });
  std::tie(res.mean, res.std) = mean_std(res.fold_scores);
  return res;
}

std::vector<ModelReport> compare_models(const std::vector<ModelSpec>& specs, const dataforge::Dataset& ds, int k,
                                        const Metric& metric, std::uint64_t seed) {
  if (specs.size() < 2) throw InvalidInput("compare_models: needs at least two model specs");
  if (std::none_of(specs.begin(), specs.end(), [](const ModelSpec& s) { return s.family == Family::dummy; }))
    throw InvalidInput("compare_models: a dummy baseline is required");
  std::vector<ModelReport> out;
  for (const auto& s : specs) out.push_back({s, kfold_cv(s, ds, k, metric, seed)});
  std::stable_sort(out.begin(), out.end(), [](const ModelReport& a, const ModelReport& b) { return a.cv.mean > b.cv.mean; });
  return out;
}

void permute_column(Eigen::MatrixXd& X, Eigen::Index j, Rng& rng) {
  auto c = X.col(j);
  std::shuffle(c.begin(), c.end(), rng);
}

std::vector<FeatureImportance> permutation_importance(const TrainedModel& model, const dataforge::Dataset& ds,
                                                      const Metric& metric, int repeats, std::uint64_t seed) {
  if (repeats < 1) throw InvalidInput("permutation_importance: repeats must be >= 1");
  const Eigen::MatrixXd X = model.align(ds);
  const std::span<const double> truth(ds.y.data(), static_cast<std::size_t>(ds.y.size()));
  const Eigen::VectorXd base_pred = model.predict_matrix(X);
  const double base = metric({base_pred.data(), static_cast<std::size_t>(base_pred.size())}, truth);
  const auto& names = model.manifest();
  std::vector<FeatureImportance> out(names.size());
  parallel_for(names.size(), [&](std::size_t j) {
    Rng rng(derive_seed(seed, j));
    std::vector<double> drops;
    Eigen::MatrixXd Xp = X;
    for (int r = 0; r < repeats; ++r) {
      Xp.col(static_cast<Eigen::Index>(j)) = X.col(static_cast<Eigen::Index>(j));
      permute_column(Xp, static_cast<Eigen::Index>(j), rng);
      const Eigen::VectorXd p = model.predict_matrix(Xp);
      drops.push_back(base - metric({p.data(), static_cast<std::size_t>(p.size())}, truth));
    }
    const auto [m, s] = mean_std(drops);
    out[j] = {names[j], m, s};
  });
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.mean > b.mean; });
  return out;
}

std::vector<ModelSpec> ParamGrid::lattice(const ModelSpec& base) const {
  std::vector<ModelSpec> out{base};
  auto expand = [&](const auto& axis, auto set) {
    if (axis.empty()) return;
    std::vector<ModelSpec> next;
    for (const auto& s : out)
      for (const auto& v : axis) {
        ModelSpec t = s;
        set(t.hp, v);
        next.push_back(std::move(t));
      }
    out = std::move(next);
  };
  expand(learning_rate, [](Hyperparameters& h, double v) { h.learning_rate = v; });
  expand(max_depth, [](Hyperparameters& h, int v) { h.max_depth = v; });
  expand(subsample, [](Hyperparameters& h, double v) { h.subsample = v; });
  expand(n_estimators, [](Hyperparameters& h, int v) { h.n_estimators = v; });
  expand(l2, [](Hyperparameters& h, double v) { h.l2 = v; });
  expand(hidden_layers, [](Hyperparameters& h, const std::vector<int>& v) { h.hidden_layers = v; });
  expand(activation, [](Hyperparameters& h, Activation v) { h.activation = v; });
  return out;
}

ParamGrid default_grid(Family family, std::size_t n_inputs) {
  ParamGrid g;
  if (family == Family::gradient_boosting) {
    g.learning_rate = {0.1, 0.3};
    g.max_depth = {4, 6, 8};
    g.subsample = {0.8, 1.0};
  } else if (family == Family::mlp) {
    const int full = static_cast<int>(std::max<std::size_t>(1, n_inputs));
    const int half = std::max(1, full / 2);
    g.hidden_layers = {{half}, {full}, {half, half}, {full, full}};
  }
  return g;
}

GridSearchResult grid_search(const ModelSpec& base, const ParamGrid& grid, const dataforge::Dataset& ds, int k,
                             const Metric& metric, std::uint64_t seed) {
  const auto specs = grid.lattice(base);
  GridSearchResult res;
  for (const auto& s : specs) res.table.push_back({s, kfold_cv(s, ds, k, metric, seed)});
  auto better = [](const ModelReport& a, const ModelReport& b) {
    const double tol = 1e-12 * std::max(1.0, std::abs(b.cv.mean));
    if (a.cv.mean > b.cv.mean + tol) return true;
    if (a.cv.mean < b.cv.mean - tol) return false;
    if (a.spec.complexity() != b.spec.complexity()) return a.spec.complexity() < b.spec.complexity();
    return a.spec.hp.learning_rate < b.spec.hp.learning_rate;
  };
  for (std::size_t i = 1; i < res.table.size(); ++i)
    if (better(res.table[i], res.table[res.best_index])) res.best_index = i;
  res.best = res.table[res.best_index].spec;
  return res;
}

}  // namespace acdc::surrogate
