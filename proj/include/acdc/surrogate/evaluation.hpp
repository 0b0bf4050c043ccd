#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "acdc/common/rng.hpp"
#include "acdc/dataforge/dataset.hpp"
#include "acdc/surrogate/metrics.hpp"
#include "acdc/surrogate/model.hpp"

namespace acdc::surrogate {

// Fold index per row. Classification folds are stratified: each class is
// shuffled and dealt round-robin, so fold sizes differ by at most one.
std::vector<int> assign_folds(const Eigen::VectorXd& y, int k, Task task, std::uint64_t seed);

struct CvResult {
  std::vector<double> fold_scores;
  double mean = 0.0;
  double std = 0.0;  // population
  Metric metric;
};

CvResult kfold_cv(const ModelSpec& spec, const dataforge::Dataset& ds, int k, const Metric& metric,
                  std::uint64_t seed);

struct ModelReport {
  ModelSpec spec;
  CvResult cv;
};

// Sorted by mean CV score, best first. Requires a dummy baseline among specs.
std::vector<ModelReport> compare_models(const std::vector<ModelSpec>& specs, const dataforge::Dataset& ds, int k,
                                        const Metric& metric, std::uint64_t seed);

struct FeatureImportance {
  std::string name;
  double mean = 0.0;
  double std = 0.0;
};

// Shuffles column j of X in place.
void permute_column(Eigen::MatrixXd& X, Eigen::Index j, Rng& rng);

// Mean metric drop over `repeats` shuffles per column, most important first.
std::vector<FeatureImportance> permutation_importance(const TrainedModel& model, const dataforge::Dataset& ds,
                                                      const Metric& metric, int repeats, std::uint64_t seed);

// Axes left empty keep the base spec value.
struct ParamGrid {
  std::vector<double> learning_rate;
  std::vector<int> max_depth;
  std::vector<double> subsample;
  std::vector<int> n_estimators;
  std::vector<double> l2;
  std::vector<std::vector<int>> hidden_layers;
  std::vector<Activation> activation;

  std::vector<ModelSpec> lattice(const ModelSpec& base) const;
};

// GBT: lr {0.1, 0.3} x depth {4, 6, 8} x subsample {0.8, 1.0};
// MLP: one or two hidden layers of width n_inputs/2 or n_inputs.
ParamGrid default_grid(Family family, std::size_t n_inputs);

struct GridSearchResult {
  ModelSpec best;
  std::vector<ModelReport> table;  // lattice order
  std::size_t best_index = 0;
};

// Ties on mean score go to the smaller model, then the lower learning rate.
GridSearchResult grid_search(const ModelSpec& base, const ParamGrid& grid, const dataforge::Dataset& ds, int k,
                             const Metric& metric, std::uint64_t seed);

}  // namespace acdc::surrogate
