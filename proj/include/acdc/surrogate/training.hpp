#pragma once

#include <cstdint>

#include "acdc/dataforge/dataset.hpp"
#include "acdc/surrogate/model.hpp"

namespace acdc::surrogate {

// Psi-hat: requires the X_C columns and a 0/1 target.
TrainedModel train_classifier(const dataforge::Dataset& ds, const ModelSpec& spec, std::uint64_t seed);

struct StabilityPrediction {
  Eigen::VectorXd labels;  // 0/1
  Eigen::VectorXd scores;  // class-1 probability
};
StabilityPrediction predict_stability(const TrainedModel& model, const dataforge::Dataset& rows);

// Gamma-hat for one (indicator, CCRC) dataset. The target is winsorized at
// `winsor_percentile` before fitting; pass 1.0 to train on raw targets.
TrainedModel train_regressor(const dataforge::Dataset& ds, const ModelSpec& spec, std::uint64_t seed,
                             double winsor_percentile = 0.95);
Eigen::VectorXd predict_indicator(const TrainedModel& model, const dataforge::Dataset& rows);

// Central-difference check of the MLP backpropagation on a random small
// network. Returns the largest relative error over all parameters.
double mlp_gradient_check(const std::vector<int>& hidden, Activation activation, Task task, std::uint64_t seed);
inline constexpr double kGradientTolerance = 1e-4;

}  // namespace acdc::surrogate
