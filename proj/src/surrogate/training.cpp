#include "acdc/surrogate/training.hpp"

#include <algorithm>

#include "acdc/common/error.hpp"
#include "acdc/dataforge/engineering.hpp"

namespace acdc::surrogate {

using powerflow::FeatureKind;

TrainedModel train_classifier(const dataforge::Dataset& ds, const ModelSpec& spec, std::uint64_t seed) {
  if (spec.task != Task::classification) throw InvalidInput("train_classifier: spec is not a classification spec");
  if (ds.role != dataforge::DatasetRole::stability) throw InvalidInput("train_classifier: expected a D_Y dataset");
  if (std::none_of(ds.columns.begin(), ds.columns.end(), [](const auto& c) { return c.kind == FeatureKind::categorical; }))
    throw InvalidInput("train_classifier: dataset carries no X_C columns");
  return fit_model(spec, ds, seed);
}

StabilityPrediction predict_stability(const TrainedModel& model, const dataforge::Dataset& rows) {
  if (model.spec().task != Task::classification) throw InvalidInput("predict_stability: not a classifier");
  StabilityPrediction p;
  p.scores = model.predict(rows);
  p.labels = (p.scores.array() >= 0.5).cast<double>();
  return p;
}

TrainedModel train_regressor(const dataforge::Dataset& ds, const ModelSpec& spec, std::uint64_t seed,
                             double winsor_percentile) {
  if (spec.task != Task::regression) throw InvalidInput("train_regressor: spec is not a regression spec");
  if (ds.role == dataforge::DatasetRole::stability) throw InvalidInput("train_regressor: expected an indicator dataset");
  for (const auto& c : ds.columns)
    if (c.kind == FeatureKind::categorical)
      throw InvalidInput("train_regressor: column " + c.name + " is an X_C column");
  if (ds.rows() < 2) throw InsufficientData("train_regressor: fewer than two rows");
  if (winsor_percentile >= 1.0) return fit_model(spec, ds, seed);
  dataforge::Dataset w = ds;
  const auto clipped = dataforge::winsorize(std::vector<double>(ds.y.data(), ds.y.data() + ds.y.size()), winsor_percentile);
  w.y = Eigen::Map<const Eigen::VectorXd>(clipped.values.data(), static_cast<Eigen::Index>(clipped.values.size()));
  w.winsor_upper = clipped.upper;
  return fit_model(spec, w, seed);
}

Eigen::VectorXd predict_indicator(const TrainedModel& model, const dataforge::Dataset& rows) {
  if (model.spec().task != Task::regression) throw InvalidInput("predict_indicator: not a regressor");
  return model.predict(rows);
}

}  // namespace acdc::surrogate
