#pragma once

#include <span>
#include <string>

namespace acdc::surrogate {

// F-beta with label 1 (stable) as the positive class. Inputs are 0/1.
// Returns 0 (and logs a warning) when precision and recall are both undefined.
double f_beta(std::span<const double> predictions, std::span<const double> labels, double beta);

// 2.0 below a 50% stable share (recall first), 0.5 otherwise.
double choose_beta(double stable_fraction);

// 1 - SS_res / SS_tot; throws UndefinedMetric when the targets are constant.
double r2_score(std::span<const double> predictions, std::span<const double> targets);

struct Metric {
  enum class Kind { f_beta, r2 } kind = Kind::r2;
  double beta = 1.0;  // f_beta only

  // For F-beta, predictions are class-1 scores thresholded at 0.5.
  double operator()(std::span<const double> predictions, std::span<const double> truth) const;
  std::string name() const;
};

// F-beta with beta from the class balance of `labels`.
Metric classification_metric(std::span<const double> labels);
inline Metric regression_metric() { return {}; }

}  // namespace acdc::surrogate
