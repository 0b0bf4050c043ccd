#include "acdc/surrogate/metrics.hpp"

#include <cmath>

#include <spdlog/spdlog.h>

#include "acdc/common/error.hpp"

namespace acdc::surrogate {

double f_beta(std::span<const double> predictions, std::span<const double> labels, double beta) {
  if (predictions.size() != labels.size()) throw InvalidInput("f_beta: length mismatch");
  if (!(beta > 0.0)) throw InvalidInput("f_beta: beta must be positive");
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool p = predictions[i] >= 0.5, t = labels[i] >= 0.5;
    if (labels[i] != 0.0 && labels[i] != 1.0) throw InvalidInput("f_beta: labels must be 0 or 1");
    tp += p && t;
    fp += p && !t;
    fn += !p && t;
  }
  if (tp + fp == 0.0 && tp + fn == 0.0) {
    spdlog::warn("f_beta: no positive predictions and no positive labels; score 0");
    return 0.0;
  }
  if (tp == 0.0) return 0.0;
  const double prec = tp / (tp + fp), rec = tp / (tp + fn), b2 = beta * beta;
  return (1.0 + b2) * prec * rec / (b2 * prec + rec);
}

double choose_beta(double stable_fraction) {
  if (!(stable_fraction >= 0.0 && stable_fraction <= 1.0)) throw InvalidInput("choose_beta: fraction outside [0, 1]");
  return stable_fraction < 0.5 ? 2.0 : 0.5;
}

double r2_score(std::span<const double> predictions, std::span<const double> targets) {
  if (predictions.size() != targets.size()) throw InvalidInput("r2_score: length mismatch");
  if (targets.size() < 2) throw UndefinedMetric("r2_score: needs at least two targets");
  double mean = 0;
  for (double t : targets) mean += t;
  mean /= static_cast<double>(targets.size());
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    ss_res += (targets[i] - predictions[i]) * (targets[i] - predictions[i]);
    ss_tot += (targets[i] - mean) * (targets[i] - mean);
  }
  if (ss_tot == 0.0) throw UndefinedMetric("r2_score: targets have zero variance");
  return 1.0 - ss_res / ss_tot;
}

double Metric::operator()(std::span<const double> predictions, std::span<const double> truth) const {
  return kind == Kind::f_beta ? f_beta(predictions, truth, beta) : r2_score(predictions, truth);
}

std::string Metric::name() const {
  if (kind == Kind::r2) return "R2";
  return beta == 2.0 ? "F2" : beta == 0.5 ? "F0.5" : "F" + std::to_string(beta);
}

Metric classification_metric(std::span<const double> labels) {
  if (labels.empty()) throw InvalidInput("classification_metric: no labels");
  double s = 0;
  for (double v : labels) s += v;
  return {Metric::Kind::f_beta, choose_beta(s / static_cast<double>(labels.size()))};
}

}  // namespace acdc::surrogate
