#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "acdc/surrogate/model.hpp"

namespace acdc::surrogate::detail {

std::unique_ptr<Estimator> fit_dummy(const ModelSpec& spec, const Eigen::VectorXd& y);
std::unique_ptr<Estimator> load_dummy(BinaryReader& in);

std::unique_ptr<Estimator> fit_linear(const ModelSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y);
std::unique_ptr<Estimator> load_linear(BinaryReader& in);

std::unique_ptr<Estimator> fit_tree(const ModelSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y);
std::unique_ptr<Estimator> load_tree(BinaryReader& in);

std::unique_ptr<Estimator> fit_gbt(const ModelSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                   std::uint64_t seed);
std::unique_ptr<Estimator> load_gbt(BinaryReader& in);

std::unique_ptr<Estimator> fit_mlp(const ModelSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                   std::uint64_t seed);
std::unique_ptr<Estimator> load_mlp(BinaryReader& in);

inline double sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

}  // namespace acdc::surrogate::detail
