#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "acdc/smallsignal/lyapunov.hpp"
#include "acdc/smallsignal/state_space.hpp"

namespace acdc::smallsignal {

// Abscissa values within this distance of zero are classified unstable.
inline constexpr double kAbscissaTolerance = 1e-9;

struct StabilityLabel {
  bool stable = false;
  double abscissa = 0.0;  // max Re(lambda), 1/s
  std::vector<std::complex<double>> eigenvalues;  // sorted by real part, descending
};

StabilityLabel label_from_eigenvalues(const Eigen::VectorXcd& eigenvalues);
StabilityLabel assess_stability(const Eigen::MatrixXd& A);
StabilityLabel assess_stability(const StateSpaceModel& ss);

}  // namespace acdc::smallsignal
