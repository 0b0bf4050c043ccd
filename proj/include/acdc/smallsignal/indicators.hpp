#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "acdc/smallsignal/stability.hpp"
#include "acdc/smallsignal/state_space.hpp"

namespace acdc::smallsignal {

// Throws IndicatorUndefined on an unstable model and on D_sel != 0.
double h2_norm(const StateSpaceModel& ss, OutputSet set);
// max |D_sel - C_sel A^-1 B|; throws IndicatorUndefined on an unstable model.
double dc_gain(const StateSpaceModel& ss, OutputSet set);
Eigen::MatrixXd dc_gain_matrix(const StateSpaceModel& ss, OutputSet set);

struct IndicatorSet {
  StabilityLabel label;
  std::optional<double> h2_f, h2_vdc, k_f, k_vdc;

  bool complete() const noexcept { return h2_f && h2_vdc && k_f && k_vdc; }
};

// One Schur factorization serves the label and both H2 norms.
IndicatorSet indicators(const StateSpaceModel& ss);

struct StepResponse {
  std::vector<double> time;
  Eigen::MatrixXd outputs;  // rows = time samples, cols = outputs
};

// Unit step on one input channel from rest, classic fixed-step RK4.
StepResponse step_response(const StateSpaceModel& ss, Eigen::Index input, double horizon, double dt);

}  // namespace acdc::smallsignal
