#pragma once

#include <vector>

#include "acdc/grid/topology.hpp"
#include "acdc/powerflow/solution.hpp"

namespace acdc::powerflow {

// Steady-state averaged-model quantities of one IPC, p.u. magnitudes and
// angles in (-pi, pi]. The differential (AC) circuit sees half the arm
// impedance; the additive (DC) circuit sees the full arm resistance.
struct IpcInternals {
  double v_ac = 0.0, theta_v_ac = 0.0;
  double v_diff = 0.0, theta_v_diff = 0.0;
  double v_sum = 0.0, theta_v_sum = 0.0;
  double i_diff = 0.0, theta_i_diff = 0.0;
  double i_sum = 0.0, theta_i_sum = 0.0;
};

std::vector<IpcInternals> compute_ipc_internals(const grid::GridTopology& topology, const PowerFlowSolution& pf);

double wrap_angle(double a) noexcept;

}  // namespace acdc::powerflow
