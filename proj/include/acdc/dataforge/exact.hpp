#pragma once

#include <optional>
#include <string>
#include <vector>

#include "acdc/grid/ccrc.hpp"
#include "acdc/grid/operating_point.hpp"
#include "acdc/grid/topology.hpp"
#include "acdc/powerflow/solution.hpp"
#include "acdc/smallsignal/indicators.hpp"

namespace acdc::dataforge {

// Result of the exact chain power flow -> state space -> label/indicators.
struct ExactEvaluation {
  bool diverged = false;
  std::string failure;             // message when diverged
  std::vector<double> features;    // X_PF followed by X_IPC, empty when diverged
  smallsignal::IndicatorSet indicators;

  bool stable() const noexcept { return !diverged && indicators.label.stable; }
};

// Power-flow divergence and assembly failures are reported through
// `diverged`; invalid inputs still throw.
ExactEvaluation evaluate_exact(const grid::GridTopology& topology, const grid::OperatingPoint& op,
                               const grid::Ccrc& ccrc);

// Label only (skips the Lyapunov solves).
std::optional<bool> exact_label(const grid::GridTopology& topology, const grid::OperatingPoint& op,
                                const grid::Ccrc& ccrc);

}  // namespace acdc::dataforge
