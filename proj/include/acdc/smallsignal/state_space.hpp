#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "acdc/grid/ccrc.hpp"
#include "acdc/grid/topology.hpp"
#include "acdc/powerflow/solution.hpp"

namespace acdc::smallsignal {

enum class OutputSet { frequency, dc_voltage };

std::string_view output_set_name(OutputSet set) noexcept;

// Linearized model dx = A x + B u, y = C x + D u around a power-flow
// equilibrium. Inputs: P and Q injections at every AC bus, P injection at
// every DC bus (p.u.). Outputs: one frequency per AC subgrid, then every DC
// bus voltage (p.u.).
struct StateSpaceModel {
  Eigen::MatrixXd A, B, C, D;
  std::vector<std::string> state_names, input_names, output_names;
  std::vector<Eigen::Index> frequency_outputs, dc_voltage_outputs;

  Eigen::Index n_states() const noexcept { return A.rows(); }
  Eigen::MatrixXd C_sel(OutputSet set) const;
  Eigen::MatrixXd D_sel(OutputSet set) const;
  // Throws InvalidInput when the matrix dimensions or registries disagree.
  void check_consistency() const;
};

// Builds the model from the per-role converter dynamics, PLL-synchronized
// plants, Thevenin governor lags and RC/RL DC network; the AC network is
// treated as quasi-static and eliminated algebraically (Kron reduction).
StateSpaceModel assemble_state_space(const grid::GridTopology& topology, const grid::Ccrc& ccrc,
                                     const powerflow::PowerFlowSolution& pf);

// Raw nonlinear residuals at the linearization point, for equilibrium checks:
// max |f(x0, z0, 0)| and max |g(x0, z0, 0)|.
struct EquilibriumResidual {
  double differential = 0.0;
  double algebraic = 0.0;
};
EquilibriumResidual equilibrium_residual(const grid::GridTopology& topology, const grid::Ccrc& ccrc,
                                         const powerflow::PowerFlowSolution& pf);

// Plain system from matrices; registries get generic names, outputs are split
// as given (first n_frequency rows are the frequency set).
StateSpaceModel make_state_space(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C, Eigen::MatrixXd D,
                                 Eigen::Index n_frequency);

}  // namespace acdc::smallsignal
