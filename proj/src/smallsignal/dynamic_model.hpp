#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "acdc/grid/ccrc.hpp"
#include "acdc/grid/topology.hpp"
#include "acdc/powerflow/solution.hpp"

namespace acdc::smallsignal::detail {

using cd = std::complex<double>;

// Converter synchronized through a PLL with an inner current loop, expressed
// as an EMF (states e_d, e_q in the PLL frame) behind its coupling impedance.
// Used for plants, GFL IPCs and the AC side of DC-GFM IPCs.
struct SyncUnit {
  std::string name;
  std::size_t bus = 0, subgrid = 0;
  cd z;
  cd s_set;            // P/Q reference for plants and GFL IPCs
  int ipc = -1;
  bool dc_forming = false;
  double loss0 = 0.0;   // converter losses at the operating point (DC-GFM)
  double p_star = 0.0;  // DC droop reference (DC-GFM)
  int s_theta = -1, s_xi = -1, s_ed = -1, s_eq = -1, s_pdc = -1;
};

// AC-GFM IPC: P-f droop with filtered power, first-order EMF magnitude loop.
struct FormingUnit {
  std::string name;
  std::size_t bus = 0, subgrid = 0;
  int ipc = -1;
  cd z;
  double p_star = 0.0, e0 = 1.0, v_ref = 1.0;
  bool reference = false;  // angle reference of a subgrid without Thevenin
  int s_delta = -1, s_pf = -1, s_e = -1, s_pdc = -1;
};

struct TheveninUnit {
  std::size_t index = 0, bus = 0, subgrid = 0;
  double p0 = 0.0;
  int s_omega = -1;
};

// Nonlinear DAE  dx/dt = f(x, z, u),  0 = g(x, z, u),  y = h(x)
// with z the AC bus voltages (real, imaginary) in per-subgrid frames.
class DynamicModel {
 public:
  DynamicModel(const grid::GridTopology& topology, const grid::Ccrc& ccrc, const powerflow::PowerFlowSolution& pf);

  Eigen::Index n_states() const noexcept { return static_cast<Eigen::Index>(state_names_.size()); }
  Eigen::Index n_algebraic() const noexcept { return 2 * static_cast<Eigen::Index>(nac_); }
  Eigen::Index n_inputs() const noexcept { return static_cast<Eigen::Index>(input_names_.size()); }
  Eigen::Index n_outputs() const noexcept { return static_cast<Eigen::Index>(output_names_.size()); }

  const Eigen::VectorXd& x0() const noexcept { return x0_; }
  const Eigen::VectorXd& z0() const noexcept { return z0_; }

  void eval(const Eigen::VectorXd& x, const Eigen::VectorXd& z, const Eigen::VectorXd& u, Eigen::VectorXd& f,
            Eigen::VectorXd& g) const;
  Eigen::VectorXd outputs(const Eigen::VectorXd& x) const;

  const std::vector<std::string>& state_names() const noexcept { return state_names_; }
  const std::vector<std::string>& input_names() const noexcept { return input_names_; }
  const std::vector<std::string>& output_names() const noexcept { return output_names_; }
  std::size_t n_frequency_outputs() const noexcept { return topology_.ac_subgrids().size(); }

  // Algebraic variable indices belonging to one AC subgrid.
  std::vector<Eigen::Index> algebraic_block(std::size_t subgrid) const;

 private:
  int add_state(const std::string& name, double value);
  double frame_frequency(std::size_t subgrid, const Eigen::VectorXd& x) const;

  const grid::GridTopology& topology_;
  std::size_t nac_ = 0, ndc_ = 0;
  Eigen::MatrixXcd ybus_;
  std::vector<TheveninUnit> thevenins_;
  std::vector<SyncUnit> sync_;
  std::vector<FormingUnit> forming_;
  std::vector<cd> load_s_;
  std::vector<int> s_vdc_, s_idc_;
  std::vector<int> thevenin_of_subgrid_;  // -1 if none
  std::vector<int> reference_of_subgrid_;  // forming unit index, -1 if none
  std::vector<std::vector<int>> forming_of_subgrid_;
  std::vector<std::string> state_names_, input_names_, output_names_;
  std::vector<double> x_init_;
  Eigen::VectorXd x0_, z0_;
};

}  // namespace acdc::smallsignal::detail
