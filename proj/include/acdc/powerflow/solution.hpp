#pragma once

#include <vector>

#include "acdc/grid/ccrc.hpp"

namespace acdc::powerflow {

struct ElementFlow {
  double p_mw = 0.0;
  double q_mvar = 0.0;
};

struct IpcFlow {
  double p_ac_mw = 0.0;    // injected into the AC terminal bus
  double q_ac_mvar = 0.0;  // injected into the AC terminal bus
  double p_dc_mw = 0.0;    // injected into the DC terminal bus
  double schedule_mw = 0.0;  // dispatched AC-to-DC transfer (droop reference P*)
};

// Converged coupled AC/DC flow. Generator and Thevenin powers are injections,
// load powers are absorbed. Thevenin angles define the angle reference of
// their subgrid; subgrids without a Thevenin take the first AC-GFM IPC.
struct PowerFlowSolution {
  grid::Ccrc ccrc;
  double base_mva = 100.0;
  std::vector<double> v_ac;      // p.u.
  std::vector<double> theta_ac;  // rad
  std::vector<double> v_dc;      // p.u.
  std::vector<ElementFlow> generators, loads, thevenins;
  std::vector<IpcFlow> ipcs;
  int iterations = 0;
  double max_mismatch = 0.0;  // p.u.

  double to_pu(double mw) const noexcept { return mw / base_mva; }
};

}  // namespace acdc::powerflow
