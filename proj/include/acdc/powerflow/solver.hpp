#pragma once

#include "acdc/grid/ccrc.hpp"
#include "acdc/grid/operating_point.hpp"
#include "acdc/grid/topology.hpp"
#include "acdc/powerflow/solution.hpp"

namespace acdc::powerflow {

struct SolverOptions {
  double tolerance = 1e-8;  // max bus mismatch, p.u.
  int max_iterations = 50;
  int max_halvings = 4;
};

// Newton-Raphson on the coupled AC/DC equations.
//
// Role handling: GFL IPCs hold P = -schedule, Q = 0. AC-GFM IPCs hold their
// terminal voltage at 1 p.u.; the first one in a subgrid without a Thevenin
// is also the angle reference and balances that subgrid, the others hold
// P = -schedule. DC-GFM IPCs follow V_dc = V_dc0 - k_d (P_dc - P*), with
// P_dc the power injected into the DC bus and P* the schedule, at Q = 0.
PowerFlowSolution solve_power_flow(const grid::GridTopology& topology, const grid::OperatingPoint& op,
                                   const grid::Ccrc& ccrc, const SolverOptions& options = {});

// Largest bus mismatch (AC P/Q, DC P, droop) of a solution in p.u.,
// recomputed from the stored values.
double max_mismatch(const grid::GridTopology& topology, const grid::OperatingPoint& op,
                    const PowerFlowSolution& pf);

// Loss breakdown in MW recomputed from a solution.
struct LossReport {
  double ac_lines_mw = 0.0;
  double dc_lines_mw = 0.0;
  double converters_mw = 0.0;
  double total() const noexcept { return ac_lines_mw + dc_lines_mw + converters_mw; }
};
LossReport compute_losses(const grid::GridTopology& topology, const PowerFlowSolution& pf);

// Power a converter injects into its DC bus (p.u.) for a given AC-side
// injection p_ac + j q_ac at terminal voltage v_ac and DC voltage v_dc.
double converter_dc_injection(double p_ac, double q_ac, double v_ac, double v_dc, double r_arm);

}  // namespace acdc::powerflow
