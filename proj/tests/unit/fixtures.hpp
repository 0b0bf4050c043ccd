#pragma once

#include <random>
#include <string>

#include "acdc/grid/operating_point.hpp"
#include "acdc/grid/topology.hpp"

namespace fixtures {

// One Thevenin-backed AC subgrid, `n_ipc` IPCs hanging off it, all feeding a
// single DC subgrid arranged as a chain.
inline acdc::grid::TopologySpec thevenin_dc_link(std::size_t n_ipc) {
  using namespace acdc::grid;
  TopologySpec s;
  s.name = "link";
  s.ac_subgrid_ids = {"AC"};
  s.dc_subgrid_ids = {"DC"};
  s.ac_buses.push_back({"T", 220, 0});
  s.ac_buses.push_back({"L", 220, 0});
  s.ac_branches.push_back({0, 1, 0.005, 0.05});
  for (std::size_t k = 0; k < n_ipc; ++k) {
    s.ac_buses.push_back({"P" + std::to_string(k), 220, 0});
    s.ac_branches.push_back({1, s.ac_buses.size() - 1, 0.005, 0.05});
    s.dc_buses.push_back({"D" + std::to_string(k), 320, 0, 0.1});
    if (k > 0) s.dc_branches.push_back({k - 1, k, 0.005, 0.05});
    s.ipcs.push_back({"IPC" + std::to_string(k), s.ac_buses.size() - 1, k, 300});
  }
  s.generators.push_back({"G", 1, true});
  s.loads.push_back({"LD", 1, 0.98});
  s.thevenins.push_back({"TH", 0, 0.02, 0.2, 1.0});
  s.ranges.generators = {{10, 100, 0.8, 0.95}};
  s.ranges.demand_min_mw = 50;
  s.ranges.demand_max_mw = 150;
  s.ranges.load_base_share = {1.0};
  return s;
}

// Two Thevenin-backed AC subgrids joined by a two-terminal DC link.
inline acdc::grid::TopologySpec back_to_back() {
  using namespace acdc::grid;
  TopologySpec s;
  s.name = "b2b";
  s.ac_subgrid_ids = {"AC-1", "AC-2"};
  s.dc_subgrid_ids = {"DC"};
  s.ac_buses = {{"T1", 220, 0}, {"B1", 220, 0}, {"T2", 220, 1}, {"B2", 220, 1}};
  s.ac_branches = {{0, 1, 0.005, 0.05}, {2, 3, 0.005, 0.05}};
  s.dc_buses = {{"D1", 320, 0, 0.1}, {"D2", 320, 0, 0.1}};
  s.dc_branches = {{0, 1, 0.005, 0.05}};
  s.ipcs = {{"IPC1", 1, 0, 300}, {"IPC2", 3, 1, 300}};
  s.generators = {{"G1", 1, true}, {"G2", 3, true}};
  s.loads = {{"L1", 1, 0.98}, {"L2", 3, 0.98}};
  s.thevenins = {{"TH1", 0, 0.02, 0.2, 1.0}, {"TH2", 2, 0.02, 0.2, 1.0}};
  s.ranges.generators = {{10, 100, 0.8, 0.95}, {10, 100, 0.8, 0.95}};
  s.ranges.demand_min_mw = 50;
  s.ranges.demand_max_mw = 200;
  s.ranges.load_base_share = {0.5, 0.5};
  return s;
}

}  // namespace fixtures

namespace fixtures {

// Uniform random operating point inside the ranges (shares projected).
template <class Rng>
acdc::grid::OperatingPoint random_op(const acdc::grid::GridTopology& t, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto& r = t.ranges();
  acdc::grid::OperatingPoint op;
  for (const auto& g : r.generators)
    op.generators.push_back({g.p_min_mw + u(rng) * (g.p_max_mw - g.p_min_mw),
                             g.cos_phi_min + u(rng) * (g.cos_phi_max - g.cos_phi_min)});
  op.demand_mw = r.demand_min_mw + u(rng) * (r.demand_max_mw - r.demand_min_mw);
  std::vector<double> raw;
  for (double b : r.load_base_share) raw.push_back(b * (1.0 + r.share_band * (2.0 * u(rng) - 1.0)));
  op.load_shares = acdc::grid::project_shares(raw, r.load_base_share, r.share_band);
  return op;
}

}  // namespace fixtures
