#pragma once

#include <vector>

#include "acdc/grid/ccrc.hpp"
#include "acdc/grid/topology.hpp"

namespace acdc::grid {

// All 3^n configurations in id order.
std::vector<Ccrc> enumerate_all_ccrcs(const GridTopology& topology);

// Every AC subgrid needs an AC-forming unit (Thevenin or AC-GFM IPC) and
// every DC subgrid needs a DC-GFM IPC.
bool is_feasible(const GridTopology& topology, const Ccrc& ccrc);

std::vector<Ccrc> feasible_ccrcs(const GridTopology& topology);

}  // namespace acdc::grid
