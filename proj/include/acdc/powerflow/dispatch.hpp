#pragma once

#include <vector>

#include "acdc/grid/operating_point.hpp"
#include "acdc/grid/topology.hpp"

namespace acdc::powerflow {

// AC-to-DC transfer schedule (MW, positive = rectifier) for every IPC.
//
// AC subgrids without a Thevenin export their whole surplus through their
// IPCs; every DC subgrid is balanced (transfers sum to zero); among the
// remaining choices the Thevenin imports of the backed subgrids are made as
// equal as possible, and what is left free is split in proportion to IPC
// ratings (minimum rating-weighted norm). Results are clamped to ratings.
//
// If the operating point already carries a schedule it is returned as is.
std::vector<double> dispatch_ipcs(const grid::GridTopology& topology, const grid::OperatingPoint& op);

}  // namespace acdc::powerflow
