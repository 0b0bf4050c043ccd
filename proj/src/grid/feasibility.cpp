#include "acdc/grid/feasibility.hpp"

#include "acdc/common/error.hpp"

namespace acdc::grid {

std::vector<Ccrc> enumerate_all_ccrcs(const GridTopology& topology) {
  const std::size_t n = topology.ipc_count();
  if (n == 0) throw InvalidInput("topology has no IPCs");
  const auto total = ccrc_count(n);
  std::vector<Ccrc> out;
  out.reserve(total);
  for (std::uint64_t id = 0; id < total; ++id) out.push_back(Ccrc::from_id(static_cast<CcrcId>(id), n));
  return out;
}

bool is_feasible(const GridTopology& topology, const Ccrc& ccrc) {
  if (ccrc.size() != topology.ipc_count())
    throw InvalidInput("CCRC has " + std::to_string(ccrc.size()) + " roles, topology has " +
                       std::to_string(topology.ipc_count()) + " IPCs");
  for (const auto& sg : topology.ac_subgrids()) {
    bool formed = !sg.thevenins.empty();
    for (std::size_t k : sg.ipcs) formed = formed || ccrc.role(k) == ControlRole::ac_gfm;
    if (!formed) return false;
  }
  for (const auto& sg : topology.dc_subgrids()) {
    bool formed = false;
    for (std::size_t k : sg.ipcs) formed = formed || ccrc.role(k) == ControlRole::dc_gfm;
    if (!formed) return false;
  }
  return true;
}

std::vector<Ccrc> feasible_ccrcs(const GridTopology& topology) {
  std::vector<Ccrc> out;
  for (auto& c : enumerate_all_ccrcs(topology))
    if (is_feasible(topology, c)) out.push_back(std::move(c));
  return out;
}

}  // namespace acdc::grid
