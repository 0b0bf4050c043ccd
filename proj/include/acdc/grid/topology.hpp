#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "acdc/grid/operating_point.hpp"

namespace acdc::grid {

// Representative reduced-order dynamic constants shared by the power-flow and
// small-signal models. All per-unit values are on the system MVA base.
struct ModelParameters {
  double base_mva = 100.0;
  double f0_hz = 50.0;

  double r_arm = 0.01;  // MMC arm resistance
  double l_arm = 0.08;  // MMC arm reactance

  double dc_droop = 0.05;  // k_d, V_dc = V_dc0 - k_d (P - P*)
  double v_dc0 = 1.0;

  double gfm_freq_droop = 0.02;   // m_p
  double gfm_filter_tau = 0.05;   // power measurement filter [s]
  double gfm_voltage_tau = 0.02;  // voltage magnitude loop [s]
  double gfm_voltage_gain = 2.0;

  double dc_power_tau = 0.01;   // DC-GFM power loop [s]
  double dc_energy_tau = 0.01;  // DC-side power lag of GFL / AC-GFM converters [s]

  double pll_zeta = 0.7;
  double pll_wn = 2.0 * 3.14159265358979323846 * 10.0;  // rad/s
  double current_tau = 0.005;                           // inner current loop [s]

  double thevenin_governor_tau = 0.5;  // [s]
  double thevenin_droop = 0.005;       // p.u. frequency per p.u. power

  double generator_r = 0.01;  // coupling impedance of GFL-interfaced plants
  double generator_x = 0.10;

  double omega_base() const noexcept { return 2.0 * 3.14159265358979323846 * f0_hz; }
};

struct AcBus {
  std::string id;
  double kv = 0.0;
  std::size_t subgrid = 0;
};

struct DcBus {
  std::string id;
  double kv = 0.0;
  std::size_t subgrid = 0;
  double energy_constant_s = 0.1;  // H_C; capacitance = 2 H_C in p.u.
};

struct AcBranch {
  std::size_t from = 0, to = 0;  // AC bus indices
  double r = 0.0, x = 0.0;
};

struct DcBranch {
  std::size_t from = 0, to = 0;  // DC bus indices
  double r = 0.0, l = 0.0;       // l in p.u. (time constant l / (omega_b r))
};

// Renewable / conventional plant interfaced through a grid-following converter.
struct Generator {
  std::string id;
  std::size_t bus = 0;
  bool renewable = true;
};

struct Load {
  std::string id;
  std::size_t bus = 0;
  double power_factor = 0.98;
};

// Stiff external grid: fixed EMF behind r + jx (system base; the file may give
// them on the equivalent's own "mva_base"). Always an AC-forming unit.
struct Thevenin {
  std::string id;
  std::size_t bus = 0;
  double r = 0.02, x = 0.2, emf = 1.0;
};

struct Ipc {
  std::string id;
  std::size_t ac_bus = 0;
  std::size_t dc_bus = 0;
  double rating_mw = 300.0;
};

struct AcSubgrid {
  std::string id;
  std::vector<std::size_t> buses, generators, loads, thevenins, ipcs;
};

struct DcSubgrid {
  std::string id;
  std::vector<std::size_t> buses, ipcs;
};

// Mutable description used to build a GridTopology.
struct TopologySpec {
  std::string name;
  std::vector<std::string> ac_subgrid_ids;
  std::vector<std::string> dc_subgrid_ids;
  std::vector<AcBus> ac_buses;
  std::vector<DcBus> dc_buses;
  std::vector<AcBranch> ac_branches;
  std::vector<DcBranch> dc_branches;
  std::vector<Generator> generators;
  std::vector<Load> loads;
  std::vector<Thevenin> thevenins;
  std::vector<Ipc> ipcs;
  OperatingRanges ranges;
  ModelParameters parameters;
};

// Validated, immutable hybrid AC/DC network.
//
// Invariants checked at construction: every bus belongs to exactly one
// subgrid, each subgrid's branch graph is connected, every IPC joins one AC
// bus to one DC bus, at most one Thevenin per AC subgrid, ranges consistent
// with the element lists.
class GridTopology {
 public:
  explicit GridTopology(TopologySpec spec);

  const std::string& name() const noexcept { return spec_.name; }
  const std::vector<AcSubgrid>& ac_subgrids() const noexcept { return ac_subgrids_; }
  const std::vector<DcSubgrid>& dc_subgrids() const noexcept { return dc_subgrids_; }
  const std::vector<AcBus>& ac_buses() const noexcept { return spec_.ac_buses; }
  const std::vector<DcBus>& dc_buses() const noexcept { return spec_.dc_buses; }
  const std::vector<AcBranch>& ac_branches() const noexcept { return spec_.ac_branches; }
  const std::vector<DcBranch>& dc_branches() const noexcept { return spec_.dc_branches; }
  const std::vector<Generator>& generators() const noexcept { return spec_.generators; }
  const std::vector<Load>& loads() const noexcept { return spec_.loads; }
  const std::vector<Thevenin>& thevenins() const noexcept { return spec_.thevenins; }
  const std::vector<Ipc>& ipcs() const noexcept { return spec_.ipcs; }
  const OperatingRanges& ranges() const noexcept { return spec_.ranges; }
  const ModelParameters& parameters() const noexcept { return spec_.parameters; }
  const TopologySpec& spec() const noexcept { return spec_; }

  std::size_t ipc_count() const noexcept { return spec_.ipcs.size(); }
  std::size_t ac_bus_index(std::string_view id) const;
  std::size_t dc_bus_index(std::string_view id) const;
  std::size_t ipc_index(std::string_view id) const;

 private:
  TopologySpec spec_;
  std::vector<AcSubgrid> ac_subgrids_;
  std::vector<DcSubgrid> dc_subgrids_;
};

inline constexpr int kGridSchemaVersion = 1;

GridTopology topology_from_json(const nlohmann::json& doc);
nlohmann::json topology_to_json(const GridTopology& topology);
GridTopology load_topology(const std::filesystem::path& path);
// "default" (or empty) resolves to the bundled six-IPC test system.
GridTopology resolve_topology(std::string_view path_or_default);
GridTopology default_topology();
std::string_view default_topology_json() noexcept;

}  // namespace acdc::grid
