#include "acdc/grid/topology.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "acdc/common/error.hpp"

namespace acdc::grid {

namespace {

using nlohmann::json;

void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidInput("topology: " + msg);
}

// Union-find connectivity check over a bus subset.
bool connected(const std::vector<std::size_t>& nodes,
               const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  if (nodes.size() <= 1) return true;
  std::map<std::size_t, std::size_t> parent;
  for (auto n : nodes) parent[n] = n;
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto [a, b] : edges)
    if (parent.count(a) && parent.count(b)) parent[find(a)] = find(b);
  const auto root = find(nodes.front());
  for (auto n : nodes)
    if (find(n) != root) return false;
  return true;
}

struct ParamField {
  const char* key;
  double ModelParameters::*member;
};

constexpr ParamField kParamFields[] = {
    {"base_mva", &ModelParameters::base_mva},
    {"f0_hz", &ModelParameters::f0_hz},
    {"r_arm", &ModelParameters::r_arm},
    {"l_arm", &ModelParameters::l_arm},
    {"dc_droop", &ModelParameters::dc_droop},
    {"v_dc0", &ModelParameters::v_dc0},
    {"gfm_freq_droop", &ModelParameters::gfm_freq_droop},
    {"gfm_filter_tau", &ModelParameters::gfm_filter_tau},
    {"gfm_voltage_tau", &ModelParameters::gfm_voltage_tau},
    {"gfm_voltage_gain", &ModelParameters::gfm_voltage_gain},
    {"dc_power_tau", &ModelParameters::dc_power_tau},
    {"dc_energy_tau", &ModelParameters::dc_energy_tau},
    {"pll_zeta", &ModelParameters::pll_zeta},
    {"pll_wn", &ModelParameters::pll_wn},
    {"current_tau", &ModelParameters::current_tau},
    {"thevenin_governor_tau", &ModelParameters::thevenin_governor_tau},
    {"thevenin_droop", &ModelParameters::thevenin_droop},
    {"generator_r", &ModelParameters::generator_r},
    {"generator_x", &ModelParameters::generator_x},
};

}  // namespace

GridTopology::GridTopology(TopologySpec spec) : spec_(std::move(spec)) {
  const auto& s = spec_;
  require(!s.ac_subgrid_ids.empty(), "at least one AC subgrid is required");
  require(!s.ipcs.empty(), "at least one IPC is required");
  {
    std::set<std::string> ids;
    for (const auto& b : s.ac_buses) require(ids.insert(b.id).second, "duplicate bus id " + b.id);
    for (const auto& b : s.dc_buses) require(ids.insert(b.id).second, "duplicate bus id " + b.id);
  }
  ac_subgrids_.resize(s.ac_subgrid_ids.size());
  dc_subgrids_.resize(s.dc_subgrid_ids.size());
  for (std::size_t i = 0; i < ac_subgrids_.size(); ++i) ac_subgrids_[i].id = s.ac_subgrid_ids[i];
  for (std::size_t i = 0; i < dc_subgrids_.size(); ++i) dc_subgrids_[i].id = s.dc_subgrid_ids[i];

  for (std::size_t i = 0; i < s.ac_buses.size(); ++i) {
    require(s.ac_buses[i].subgrid < ac_subgrids_.size(), "AC bus " + s.ac_buses[i].id + " has no subgrid");
    require(s.ac_buses[i].kv > 0.0, "AC bus " + s.ac_buses[i].id + " needs a positive kV");
    ac_subgrids_[s.ac_buses[i].subgrid].buses.push_back(i);
  }
  for (std::size_t i = 0; i < s.dc_buses.size(); ++i) {
    require(s.dc_buses[i].subgrid < dc_subgrids_.size(), "DC bus " + s.dc_buses[i].id + " has no subgrid");
    require(s.dc_buses[i].kv > 0.0, "DC bus " + s.dc_buses[i].id + " needs a positive kV");
    require(s.dc_buses[i].energy_constant_s > 0.0, "DC bus " + s.dc_buses[i].id + " needs capacitance");
    dc_subgrids_[s.dc_buses[i].subgrid].buses.push_back(i);
  }
  for (const auto& sg : ac_subgrids_) require(!sg.buses.empty(), "AC subgrid " + sg.id + " has no buses");
  for (const auto& sg : dc_subgrids_) require(!sg.buses.empty(), "DC subgrid " + sg.id + " has no buses");

  std::vector<std::pair<std::size_t, std::size_t>> ac_edges, dc_edges;
  for (const auto& br : s.ac_branches) {
    require(br.from < s.ac_buses.size() && br.to < s.ac_buses.size() && br.from != br.to, "bad AC branch");
    require(s.ac_buses[br.from].subgrid == s.ac_buses[br.to].subgrid, "AC branch crosses subgrids");
    require(br.r >= 0.0 && (br.r > 0.0 || br.x != 0.0), "AC branch needs a nonzero impedance");
    ac_edges.emplace_back(br.from, br.to);
  }
  for (const auto& br : s.dc_branches) {
    require(br.from < s.dc_buses.size() && br.to < s.dc_buses.size() && br.from != br.to, "bad DC branch");
    require(s.dc_buses[br.from].subgrid == s.dc_buses[br.to].subgrid, "DC branch crosses subgrids");
    require(br.r > 0.0 && br.l >= 0.0, "DC branch needs positive resistance");
    dc_edges.emplace_back(br.from, br.to);
  }
  for (const auto& sg : ac_subgrids_) require(connected(sg.buses, ac_edges), "AC subgrid " + sg.id + " is not connected");
  for (const auto& sg : dc_subgrids_) require(connected(sg.buses, dc_edges), "DC subgrid " + sg.id + " is not connected");

  for (std::size_t i = 0; i < s.generators.size(); ++i) {
    require(s.generators[i].bus < s.ac_buses.size(), "generator " + s.generators[i].id + " on unknown bus");
    ac_subgrids_[s.ac_buses[s.generators[i].bus].subgrid].generators.push_back(i);
  }
  for (std::size_t i = 0; i < s.loads.size(); ++i) {
    require(s.loads[i].bus < s.ac_buses.size(), "load " + s.loads[i].id + " on unknown bus");
    require(s.loads[i].power_factor > 0.0 && s.loads[i].power_factor <= 1.0, "load power factor outside (0, 1]");
    ac_subgrids_[s.ac_buses[s.loads[i].bus].subgrid].loads.push_back(i);
  }
  for (std::size_t i = 0; i < s.thevenins.size(); ++i) {
    const auto& th = s.thevenins[i];
    require(th.bus < s.ac_buses.size(), "Thevenin " + th.id + " on unknown bus");
    require(th.x > 0.0 && th.r >= 0.0 && th.emf > 0.0, "Thevenin " + th.id + " has invalid parameters");
    auto& sg = ac_subgrids_[s.ac_buses[th.bus].subgrid];
    require(sg.thevenins.empty(), "AC subgrid " + sg.id + " has more than one Thevenin equivalent");
    sg.thevenins.push_back(i);
  }
  {
    std::set<std::size_t> used_ac, used_dc;
    for (std::size_t i = 0; i < s.ipcs.size(); ++i) {
      const auto& ipc = s.ipcs[i];
      require(ipc.ac_bus < s.ac_buses.size(), "IPC " + ipc.id + " has no AC terminal");
      require(ipc.dc_bus < s.dc_buses.size(), "IPC " + ipc.id + " has no DC terminal");
      require(ipc.rating_mw > 0.0, "IPC " + ipc.id + " needs a positive rating");
      require(used_ac.insert(ipc.ac_bus).second, "two IPCs share AC bus " + s.ac_buses[ipc.ac_bus].id);
      require(used_dc.insert(ipc.dc_bus).second, "two IPCs share DC bus " + s.dc_buses[ipc.dc_bus].id);
      ac_subgrids_[s.ac_buses[ipc.ac_bus].subgrid].ipcs.push_back(i);
      dc_subgrids_[s.dc_buses[ipc.dc_bus].subgrid].ipcs.push_back(i);
    }
  }
  for (const auto& sg : dc_subgrids_) require(!sg.ipcs.empty(), "DC subgrid " + sg.id + " has no IPC terminal");

  require(s.ranges.generators.size() == s.generators.size(), "operating ranges must list every generator");
  require(s.ranges.load_base_share.size() == s.loads.size(), "operating ranges must list every load");
  try {
    s.ranges.validate();
  } catch (const InvalidInput& e) {
    throw InvalidInput(std::string("topology: ") + e.what());
  }
  require(s.parameters.base_mva > 0.0 && s.parameters.f0_hz > 0.0, "invalid base quantities");
}

std::size_t GridTopology::ac_bus_index(std::string_view id) const {
  for (std::size_t i = 0; i < spec_.ac_buses.size(); ++i)
    if (spec_.ac_buses[i].id == id) return i;
  throw InvalidInput("unknown AC bus '" + std::string(id) + "'");
}

std::size_t GridTopology::dc_bus_index(std::string_view id) const {
  for (std::size_t i = 0; i < spec_.dc_buses.size(); ++i)
    if (spec_.dc_buses[i].id == id) return i;
  throw InvalidInput("unknown DC bus '" + std::string(id) + "'");
}

std::size_t GridTopology::ipc_index(std::string_view id) const {
  for (std::size_t i = 0; i < spec_.ipcs.size(); ++i)
    if (spec_.ipcs[i].id == id) return i;
  throw InvalidInput("unknown IPC '" + std::string(id) + "'");
}

GridTopology topology_from_json(const json& doc) {
  TopologySpec s;
  try {
    const int schema = doc.at("schema").get<int>();
    if (schema != kGridSchemaVersion)
      throw InvalidInput("unsupported grid schema version " + std::to_string(schema));
    s.name = doc.value("name", std::string("grid"));

    if (doc.contains("parameters")) {
      const auto& p = doc["parameters"];
      for (auto it = p.begin(); it != p.end(); ++it) {
        bool known = false;
        for (const auto& f : kParamFields)
          if (it.key() == f.key) {
            s.parameters.*(f.member) = it.value().get<double>();
            known = true;
          }
        if (!known) throw InvalidInput("topology: unknown parameter '" + it.key() + "'");
      }
    }

    std::map<std::string, std::size_t> ac_idx, dc_idx;
    for (const auto& sg : doc.at("ac_subgrids")) {
      const std::size_t k = s.ac_subgrid_ids.size();
      s.ac_subgrid_ids.push_back(sg.at("id").get<std::string>());
      for (const auto& b : sg.at("buses")) {
        ac_idx[b.at("id").get<std::string>()] = s.ac_buses.size();
        s.ac_buses.push_back({b.at("id").get<std::string>(), b.at("kv").get<double>(), k});
      }
    }
    for (const auto& sg : doc.at("dc_subgrids")) {
      const std::size_t k = s.dc_subgrid_ids.size();
      s.dc_subgrid_ids.push_back(sg.at("id").get<std::string>());
      for (const auto& b : sg.at("buses")) {
        dc_idx[b.at("id").get<std::string>()] = s.dc_buses.size();
        s.dc_buses.push_back({b.at("id").get<std::string>(), b.at("kv").get<double>(), k,
                              b.value("energy_constant_s", 0.1)});
      }
    }
    auto ac_bus = [&](const json& j) {
      const auto id = j.get<std::string>();
      auto it = ac_idx.find(id);
      if (it == ac_idx.end()) throw InvalidInput("topology: unknown AC bus '" + id + "'");
      return it->second;
    };
    auto dc_bus = [&](const json& j) {
      const auto id = j.get<std::string>();
      auto it = dc_idx.find(id);
      if (it == dc_idx.end()) throw InvalidInput("topology: unknown DC bus '" + id + "'");
      return it->second;
    };
    for (const auto& sg : doc.at("ac_subgrids")) {
      for (const auto& g : sg.value("generators", json::array()))
        s.generators.push_back({g.at("id").get<std::string>(), ac_bus(g.at("bus")), g.value("renewable", true)});
      for (const auto& l : sg.value("loads", json::array()))
        s.loads.push_back({l.at("id").get<std::string>(), ac_bus(l.at("bus")), l.value("power_factor", 0.98)});
      for (const auto& t : sg.value("thevenins", json::array())) {
        // Impedance may be given on the equivalent's own rating.
        const double to_system = s.parameters.base_mva / t.value("mva_base", s.parameters.base_mva);
        s.thevenins.push_back({t.at("id").get<std::string>(), ac_bus(t.at("bus")), t.value("r", 0.02) * to_system,
                               t.value("x", 0.2) * to_system, t.value("emf", 1.0)});
      }
    }
    for (const auto& p : doc.at("ipcs"))
      s.ipcs.push_back({p.at("id").get<std::string>(), ac_bus(p.at("ac_bus")), dc_bus(p.at("dc_bus")),
                        p.value("rating_mw", 300.0)});
    for (const auto& br : doc.at("branches")) {
      const auto from = br.at("from").get<std::string>();
      if (ac_idx.count(from))
        s.ac_branches.push_back({ac_bus(br.at("from")), ac_bus(br.at("to")), br.at("r").get<double>(),
                                 br.at("x").get<double>()});
      else
        s.dc_branches.push_back({dc_bus(br.at("from")), dc_bus(br.at("to")), br.at("r").get<double>(),
                                 br.value("l", 0.0)});
    }

    const auto& r = doc.at("operating_ranges");
    std::map<std::string, GeneratorRange> gen_ranges;
    for (const auto& g : r.at("generators"))
      gen_ranges[g.at("id").get<std::string>()] = {g.at("p_min_mw").get<double>(), g.at("p_max_mw").get<double>(),
                                                   g.at("cos_phi_min").get<double>(), g.at("cos_phi_max").get<double>()};
    for (const auto& g : s.generators) {
      auto it = gen_ranges.find(g.id);
      if (it == gen_ranges.end()) throw InvalidInput("topology: no operating range for generator " + g.id);
      s.ranges.generators.push_back(it->second);
    }
    s.ranges.demand_min_mw = r.at("demand_mw").at("min").get<double>();
    s.ranges.demand_max_mw = r.at("demand_mw").at("max").get<double>();
    std::map<std::string, double> shares;
    for (const auto& l : r.at("loads")) shares[l.at("id").get<std::string>()] = l.at("base_share").get<double>();
    for (const auto& l : s.loads) {
      auto it = shares.find(l.id);
      if (it == shares.end()) throw InvalidInput("topology: no base share for load " + l.id);
      s.ranges.load_base_share.push_back(it->second);
    }
    s.ranges.share_band = r.value("share_band", 0.3);

  } catch (const json::exception& e) {
    throw InvalidInput(std::string("topology: malformed grid description: ") + e.what());
  }
  return GridTopology(std::move(s));
}

json topology_to_json(const GridTopology& t) {
  const auto& s = t.spec();
  json doc{{"schema", kGridSchemaVersion}, {"name", s.name}};
  json acs = json::array();
  for (const auto& sg : t.ac_subgrids()) {
    json j{{"id", sg.id}, {"buses", json::array()}, {"generators", json::array()}, {"loads", json::array()},
           {"thevenins", json::array()}};
    for (auto b : sg.buses) j["buses"].push_back({{"id", s.ac_buses[b].id}, {"kv", s.ac_buses[b].kv}});
    for (auto g : sg.generators)
      j["generators"].push_back({{"id", s.generators[g].id}, {"bus", s.ac_buses[s.generators[g].bus].id},
                                 {"renewable", s.generators[g].renewable}});
    for (auto l : sg.loads)
      j["loads"].push_back({{"id", s.loads[l].id}, {"bus", s.ac_buses[s.loads[l].bus].id},
                            {"power_factor", s.loads[l].power_factor}});
    for (auto h : sg.thevenins) {
      const auto& th = s.thevenins[h];
      j["thevenins"].push_back({{"id", th.id}, {"bus", s.ac_buses[th.bus].id}, {"r", th.r}, {"x", th.x}, {"emf", th.emf}});
    }
    acs.push_back(j);
  }
  doc["ac_subgrids"] = acs;
  json dcs = json::array();
  for (const auto& sg : t.dc_subgrids()) {
    json j{{"id", sg.id}, {"buses", json::array()}};
    for (auto b : sg.buses)
      j["buses"].push_back({{"id", s.dc_buses[b].id}, {"kv", s.dc_buses[b].kv},
                            {"energy_constant_s", s.dc_buses[b].energy_constant_s}});
    dcs.push_back(j);
  }
  doc["dc_subgrids"] = dcs;
  json ipcs = json::array();
  for (const auto& p : s.ipcs)
    ipcs.push_back({{"id", p.id}, {"ac_bus", s.ac_buses[p.ac_bus].id}, {"dc_bus", s.dc_buses[p.dc_bus].id},
                    {"rating_mw", p.rating_mw}});
  doc["ipcs"] = ipcs;
  json branches = json::array();
  for (const auto& b : s.ac_branches)
    branches.push_back({{"from", s.ac_buses[b.from].id}, {"to", s.ac_buses[b.to].id}, {"r", b.r}, {"x", b.x}});
  for (const auto& b : s.dc_branches)
    branches.push_back({{"from", s.dc_buses[b.from].id}, {"to", s.dc_buses[b.to].id}, {"r", b.r}, {"l", b.l}});
  doc["branches"] = branches;
  json gens = json::array();
  for (std::size_t i = 0; i < s.generators.size(); ++i) {
    const auto& g = s.ranges.generators[i];
    gens.push_back({{"id", s.generators[i].id}, {"p_min_mw", g.p_min_mw}, {"p_max_mw", g.p_max_mw},
                    {"cos_phi_min", g.cos_phi_min}, {"cos_phi_max", g.cos_phi_max}});
  }
  json loads = json::array();
  for (std::size_t i = 0; i < s.loads.size(); ++i)
    loads.push_back({{"id", s.loads[i].id}, {"base_share", s.ranges.load_base_share[i]}});
  doc["operating_ranges"] = {{"generators", gens},
                             {"demand_mw", {{"min", s.ranges.demand_min_mw}, {"max", s.ranges.demand_max_mw}}},
                             {"loads", loads},
                             {"share_band", s.ranges.share_band}};
  json params = json::object();
  for (const auto& f : kParamFields) params[f.key] = s.parameters.*(f.member);
  doc["parameters"] = params;
  return doc;
}

GridTopology load_topology(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open grid file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw InvalidInput("grid file " + path.string() + " is not valid JSON: " + e.what());
  }
  return topology_from_json(doc);
}

GridTopology default_topology() { return topology_from_json(json::parse(default_topology_json())); }

GridTopology resolve_topology(std::string_view path_or_default) {
  if (path_or_default.empty() || path_or_default == "default") return default_topology();
  return load_topology(std::filesystem::path(path_or_default));
}

}  // namespace acdc::grid
