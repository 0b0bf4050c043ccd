#include "acdc/powerflow/features.hpp"

#include "acdc/common/error.hpp"

namespace acdc::powerflow {

std::string_view kind_name(FeatureKind kind) noexcept {
  switch (kind) {
    case FeatureKind::power: return "power";
    case FeatureKind::current: return "current";
    case FeatureKind::ac_voltage: return "ac_voltage";
    case FeatureKind::dc_voltage: return "dc_voltage";
    case FeatureKind::angle: return "angle";
    case FeatureKind::flag: return "flag";
    case FeatureKind::categorical: return "categorical";
  }
  return "?";
}

FeatureKind parse_kind(std::string_view name) {
  for (auto k : {FeatureKind::power, FeatureKind::current, FeatureKind::ac_voltage, FeatureKind::dc_voltage,
                 FeatureKind::angle, FeatureKind::flag, FeatureKind::categorical})
    if (kind_name(k) == name) return k;
  throw InvalidInput("unknown feature kind '" + std::string(name) + "'");
}

std::string_view group_name(ElementGroup group) noexcept {
  switch (group) {
    case ElementGroup::bus: return "bus";
    case ElementGroup::generator: return "generator";
    case ElementGroup::load: return "load";
    case ElementGroup::thevenin: return "thevenin";
    case ElementGroup::ipc: return "ipc";
  }
  return "?";
}

ElementGroup parse_group(std::string_view name) {
  for (auto g : {ElementGroup::bus, ElementGroup::generator, ElementGroup::load, ElementGroup::thevenin,
                 ElementGroup::ipc})
    if (group_name(g) == name) return g;
  throw InvalidInput("unknown element group '" + std::string(name) + "'");
}

std::vector<ColumnInfo> feature_columns(const grid::GridTopology& t) {
  std::vector<ColumnInfo> cols;
  ElementGroup group = ElementGroup::bus;
  auto add = [&](std::string quantity, const std::string& id, FeatureKind kind, const std::string& node,
                 const std::string& element) {
    cols.push_back({quantity + "_" + id, kind, node, element, std::move(quantity), group});
  };
  for (const auto& b : t.ac_buses()) {
    add("V", b.id, FeatureKind::ac_voltage, b.id, "");
    add("theta", b.id, FeatureKind::angle, b.id, "");
  }
  for (const auto& b : t.dc_buses()) add("Vdc", b.id, FeatureKind::dc_voltage, b.id, "");
  group = ElementGroup::generator;
  for (const auto& g : t.generators()) {
    add("P", g.id, FeatureKind::power, t.ac_buses()[g.bus].id, g.id);
    add("Q", g.id, FeatureKind::power, t.ac_buses()[g.bus].id, g.id);
  }
  group = ElementGroup::load;
  for (const auto& l : t.loads()) {
    add("P", l.id, FeatureKind::power, t.ac_buses()[l.bus].id, l.id);
    add("Q", l.id, FeatureKind::power, t.ac_buses()[l.bus].id, l.id);
  }
  group = ElementGroup::thevenin;
  for (const auto& th : t.thevenins()) {
    add("P", th.id, FeatureKind::power, t.ac_buses()[th.bus].id, th.id);
    add("Q", th.id, FeatureKind::power, t.ac_buses()[th.bus].id, th.id);
  }
  group = ElementGroup::ipc;
  for (const auto& p : t.ipcs()) {
    add("P", p.id, FeatureKind::power, p.id, p.id);
    add("Q", p.id, FeatureKind::power, p.id, p.id);
    add("Pdc", p.id, FeatureKind::power, p.id, p.id);
  }
  for (const auto& p : t.ipcs()) {
    add("VAC", p.id, FeatureKind::ac_voltage, p.id, p.id);
    add("thVAC", p.id, FeatureKind::angle, p.id, p.id);
    add("Vdiff", p.id, FeatureKind::ac_voltage, p.id, p.id);
    add("thVdiff", p.id, FeatureKind::angle, p.id, p.id);
    add("Vsum", p.id, FeatureKind::dc_voltage, p.id, p.id);
    add("thVsum", p.id, FeatureKind::angle, p.id, p.id);
    add("Idiff", p.id, FeatureKind::current, p.id, p.id);
    add("thIdiff", p.id, FeatureKind::angle, p.id, p.id);
    add("Isum", p.id, FeatureKind::current, p.id, p.id);
    add("thIsum", p.id, FeatureKind::angle, p.id, p.id);
  }
  return cols;
}

FeatureRow extract_feature_vector(const grid::GridTopology& t, const PowerFlowSolution& pf,
                                  const std::vector<IpcInternals>& internals) {
  if (pf.v_ac.size() != t.ac_buses().size() || pf.v_dc.size() != t.dc_buses().size() ||
      pf.ipcs.size() != t.ipc_count() || internals.size() != t.ipc_count())
    throw InvalidInput("power-flow solution does not match topology");
  FeatureRow row;
  row.columns = feature_columns(t);
  auto& v = row.values;
  v.reserve(row.columns.size());
  for (std::size_t i = 0; i < pf.v_ac.size(); ++i) {
    v.push_back(pf.v_ac[i]);
    v.push_back(pf.theta_ac[i]);
  }
  for (double x : pf.v_dc) v.push_back(x);
  for (const auto* group : {&pf.generators, &pf.loads, &pf.thevenins})
    for (const auto& e : *group) {
      v.push_back(e.p_mw);
      v.push_back(e.q_mvar);
    }
  for (const auto& f : pf.ipcs) {
    v.push_back(f.p_ac_mw);
    v.push_back(f.q_ac_mvar);
    v.push_back(f.p_dc_mw);
  }
  for (const auto& q : internals) {
    for (double x : {q.v_ac, q.theta_v_ac, q.v_diff, q.theta_v_diff, q.v_sum, q.theta_v_sum, q.i_diff,
                     q.theta_i_diff, q.i_sum, q.theta_i_sum})
      v.push_back(x);
  }
  return row;
}

}  // namespace acdc::powerflow
