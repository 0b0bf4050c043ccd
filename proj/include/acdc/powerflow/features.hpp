#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "acdc/grid/topology.hpp"
#include "acdc/powerflow/internals.hpp"
#include "acdc/powerflow/solution.hpp"

namespace acdc::powerflow {

enum class FeatureKind { power, current, ac_voltage, dc_voltage, angle, flag, categorical };

std::string_view kind_name(FeatureKind kind) noexcept;
FeatureKind parse_kind(std::string_view name);

enum class ElementGroup { bus, generator, load, thevenin, ipc };

std::string_view group_name(ElementGroup group) noexcept;
ElementGroup parse_group(std::string_view name);

struct ColumnInfo {
  std::string name;
  FeatureKind kind = FeatureKind::power;
  std::string node;      // bus id, or IPC id for converter quantities
  std::string element;   // generator / load / Thevenin / IPC id, empty for bus quantities
  std::string quantity;  // P, Q, S, Pdc, V, theta, Vdc, VAC, ..., dir
  ElementGroup group = ElementGroup::bus;
};

struct FeatureRow {
  std::vector<ColumnInfo> columns;
  std::vector<double> values;
};

// Column layout (stable):
//   per AC bus   V_<bus>, theta_<bus>
//   per DC bus   Vdc_<bus>
//   per element  P_<id>, Q_<id>       generators, loads, Thevenins (MW / Mvar)
//   per IPC      P_<id>, Q_<id>, Pdc_<id>
//   per IPC      VAC_<id>, thVAC_<id>, Vdiff_<id>, thVdiff_<id>, Vsum_<id>, thVsum_<id>,
//                Idiff_<id>, thIdiff_<id>, Isum_<id>, thIsum_<id>
std::vector<ColumnInfo> feature_columns(const grid::GridTopology& topology);

FeatureRow extract_feature_vector(const grid::GridTopology& topology, const PowerFlowSolution& pf,
                                  const std::vector<IpcInternals>& internals);

}  // namespace acdc::powerflow
