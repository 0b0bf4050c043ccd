#include "acdc/reduction/performance_map.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "acdc/common/csv.hpp"
#include "acdc/common/error.hpp"
#include "acdc/common/parallel.hpp"
#include "acdc/dataforge/engineering.hpp"
#include "acdc/dataforge/exact.hpp"

namespace acdc::reduction {

std::size_t indicator_index(DatasetRole role) {
  for (std::size_t i = 0; i < 4; ++i)
    if (dataforge::kIndicatorRoles[i] == role) return i;
  throw InvalidInput("indicator_index: D_Y is not an indicator");
}

IndicatorTable build_indicator_table(const grid::GridTopology& topology, const std::vector<grid::Ccrc>& ccrcs,
                                     const std::vector<grid::OperatingPoint>& ops) {
  IndicatorTable t;
  t.ops = ops;
  for (const auto& c : ccrcs) t.ccrcs.push_back(c.id());
  const std::size_t n = ops.size();
  t.samples.resize(ccrcs.size() * n);
  parallel_for(t.samples.size(), [&](std::size_t k) {
    const auto c = k / n, o = k % n;
    const auto ev = dataforge::evaluate_exact(topology, ops[o], ccrcs[c]);
    auto& s = t.samples[k];
    s.ccrc = ccrcs[c].id();
    s.op = o;
    s.stable = ev.stable() && ev.indicators.complete();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const auto& ind = ev.indicators;
    s.values = s.stable ? std::array<double, 4>{*ind.h2_f, *ind.h2_vdc, *ind.k_f, *ind.k_vdc}
                        : std::array<double, 4>{nan, nan, nan, nan};
  });
  return t;
}

void save_indicator_table(const IndicatorTable& table, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json ops = nlohmann::json::array();
  for (const auto& op : table.ops) ops.push_back(grid::operating_point_to_json(op));
  std::ofstream out(dir / "ops.json");
  if (!out) throw IoError("cannot write " + (dir / "ops.json").string());
  out << ops.dump(1) << "\n";
  CsvTable csv;
  csv.header = {"ccrc", "op", "stable"};
  for (auto r : dataforge::kIndicatorRoles) csv.header.emplace_back(dataforge::target_name(r));
  for (const auto& s : table.samples) {
    std::vector<std::string> row = {std::to_string(s.ccrc), std::to_string(s.op), s.stable ? "1" : "0"};
    for (double v : s.values) row.push_back(std::isnan(v) ? "" : format_number(v));
    csv.rows.push_back(std::move(row));
  }
  write_csv(dir / "indicators.csv", csv);
}

IndicatorTable load_indicator_table(const std::filesystem::path& dir) {
  IndicatorTable t;
  std::ifstream in(dir / "ops.json");
  if (!in) throw IoError("cannot read " + (dir / "ops.json").string());
  try {
    for (const auto& j : nlohmann::json::parse(in)) t.ops.push_back(grid::operating_point_from_json(j));
  } catch (const nlohmann::json::exception& e) {
    throw IoError((dir / "ops.json").string() + ": " + e.what());
  }
  const auto csv = read_csv(dir / "indicators.csv");
  const auto cc = csv.column("ccrc"), co = csv.column("op"), cs = csv.column("stable");
  std::vector<std::size_t> cv;
  for (auto r : dataforge::kIndicatorRoles) cv.push_back(csv.column(std::string(dataforge::target_name(r))));
  std::set<grid::CcrcId> seen;
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    IndicatorSample s;
    s.ccrc = static_cast<grid::CcrcId>(csv.number(i, cc));
    s.op = static_cast<std::size_t>(csv.number(i, co));
    s.stable = csv.number(i, cs) != 0.0;
    if (s.op >= t.ops.size()) throw InvalidInput("indicator table: op index out of range");
    for (std::size_t k = 0; k < 4; ++k)
      s.values[k] = csv.rows[i][cv[k]].empty() ? std::numeric_limits<double>::quiet_NaN() : csv.number(i, cv[k]);
    if (seen.insert(s.ccrc).second) t.ccrcs.push_back(s.ccrc);
    t.samples.push_back(s);
  }
  return t;
}

double PerformanceMap::row_mean(std::size_t r) const { return level.row(static_cast<Eigen::Index>(r)).cast<double>().mean(); }
double PerformanceMap::column_mean(std::size_t c) const {
  return level.col(static_cast<Eigen::Index>(c)).cast<double>().mean();
}

std::size_t PerformanceMap::row_of(grid::CcrcId id) const {
  const auto it = std::find(ccrcs.begin(), ccrcs.end(), id);
  if (it == ccrcs.end()) throw InvalidInput("performance map has no row for CCRC " + std::to_string(id));
  return static_cast<std::size_t>(it - ccrcs.begin());
}

int quartile_level(double value, const std::array<double, 3>& q) {
  if (value <= q[0]) return 1;
  if (value <= q[1]) return 2;
  if (value <= q[2]) return 3;
  return 4;
}

PerformanceMap build_performance_map(const IndicatorTable& table, const Subregions& regions, DatasetRole indicator) {
  const auto k = indicator_index(indicator);
  std::vector<int> op_region(table.ops.size());
  for (std::size_t o = 0; o < table.ops.size(); ++o) op_region[o] = regions.assign(table.ops[o]);

  PerformanceMap m;
  m.indicator = indicator;
  m.ccrcs = table.ccrcs;
  const auto R = static_cast<Eigen::Index>(regions.size()), C = static_cast<Eigen::Index>(table.ccrcs.size());
  std::map<grid::CcrcId, Eigen::Index> row;
  for (Eigen::Index i = 0; i < C; ++i) row[table.ccrcs[static_cast<std::size_t>(i)]] = i;

  Eigen::MatrixXi n_stable = Eigen::MatrixXi::Zero(C, R), n_all = Eigen::MatrixXi::Zero(C, R);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(C, R);
  std::vector<double> pooled;
  for (const auto& s : table.samples) {
    const auto it = row.find(s.ccrc);
    if (it == row.end()) throw InvalidInput("indicator table sample for unknown CCRC");
    const auto r = op_region.at(s.op);
    ++n_all(it->second, r);
    if (s.stable) {
      ++n_stable(it->second, r);
      sum(it->second, r) += s.values[k];
      pooled.push_back(s.values[k]);
    }
  }
  std::string gaps;
  for (Eigen::Index i = 0; i < C; ++i)
    for (Eigen::Index r = 0; r < R; ++r)
      if (n_all(i, r) == 0) gaps += " (ccrc " + std::to_string(table.ccrcs[static_cast<std::size_t>(i)]) + ", region " + std::to_string(r) + ")";
  if (!gaps.empty()) throw IncompleteMap("performance map has uncovered cells:" + gaps);

  if (!pooled.empty())
    m.quartiles = {dataforge::percentile(pooled, 0.25), dataforge::percentile(pooled, 0.5),
                   dataforge::percentile(pooled, 0.75)};
  m.level.resize(C, R);
  m.value.resize(C, R);
  for (Eigen::Index i = 0; i < C; ++i)
    for (Eigen::Index r = 0; r < R; ++r) {
      const int unstable = n_all(i, r) - n_stable(i, r);
      if (2 * unstable > n_all(i, r)) {
        m.level(i, r) = 5;
        m.value(i, r) = std::numeric_limits<double>::quiet_NaN();
      } else {
        m.value(i, r) = sum(i, r) / n_stable(i, r);
        m.level(i, r) = quartile_level(m.value(i, r), m.quartiles);
      }
    }
  return m;
}

std::vector<std::size_t> row_order(const PerformanceMap& map) {
  std::vector<std::size_t> idx(map.rows());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return map.row_mean(a) > map.row_mean(b); });
  return idx;
}

std::vector<std::size_t> column_order(const PerformanceMap& map) {
  std::vector<std::size_t> idx(map.regions());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return map.column_mean(a) < map.column_mean(b); });
  return idx;
}

PerformanceMap restrict_rows(const PerformanceMap& map, const std::vector<grid::CcrcId>& keep) {
  PerformanceMap out;
  out.indicator = map.indicator;
  out.quartiles = map.quartiles;
  out.level.resize(static_cast<Eigen::Index>(keep.size()), map.level.cols());
  out.value.resize(static_cast<Eigen::Index>(keep.size()), map.level.cols());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(map.row_of(keep[i]));
    out.ccrcs.push_back(keep[i]);
    out.level.row(static_cast<Eigen::Index>(i)) = map.level.row(r);
    out.value.row(static_cast<Eigen::Index>(i)) = map.value.row(r);
  }
  return out;
}

}  // namespace acdc::reduction
