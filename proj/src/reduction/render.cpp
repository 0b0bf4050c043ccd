#include <algorithm>
#include <cmath>
#include <set>

#include "acdc/common/csv.hpp"
#include "acdc/common/svg.hpp"
#include "acdc/dataforge/engineering.hpp"
#include "acdc/reduction/selection.hpp"

namespace acdc::reduction {

namespace {

void render_map(const PerformanceMap& m, const std::set<grid::CcrcId>& reduced, const std::filesystem::path& stem) {
  const auto rows = row_order(m);
  const auto cols = column_order(m);
  CsvTable csv;
  csv.header = {"ccrc", "selected"};
  for (auto c : cols) csv.header.push_back("region_" + std::to_string(c));
  for (auto r : rows) {
    std::vector<std::string> line = {std::to_string(m.ccrcs[r]), reduced.count(m.ccrcs[r]) ? "1" : "0"};
    for (auto c : cols) line.push_back(std::to_string(m.level(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))));
    csv.rows.push_back(std::move(line));
  }
  write_csv(stem.string() + ".csv", csv);

  const double cell = 10, left = 70, top = 40;
  SvgDocument svg(left + cell * static_cast<double>(cols.size()) + 20, top + cell * static_cast<double>(rows.size()) + 20);
  svg.text(left, 20, "stability map " + std::string(dataforge::target_name(m.indicator)) + " (rows worst to best)", 12);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = rows[i];
    const double y = top + cell * static_cast<double>(i);
    svg.text(left - 4, y + cell - 2, std::to_string(m.ccrcs[r]), 8, "end");
    if (reduced.count(m.ccrcs[r])) svg.circle(8, y + cell / 2, 3, "#000000");
    for (std::size_t j = 0; j < cols.size(); ++j)
      svg.rect(left + cell * static_cast<double>(j), y, cell, cell,
               level_color(m.level(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(cols[j]))), "#ffffff");
  }
  svg.save(stem.string() + ".svg");
}

void render_membership(const SelectionResult& res, const std::filesystem::path& dir) {
  CsvTable csv;
  csv.header = {"ccrc"};
  for (auto r : res.indicators) csv.header.emplace_back(dataforge::target_name(r));
  csv.header.push_back("group");
  csv.header.push_back("representative");
  for (std::size_t g = 0; g < res.groups.size(); ++g)
    for (auto id : res.groups[g].members) {
      std::vector<std::string> line = {std::to_string(id)};
      for (int a : res.groups[g].attribute) line.push_back(std::to_string(a));
      line.push_back(std::to_string(g));
      line.push_back(id == res.groups[g].representative ? "1" : "0");
      csv.rows.push_back(std::move(line));
    }
  write_csv(dir / "membership.csv", csv);

  // sets are (indicator, selected cluster) pairs; one column per group
  std::vector<std::pair<std::size_t, int>> sets;
  for (const auto& g : res.groups)
    for (std::size_t i = 0; i < g.attribute.size(); ++i)
      if (g.attribute[i] != 0) sets.emplace_back(i, g.attribute[i]);
  std::sort(sets.begin(), sets.end());
  sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
  std::size_t tallest = 1;
  for (const auto& g : res.groups) tallest = std::max(tallest, g.members.size());
  const double col = 22, rowh = 16, left = 110, bars = 120, top = 20;
  SvgDocument svg(left + col * static_cast<double>(res.groups.size()) + 20,
                  top + bars + rowh * static_cast<double>(sets.size()) + 20);
  for (std::size_t s = 0; s < sets.size(); ++s) {
    const double y = top + bars + rowh * static_cast<double>(s) + rowh / 2;
    svg.text(left - 8, y + 3,
             std::string(dataforge::target_name(res.indicators[sets[s].first])) + " c" + std::to_string(sets[s].second), 9,
             "end");
  }
  for (std::size_t g = 0; g < res.groups.size(); ++g) {
    const double x = left + col * static_cast<double>(g) + col / 2;
    const double h = bars * static_cast<double>(res.groups[g].members.size()) / static_cast<double>(tallest);
    svg.rect(x - 6, top + bars - h, 12, h, "#404040");
    svg.text(x, top + bars - h - 2, std::to_string(res.groups[g].members.size()), 8, "middle");
    double ymin = 1e9, ymax = -1e9;
    for (std::size_t s = 0; s < sets.size(); ++s) {
      const double y = top + bars + rowh * static_cast<double>(s) + rowh / 2;
      const bool in = res.groups[g].attribute[sets[s].first] == sets[s].second;
      svg.circle(x, y, 4, in ? "#000000" : "#d9d9d9");
      if (in) {
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
    if (ymax > ymin) svg.line(x, ymin, x, ymax, "#000000", 2);
  }
  svg.save(dir / "membership.svg");
}

void render_boxplots(const IndicatorTable& table, const std::set<grid::CcrcId>& reduced, const std::filesystem::path& dir) {
  CsvTable csv;
  csv.header = {"indicator", "subset", "count", "min", "q1", "median", "q3", "max"};
  for (std::size_t k = 0; k < 4; ++k) {
    for (int subset = 0; subset < 2; ++subset) {
      std::vector<double> v;
      for (const auto& s : table.samples)
        if (s.stable && (subset == 0 || reduced.count(s.ccrc))) v.push_back(s.values[k]);
      std::vector<std::string> line = {std::string(dataforge::target_name(dataforge::kIndicatorRoles[k])),
                                       subset == 0 ? "all" : "selected", std::to_string(v.size())};
      if (v.empty()) {
        line.insert(line.end(), 5, "");
      } else {
        for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) line.push_back(format_number(dataforge::percentile(v, p)));
      }
      csv.rows.push_back(std::move(line));
    }
  }
  write_csv(dir / "boxplot_summary.csv", csv);
}

}  // namespace

void render_outputs(const ReductionOutput& out, const IndicatorTable& table, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::set<grid::CcrcId> reduced(out.result.reduced.begin(), out.result.reduced.end());
  for (const auto& m : out.maps) render_map(m, reduced, dir / ("stability_map_" + std::string(dataforge::target_name(m.indicator))));
  render_membership(out.result, dir);
  render_boxplots(table, reduced, dir);
}

}  // namespace acdc::reduction
