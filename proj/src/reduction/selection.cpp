#include "acdc/reduction/selection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>

#include <spdlog/spdlog.h>

#include "acdc/common/error.hpp"
#include "acdc/common/parallel.hpp"
#include "acdc/simd/kernels.hpp"

namespace acdc::reduction {

std::vector<int> average_linkage(const Eigen::MatrixXd& dist, int k) {
  const auto n = static_cast<int>(dist.rows());
  if (dist.cols() != n) throw InvalidInput("average_linkage: distance matrix must be square");
  if (k < 1 || k > n) throw InvalidInput("average_linkage: k outside [1, n]");
  std::vector<std::vector<int>> members(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) members[static_cast<std::size_t>(i)] = {i};
  Eigen::MatrixXd D = dist;
  std::vector<bool> alive(static_cast<std::size_t>(n), true);
  for (int clusters = n; clusters > k; --clusters) {
    int bi = -1, bj = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (!alive[static_cast<std::size_t>(i)]) continue;
      for (int j = i + 1; j < n; ++j)
        if (alive[static_cast<std::size_t>(j)] && D(i, j) < bd) {
          bd = D(i, j);
          bi = i;
          bj = j;
        }
    }
    const double na = static_cast<double>(members[static_cast<std::size_t>(bi)].size());
    const double nb = static_cast<double>(members[static_cast<std::size_t>(bj)].size());
    for (int o = 0; o < n; ++o) {
      if (!alive[static_cast<std::size_t>(o)] || o == bi || o == bj) continue;
      D(bi, o) = D(o, bi) = (na * D(bi, o) + nb * D(bj, o)) / (na + nb);
    }
    auto& a = members[static_cast<std::size_t>(bi)];
    const auto& b = members[static_cast<std::size_t>(bj)];
    a.insert(a.end(), b.begin(), b.end());
    alive[static_cast<std::size_t>(bj)] = false;
  }
  std::vector<std::vector<int>> groups;
  for (int i = 0; i < n; ++i)
    if (alive[static_cast<std::size_t>(i)]) {
      auto g = members[static_cast<std::size_t>(i)];
      std::sort(g.begin(), g.end());
      groups.push_back(std::move(g));
    }
  std::sort(groups.begin(), groups.end(), [](const auto& x, const auto& y) { return x.front() < y.front(); });
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (int i : groups[g]) labels[static_cast<std::size_t>(i)] = static_cast<int>(g);
  return labels;
}

double mean_silhouette(const Eigen::MatrixXd& dist, const std::vector<int>& labels) {
  const auto n = labels.size();
  if (n == 0) return 0.0;
  const int k = *std::max_element(labels.begin(), labels.end()) + 1;
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> sum(static_cast<std::size_t>(k), 0.0);
    std::vector<int> cnt(static_cast<std::size_t>(k), 0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      sum[static_cast<std::size_t>(labels[j])] += dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      ++cnt[static_cast<std::size_t>(labels[j])];
    }
    const auto own = static_cast<std::size_t>(labels[i]);
    if (cnt[own] == 0) continue;  // singleton
    const double a = sum[own] / cnt[own];
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c)
      if (c != own && cnt[c] > 0) b = std::min(b, sum[c] / cnt[c]);
    if (!std::isfinite(b)) continue;
    const double m = std::max(a, b);
    total += m > 0 ? (b - a) / m : 0.0;
  }
  return total / static_cast<double>(n);
}

ClusterAssignment cluster_ccrcs(const PerformanceMap& map) {
  ClusterAssignment out;
  out.ccrcs = map.ccrcs;
  out.cluster.assign(map.rows(), 0);
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < map.rows(); ++r)
    if ((map.level.row(static_cast<Eigen::Index>(r)).array() != 5).any()) rows.push_back(r);
  const auto m = static_cast<int>(rows.size());
  if (m < 3) {
    if (m < 2) spdlog::warn("cluster_ccrcs: fewer than two usable rows; single cluster");
    else spdlog::warn("cluster_ccrcs: two usable rows leave no k to compare; single cluster");
    for (auto r : rows) out.cluster[r] = 1;
    out.k = m > 0 ? 1 : 0;
    return out;
  }
  const Eigen::MatrixXd L = map.level.cast<double>();
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> V(m, L.cols());
  for (int i = 0; i < m; ++i) V.row(i) = L.row(static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)]));
  Eigen::MatrixXd dist(m, m);
  const auto w = static_cast<std::size_t>(V.cols());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) dist(i, j) = simd::l1_distance({V.row(i).data(), w}, {V.row(j).data(), w});

  const int kmax = std::min(10, m - 1);
  out.silhouette_by_k.assign(static_cast<std::size_t>(kmax + 1), std::numeric_limits<double>::quiet_NaN());
  std::vector<int> best;
  out.silhouette = -std::numeric_limits<double>::infinity();
  for (int k = 2; k <= kmax; ++k) {
    auto labels = average_linkage(dist, k);
    const double s = mean_silhouette(dist, labels);
    out.silhouette_by_k[static_cast<std::size_t>(k)] = s;
    if (s > out.silhouette + 1e-12) {
      out.silhouette = s;
      out.k = k;
      best = std::move(labels);
    }
  }
  for (int i = 0; i < m; ++i) out.cluster[rows[static_cast<std::size_t>(i)]] = best[static_cast<std::size_t>(i)] + 1;
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// Multi-class Gini tree over region centroids, printed as rules.
struct RuleTree {
  const Eigen::MatrixXd& F;
  const std::vector<std::string>& names;
  const std::vector<int>& label;
  int max_depth = 3;
  std::vector<std::string> lines;

  static double gini(const std::vector<std::size_t>& idx, const std::vector<int>& label) {
    std::map<int, int> c;
    for (auto i : idx) ++c[label[i]];
    double g = 1.0;
    for (auto [k, v] : c) g -= (static_cast<double>(v) / idx.size()) * (static_cast<double>(v) / idx.size());
    return g;
  }

  void build(const std::vector<std::size_t>& idx, int depth, const std::string& cond) {
    std::map<int, int> c;
    for (auto i : idx) ++c[label[i]];
    int major = c.begin()->first, mc = 0;
    for (auto [k, v] : c)
      if (v > mc) {
        mc = v;
        major = k;
      }
    const double g0 = gini(idx, label);
    int bf = -1;
    double bt = 0, bg = g0 - 1e-12;
    if (c.size() > 1 && depth < max_depth) {
      for (Eigen::Index f = 0; f < F.cols(); ++f) {
        std::vector<double> v;
        for (auto i : idx) v.push_back(F(static_cast<Eigen::Index>(i), f));
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        for (std::size_t t = 1; t < v.size(); ++t) {
          const double thr = v[t - 1] + (v[t] - v[t - 1]) / 2;
          std::vector<std::size_t> l, r;
          for (auto i : idx) (F(static_cast<Eigen::Index>(i), f) <= thr ? l : r).push_back(i);
          const double g = (l.size() * gini(l, label) + r.size() * gini(r, label)) / idx.size();
          if (g < bg) {
            bg = g;
            bf = static_cast<int>(f);
            bt = thr;
          }
        }
      }
    }
    if (bf < 0) {
      std::string regions;
      for (auto i : idx) regions += (regions.empty() ? "" : ",") + std::to_string(i);
      lines.push_back("if " + (cond.empty() ? std::string("true") : cond) + " then cluster " + std::to_string(major) +
                      " (regions " + regions + ")");
      return;
    }
    std::vector<std::size_t> l, r;
    for (auto i : idx) (F(static_cast<Eigen::Index>(i), bf) <= bt ? l : r).push_back(i);
    const std::string& n = names[static_cast<std::size_t>(bf)];
    const std::string pre = cond.empty() ? "" : cond + " and ";
    build(l, depth + 1, pre + n + " <= " + fmt(bt));
    build(r, depth + 1, pre + n + " > " + fmt(bt));
  }
};

}  // namespace

ClusterSelection select_clusters(const PerformanceMap& map, const ClusterAssignment& clusters,
                                 const Subregions* regions) {
  if (clusters.cluster.size() != map.rows()) throw InvalidInput("select_clusters: clustering does not match the map");
  const int k = clusters.k;
  const auto R = static_cast<Eigen::Index>(map.regions());
  ClusterSelection sel;
  sel.cluster_level = Eigen::MatrixXd::Constant(k + 1, R, std::numeric_limits<double>::quiet_NaN());
  std::vector<int> size(static_cast<std::size_t>(k + 1), 0);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(k + 1, R);
  for (std::size_t r = 0; r < map.rows(); ++r) {
    const int c = clusters.cluster[r];
    if (c <= 0) continue;
    ++size[static_cast<std::size_t>(c)];
    sum.row(c) += map.level.row(static_cast<Eigen::Index>(r)).cast<double>();
  }
  for (int c = 1; c <= k; ++c)
    if (size[static_cast<std::size_t>(c)] > 0) sel.cluster_level.row(c) = sum.row(c) / size[static_cast<std::size_t>(c)];

  std::vector<double> best(static_cast<std::size_t>(R), std::numeric_limits<double>::infinity());
  for (Eigen::Index r = 0; r < R; ++r) {
    for (int c = 1; c <= k; ++c)
      if (size[static_cast<std::size_t>(c)] > 0) best[static_cast<std::size_t>(r)] = std::min(best[static_cast<std::size_t>(r)], sel.cluster_level(c, r));
    if (!(best[static_cast<std::size_t>(r)] < 5.0))
      throw UncoverableRegion("subregion " + std::to_string(r) + " has no stable cluster");
  }
  auto covers = [&](int c, Eigen::Index r) {
    return size[static_cast<std::size_t>(c)] > 0 && sel.cluster_level(c, r) <= best[static_cast<std::size_t>(r)] + 1e-9;
  };

  std::vector<bool> covered(static_cast<std::size_t>(R), false);
  std::vector<int> picked;
  for (;;) {
    int bc = -1, bn = 0;
    for (int c = 1; c <= k; ++c) {
      if (std::find(picked.begin(), picked.end(), c) != picked.end()) continue;
      int n = 0;
      for (Eigen::Index r = 0; r < R; ++r) n += !covered[static_cast<std::size_t>(r)] && covers(c, r);
      if (n > bn) {
        bn = n;
        bc = c;
      }
    }
    if (bc < 0) break;
    picked.push_back(bc);
    for (Eigen::Index r = 0; r < R; ++r) covered[static_cast<std::size_t>(r)] = covered[static_cast<std::size_t>(r)] || covers(bc, r);
  }
  // drop picks made redundant by later ones
  for (std::size_t i = picked.size(); i-- > 0;) {
    const int c = picked[i];
    bool needed = false;
    for (Eigen::Index r = 0; r < R && !needed; ++r) {
      if (!covers(c, r)) continue;
      needed = std::none_of(picked.begin(), picked.end(), [&](int o) { return o != c && covers(o, r); });
    }
    if (!needed) picked.erase(picked.begin() + static_cast<long>(i));
  }
  sel.selected = picked;
  std::sort(sel.selected.begin(), sel.selected.end());

  sel.region_cover.assign(static_cast<std::size_t>(R), 0);
  for (Eigen::Index r = 0; r < R; ++r)
    for (int c : sel.selected)
      if (covers(c, r)) {
        sel.region_cover[static_cast<std::size_t>(r)] = c;
        break;
      }

  if (regions && regions->size() == static_cast<std::size_t>(R) && !regions->feature_names.empty()) {
    const Eigen::MatrixXd F = regions->raw_centroids();
    RuleTree t{F, regions->feature_names, sel.region_cover, 3, {}};
    std::vector<std::size_t> idx(static_cast<std::size_t>(R));
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    t.build(idx, 0, "");
    for (const auto& l : t.lines) sel.rules += l + "\n";
  } else {
    for (Eigen::Index r = 0; r < R; ++r)
      sel.rules += "if region == " + std::to_string(r) + " then cluster " + std::to_string(sel.region_cover[static_cast<std::size_t>(r)]) + "\n";
  }
  return sel;
}

SelectionResult intersect_selections(const std::vector<IndicatorSelection>& per_indicator) {
  if (per_indicator.empty()) throw InvalidInput("intersect_selections: no indicator selections");
  SelectionResult res;
  std::map<grid::CcrcId, std::size_t> at;
  for (const auto& s : per_indicator) {
    res.indicators.push_back(s.indicator);
    res.rules.push_back(s.selection.rules);
    for (auto id : s.clusters.ccrcs)
      if (at.emplace(id, res.ccrcs.size()).second) res.ccrcs.push_back(id);
  }
  const auto I = per_indicator.size();
  res.attribute.assign(res.ccrcs.size(), std::vector<int>(I, 0));
  for (std::size_t i = 0; i < I; ++i) {
    const auto& s = per_indicator[i];
    const std::set<int> chosen(s.selection.selected.begin(), s.selection.selected.end());
    for (std::size_t r = 0; r < s.clusters.ccrcs.size(); ++r) {
      const int c = s.clusters.cluster[r];
      if (chosen.count(c)) res.attribute[at[s.clusters.ccrcs[r]]][i] = c;
    }
  }
  std::map<std::vector<int>, std::vector<grid::CcrcId>> groups;
  for (std::size_t c = 0; c < res.ccrcs.size(); ++c) groups[res.attribute[c]].push_back(res.ccrcs[c]);
  for (auto& [attr, members] : groups) {
    if (std::all_of(attr.begin(), attr.end(), [](int v) { return v == 0; })) continue;
    std::sort(members.begin(), members.end());
    res.groups.push_back({attr, members, members.front()});
  }
  std::sort(res.groups.begin(), res.groups.end(),
            [](const SelectionGroup& a, const SelectionGroup& b) { return a.representative < b.representative; });
  for (const auto& g : res.groups) res.reduced.push_back(g.representative);
  return res;
}

std::vector<CoverageGap> coverage_gaps(const std::vector<PerformanceMap>& maps, const std::vector<grid::CcrcId>& reduced,
                                       int slack) {
  std::vector<CoverageGap> gaps;
  for (const auto& m : maps) {
    std::vector<std::size_t> rows;
    for (auto id : reduced) rows.push_back(m.row_of(id));
    for (std::size_t r = 0; r < m.regions(); ++r) {
      const auto c = static_cast<Eigen::Index>(r);
      const int best = m.level.col(c).minCoeff();
      int got = 5;
      for (auto i : rows) got = std::min(got, m.level(static_cast<Eigen::Index>(i), c));
      if (got == 5 || got > best + slack) gaps.push_back({m.indicator, r, best, got});
    }
  }
  return gaps;
}

ReductionOutput reduce(const IndicatorTable& table, const Subregions& regions) {
  ReductionOutput out;
  out.regions = regions;
  out.maps.resize(4);
  out.per_indicator.resize(4);
  parallel_for(4, [&](std::size_t i) {
    const auto role = dataforge::kIndicatorRoles[i];
    out.maps[i] = build_performance_map(table, regions, role);
    auto& s = out.per_indicator[i];
    s.indicator = role;
    s.clusters = cluster_ccrcs(out.maps[i]);
    s.selection = select_clusters(out.maps[i], s.clusters, &out.regions);
  });
  out.result = intersect_selections(out.per_indicator);
  return out;
}

ReductionOutput reduce(const IndicatorTable& table, std::size_t n_regions, std::uint64_t seed) {
  return reduce(table, partition_operating_space(table.ops, n_regions, seed));
}

}  // namespace acdc::reduction
