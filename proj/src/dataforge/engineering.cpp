#include "acdc/dataforge/engineering.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <spdlog/spdlog.h>

#include "acdc/common/error.hpp"

namespace acdc::dataforge {

using powerflow::ColumnInfo;
using powerflow::ElementGroup;
using powerflow::FeatureKind;

Dataset engineer_features(const Dataset& ds) {
  // (element, quantity) -> column index
  std::map<std::pair<std::string, std::string>, std::size_t> at;
  std::vector<std::pair<std::string, ElementGroup>> elements;
  for (std::size_t j = 0; j < ds.columns.size(); ++j) {
    const auto& c = ds.columns[j];
    if (c.element.empty() || c.kind != FeatureKind::power) continue;
    if (at.emplace(std::make_pair(c.element, c.quantity), j).second && c.quantity == "P")
      elements.emplace_back(c.element, c.group);
  }
  auto find = [&](const std::string& e, const char* q) -> std::optional<std::size_t> {
    auto it = at.find({e, q});
    if (it == at.end()) return std::nullopt;
    return it->second;
  };

  std::vector<ColumnInfo> new_cols;
  std::vector<Eigen::VectorXd> new_vals;
  auto add = [&](const ColumnInfo& like, std::string quantity, FeatureKind kind, Eigen::VectorXd v) {
    ColumnInfo c = like;
    c.name = quantity + "_" + like.element;
    c.quantity = std::move(quantity);
    c.kind = kind;
    if (ds.has_column(c.name)) throw InvalidInput("engineered column " + c.name + " already exists");
    new_cols.push_back(std::move(c));
    new_vals.push_back(std::move(v));
  };

  for (const auto& [e, group] : elements) {
    const auto p = find(e, "P"), q = find(e, "Q");
    if (!p || !q) continue;
    const auto& pc = ds.columns[*p];
    const Eigen::VectorXd P = ds.X.col(static_cast<Eigen::Index>(*p));
    const Eigen::VectorXd Q = ds.X.col(static_cast<Eigen::Index>(*q));
    add(pc, "S", FeatureKind::power, (P.array().square() + Q.array().square()).sqrt().matrix());
    if (group == ElementGroup::ipc) {
      if (const auto pdc = find(e, "Pdc"))
        add(pc, "Sdc", FeatureKind::power, ds.X.col(static_cast<Eigen::Index>(*pdc)).cwiseAbs());
    }
  }
  for (const auto& [e, group] : elements) {
    if (group != ElementGroup::ipc && group != ElementGroup::thevenin) continue;
    const auto p = find(e, "P");
    const Eigen::VectorXd P = ds.X.col(static_cast<Eigen::Index>(*p));
    add(ds.columns[*p], "dir", FeatureKind::flag, (P.array() >= 0.0).cast<double>().matrix());
  }

  Dataset out = ds;
  out.X.conservativeResize(ds.rows(), ds.cols() + static_cast<Eigen::Index>(new_cols.size()));
  for (std::size_t k = 0; k < new_cols.size(); ++k) {
    out.X.col(ds.cols() + static_cast<Eigen::Index>(k)) = new_vals[k];
    out.columns.push_back(new_cols[k]);
  }
  out.scaler.reset();
  return out;
}

namespace {

// Lower rank = removed first when two correlated columns share a node.
int retention_rank(FeatureKind k) {
  switch (k) {
    case FeatureKind::current: return 0;
    case FeatureKind::ac_voltage: return 1;
    case FeatureKind::dc_voltage: return 2;
    case FeatureKind::angle: return 3;
    case FeatureKind::flag: return 4;
    case FeatureKind::power: return 5;
    case FeatureKind::categorical: return 6;
  }
  return 6;
}

}  // namespace

Dataset clean_features(const Dataset& ds, double corr_threshold, CleaningReport* report) {
  std::vector<std::size_t> numeric;
  for (std::size_t j = 0; j < ds.columns.size(); ++j)
    if (ds.columns[j].kind != FeatureKind::categorical) numeric.push_back(j);
  if (numeric.size() < 2) throw InvalidInput("cleaning needs at least two numeric columns");
  CleaningReport rep;
  std::vector<bool> removed(ds.columns.size(), false);
  const Eigen::Index n = ds.rows();

  for (auto j : numeric) {
    const auto col = ds.X.col(static_cast<Eigen::Index>(j));
    if (n == 0 || (col.array() == col(0)).all()) {
      removed[j] = true;
      rep.removed.push_back({ds.columns[j].name, "constant", ""});
    }
  }
  for (std::size_t a = 0; a < numeric.size(); ++a) {
    const auto ja = numeric[a];
    if (removed[ja]) continue;
    for (std::size_t b = a + 1; b < numeric.size(); ++b) {
      const auto jb = numeric[b];
      if (removed[jb]) continue;
      if (ds.X.col(static_cast<Eigen::Index>(ja)) == ds.X.col(static_cast<Eigen::Index>(jb))) {
        removed[jb] = true;
        rep.removed.push_back({ds.columns[jb].name, "duplicate", ds.columns[ja].name});
      }
    }
  }

  std::vector<std::size_t> alive;
  for (auto j : numeric)
    if (!removed[j]) alive.push_back(j);
  if (n >= 2 && alive.size() >= 2) {
    Eigen::MatrixXd Z(n, static_cast<Eigen::Index>(alive.size()));
    for (std::size_t k = 0; k < alive.size(); ++k) {
      Eigen::VectorXd c = ds.X.col(static_cast<Eigen::Index>(alive[k]));
      c.array() -= c.mean();
      const double norm = c.norm();
      Z.col(static_cast<Eigen::Index>(k)) = norm > 0.0 ? Eigen::VectorXd(c / norm) : c;
    }
    const Eigen::MatrixXd R = Z.transpose() * Z;
    for (std::size_t a = 0; a < alive.size(); ++a) {
      for (std::size_t b = a + 1; b < alive.size(); ++b) {
        const auto ja = alive[a], jb = alive[b];
        const double rho = R(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        if (std::abs(rho) < corr_threshold) continue;
        if (removed[ja] || removed[jb]) continue;
        const auto& ca = ds.columns[ja];
        const auto& cb = ds.columns[jb];
        const bool keep_both = (ca.kind == FeatureKind::power && cb.kind == FeatureKind::power) || ca.node != cb.node;
        rep.flagged.push_back({ca.name, cb.name, rho, keep_both});
        if (keep_both) continue;
        // ties go against the later column
        const auto drop = retention_rank(cb.kind) <= retention_rank(ca.kind) ? jb : ja;
        const auto keep = drop == jb ? ja : jb;
        removed[drop] = true;
        rep.removed.push_back({ds.columns[drop].name, "correlated", ds.columns[keep].name});
      }
    }
  }
  for (const auto& f : rep.flagged)
    spdlog::debug("correlated pair {} / {} rho={:.4f}{}", f.a, f.b, f.rho, f.both_kept ? " (both kept)" : "");

  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < ds.columns.size(); ++j)
    if (!removed[j]) keep.push_back(j);
  if (report) *report = std::move(rep);
  return ds.select_columns(keep);
}

ScalerStats fit_scaler(const Dataset& ds, std::vector<std::string>* warnings) {
  ScalerStats s;
  const Eigen::Index n = ds.rows();
  for (std::size_t j = 0; j < ds.columns.size(); ++j) {
    const auto& c = ds.columns[j];
    s.names.push_back(c.name);
    if (c.kind == FeatureKind::categorical || n == 0) {
      s.mean.push_back(0.0);
      s.scale.push_back(1.0);
      s.passthrough.push_back(c.kind == FeatureKind::categorical);
      continue;
    }
    const auto col = ds.X.col(static_cast<Eigen::Index>(j));
    const double mean = col.mean();
    const double sd = std::sqrt((col.array() - mean).square().sum() / static_cast<double>(n));
    if (!(sd > 0.0)) {
      const std::string msg = "column " + c.name + " has zero variance; identity scaling";
      spdlog::warn("{}", msg);
      if (warnings) warnings->push_back(msg);
      s.mean.push_back(0.0);
      s.scale.push_back(1.0);
    } else {
      s.mean.push_back(mean);
      s.scale.push_back(sd);
    }
    s.passthrough.push_back(false);
  }
  return s;
}

namespace {

std::vector<std::size_t> stat_index(const ScalerStats& stats, const std::vector<ColumnInfo>& columns) {
  std::map<std::string, std::size_t> by_name;
  for (std::size_t k = 0; k < stats.names.size(); ++k) by_name[stats.names[k]] = k;
  std::vector<std::size_t> idx;
  for (const auto& c : columns) {
    const auto it = by_name.find(c.name);
    if (it == by_name.end()) throw InvalidInput("scaler has no statistics for column " + c.name);
    idx.push_back(it->second);
  }
  return idx;
}

}  // namespace

Eigen::MatrixXd apply_scaler(const ScalerStats& stats, const std::vector<ColumnInfo>& columns,
                             const Eigen::MatrixXd& X) {
  if (static_cast<std::size_t>(X.cols()) != columns.size()) throw InvalidInput("matrix width mismatch");
  const auto idx = stat_index(stats, columns);
  Eigen::MatrixXd out = X;
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const auto k = idx[j];
    if (stats.passthrough[k]) continue;
    out.col(static_cast<Eigen::Index>(j)) = (X.col(static_cast<Eigen::Index>(j)).array() - stats.mean[k]) / stats.scale[k];
  }
  return out;
}

Eigen::MatrixXd invert_scaler(const ScalerStats& stats, const std::vector<ColumnInfo>& columns,
                              const Eigen::MatrixXd& X) {
  if (static_cast<std::size_t>(X.cols()) != columns.size()) throw InvalidInput("matrix width mismatch");
  const auto idx = stat_index(stats, columns);
  Eigen::MatrixXd out = X;
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const auto k = idx[j];
    if (stats.passthrough[k]) continue;
    out.col(static_cast<Eigen::Index>(j)) = X.col(static_cast<Eigen::Index>(j)).array() * stats.scale[k] + stats.mean[k];
  }
  return out;
}

Dataset scale_features(const Dataset& ds, const ScalerStats* stats, std::vector<std::string>* warnings) {
  Dataset out = ds;
  out.scaler = stats ? *stats : fit_scaler(ds, warnings);
  out.X = apply_scaler(*out.scaler, ds.columns, ds.X);
  return out;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw InvalidInput("percentile of an empty column");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("percentile must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

Winsorized winsorize(const std::vector<double>& values, double p) {
  if (values.empty()) throw InvalidInput("cannot winsorize an empty column");
  if (!(p > 0.5 && p < 1.0)) throw InvalidInput("winsorization percentile must lie in (0.5, 1)");
  Winsorized w;
  w.upper = percentile(values, p);
  w.values.reserve(values.size());
  for (double v : values) w.values.push_back(std::min(v, w.upper));
  return w;
}

}  // namespace acdc::dataforge
