#include "acdc/grid/operating_point.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <nlohmann/json.hpp>

#include "acdc/common/error.hpp"

namespace acdc::grid {

namespace {

constexpr double kShareTol = 1e-9;

void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidInput(msg);
}

bool inside(double v, double lo, double hi) {
  const double slack = 1e-9 * std::max(1.0, std::abs(hi - lo));
  return v >= lo - slack && v <= hi + slack;
}

}  // namespace

void OperatingRanges::validate() const {
  for (std::size_t i = 0; i < generators.size(); ++i) {
    const auto& g = generators[i];
    const std::string tag = "generator range " + std::to_string(i);
    require(g.p_min_mw < g.p_max_mw, tag + ": P_min must be below P_max");
    require(g.cos_phi_min < g.cos_phi_max, tag + ": cos_phi_min must be below cos_phi_max");
    require(g.cos_phi_min > 0.0 && g.cos_phi_max <= 1.0, tag + ": power factor outside (0, 1]");
    require(g.p_min_mw >= 0.0, tag + ": negative P_min");
  }
  require(demand_min_mw < demand_max_mw, "demand range: min must be below max");
  require(demand_min_mw >= 0.0, "demand range: negative minimum");
  require(share_band >= 0.0 && share_band < 1.0, "share band must lie in [0, 1)");
  double sum = 0.0;
  for (double s : load_base_share) {
    require(s > 0.0, "load base shares must be positive");
    sum += s;
  }
  require(!load_base_share.empty(), "at least one load is required");
  require(std::abs(sum - 1.0) < kShareTol, "load base shares must sum to 1");
}

void validate_operating_point(const OperatingRanges& ranges, const OperatingPoint& op) {
  require(op.generators.size() == ranges.generators.size(), "generator count mismatch");
  require(op.load_shares.size() == ranges.load_base_share.size(), "load count mismatch");
  for (std::size_t i = 0; i < op.generators.size(); ++i) {
    const auto& g = op.generators[i];
    const auto& r = ranges.generators[i];
    require(inside(g.p_mw, r.p_min_mw, r.p_max_mw),
            "generator " + std::to_string(i) + " P outside its range");
    require(inside(g.cos_phi, r.cos_phi_min, r.cos_phi_max),
            "generator " + std::to_string(i) + " power factor outside its range");
  }
  require(inside(op.demand_mw, ranges.demand_min_mw, ranges.demand_max_mw), "demand outside range");
  double sum = 0.0;
  for (std::size_t i = 0; i < op.load_shares.size(); ++i) {
    const double base = ranges.load_base_share[i];
    require(inside(op.load_shares[i], base * (1.0 - ranges.share_band), base * (1.0 + ranges.share_band)),
            "load " + std::to_string(i) + " share outside its band");
    sum += op.load_shares[i];
  }
  require(std::abs(sum - 1.0) < kShareTol, "load shares must sum to 1");
}

std::vector<double> project_shares(std::span<const double> raw, std::span<const double> base, double band) {
  if (raw.size() != base.size() || raw.empty()) throw InvalidInput("share vectors must match and be non-empty");
  const std::size_t n = raw.size();
  std::vector<double> lo(n), hi(n), s(n);
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = base[i] * (1.0 - band);
    hi[i] = base[i] * (1.0 + band);
    s[i] = std::clamp(raw[i], lo[i], hi[i]);
  }
  // Spread the residual over loads that still have room, proportionally to
  // that room, until the sum hits one.
  for (int iter = 0; iter < 64; ++iter) {
    const double excess = std::accumulate(s.begin(), s.end(), 0.0) - 1.0;
    if (std::abs(excess) < 1e-15) break;
    double room = 0.0;
    for (std::size_t i = 0; i < n; ++i) room += excess > 0 ? s[i] - lo[i] : hi[i] - s[i];
    if (room <= 0.0) throw InvalidInput("share bands cannot sum to one");
    const double frac = std::min(1.0, std::abs(excess) / room);
    for (std::size_t i = 0; i < n; ++i) {
      if (excess > 0)
        s[i] -= frac * (s[i] - lo[i]);
      else
        s[i] += frac * (hi[i] - s[i]);
    }
  }
  // Put the last rounding residue on the load with the most room.
  const double residue = std::accumulate(s.begin(), s.end(), 0.0) - 1.0;
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (std::min(s[i] - lo[i], hi[i] - s[i]) > std::min(s[best] - lo[best], hi[best] - s[best])) best = i;
  s[best] -= residue;
  return s;
}

nlohmann::json operating_point_to_json(const OperatingPoint& op) {
  nlohmann::json gens = nlohmann::json::array();
  for (const auto& g : op.generators) gens.push_back({{"p_mw", g.p_mw}, {"cos_phi", g.cos_phi}});
  nlohmann::json doc{{"generators", gens}, {"demand_mw", op.demand_mw}, {"load_shares", op.load_shares}};
  if (!op.ipc_schedule_mw.empty()) doc["ipc_schedule_mw"] = op.ipc_schedule_mw;
  return doc;
}

OperatingPoint operating_point_from_json(const nlohmann::json& doc) {
  try {
    OperatingPoint op;
    for (const auto& g : doc.at("generators"))
      op.generators.push_back({g.at("p_mw").get<double>(), g.at("cos_phi").get<double>()});
    op.demand_mw = doc.at("demand_mw").get<double>();
    op.load_shares = doc.at("load_shares").get<std::vector<double>>();
    if (doc.contains("ipc_schedule_mw")) op.ipc_schedule_mw = doc["ipc_schedule_mw"].get<std::vector<double>>();
    return op;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed operating point: ") + e.what());
  }
}

}  // namespace acdc::grid
