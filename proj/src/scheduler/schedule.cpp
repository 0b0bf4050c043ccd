#include "acdc/scheduler/schedule.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "acdc/common/csv.hpp"
#include "acdc/common/error.hpp"
#include "acdc/common/parallel.hpp"
#include "acdc/common/rng.hpp"
#include "acdc/common/svg.hpp"
#include "acdc/dataforge/engineering.hpp"
#include "acdc/dataforge/sampling.hpp"

namespace acdc::scheduler {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

bool stable_at_both(const Oracle& o, const grid::OperatingPoint& a, const grid::OperatingPoint& b,
                    const grid::Ccrc& c) {
  const auto x = o.stable(a, c);
  if (!x || !*x) return false;
  const auto y = o.stable(b, c);
  return y && *y;
}

std::string indicator_label(std::size_t k) {
  return std::string(dataforge::target_name(dataforge::kIndicatorRoles[k]));
}

}  // namespace

std::string_view mode_name(Mode mode) noexcept {
  switch (mode) {
    case Mode::exact: return "exact";
    case Mode::data_driven: return "data-driven";
    case Mode::day_ahead: return "day-ahead";
    case Mode::no_mcdm: return "no-mcdm";
  }
  return "?";
}

Mode parse_mode(std::string_view name) {
  for (auto m : {Mode::exact, Mode::data_driven, Mode::day_ahead, Mode::no_mcdm})
    if (mode_name(m) == name) return m;
  throw InvalidInput("unknown schedule mode '" + std::string(name) + "'");
}

VerifiedAssignment verify_and_assign(const PerformanceMatrix& matrix, const Ranking& ranking,
                                     const TransitionContext& ctx, const std::vector<grid::Ccrc>& reduced,
                                     const ExactOracle& exact, const Oracle& source) {
  if (ranking.order.empty()) throw InvalidInput("verify_and_assign: empty ranking");
  VerifiedAssignment v;
  for (auto i : ranking.order) {
    ++v.calls;
    const auto& c = matrix.alternatives[i];
    if (stable_at_both(exact, ctx.current_op, ctx.next_op, c)) {
      v.ccrc = c;
      return v;
    }
    spdlog::debug("verification: CCRC {} rejected by the exact model", c.id());
  }
  spdlog::info("verification: every ranked candidate failed, falling back to the exact filter");
  v.fallback = true;
  const auto alts = compute_alternatives(ctx, reduced, exact);
  auto m = performance_matrix(ctx, alts.ccrcs, source);
  if (m.rows() == 0) m = performance_matrix(ctx, alts.ccrcs, exact);
  if (m.rows() == 0) throw NoStableAlternative("no exactly stable alternative has indicators");
  v.ccrc = m.alternatives[solve(m, ctx.current).best()];
  v.gamma_star = alts.gamma_star;
  v.relaxations = alts.relaxations;
  return v;
}

std::vector<grid::CcrcId> fallback_pair(const ExactOracle& exact, const std::vector<grid::Ccrc>& reduced,
                                        const std::vector<grid::OperatingPoint>& ops) {
  std::vector<std::size_t> count(reduced.size(), 0);
  parallel_for(reduced.size(), [&](std::size_t i) {
    for (const auto& op : ops) {
      const auto s = exact.stable(op, reduced[i]);
      count[i] += s && *s;
    }
  });
  std::vector<std::size_t> idx(reduced.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) {
    return count[a] != count[b] ? count[a] > count[b] : reduced[a].id() < reduced[b].id();
  });
  std::vector<grid::CcrcId> out;
  for (std::size_t i = 0; i < std::min<std::size_t>(2, idx.size()); ++i) out.push_back(reduced[idx[i]].id());
  return out;
}

std::vector<ScheduleRecord> run_schedule(const grid::GridTopology& topology,
                                         const std::vector<grid::OperatingPoint>& ops, Mode mode,
                                         const ScheduleConfig& config, const Oracle* surrogate) {
  if (ops.empty()) throw InvalidInput("run_schedule: empty operating-point sequence");
  if (config.reduced.empty()) throw InvalidInput("run_schedule: empty reduced set");
  if (mode == Mode::data_driven && !surrogate) throw InvalidInput("run_schedule: data-driven mode needs surrogate models");
  if (mode == Mode::day_ahead && config.forecast.size() != ops.size())
    throw InvalidInput("run_schedule: day-ahead mode needs a forecast of the same length");
  const auto ipcs = topology.ipc_count();
  std::vector<grid::CcrcId> ids;
  for (const auto& c : config.reduced) ids.push_back(c.id());

  ExactOracle exact(topology);
  std::vector<ScheduleRecord> plan;
  if (mode == Mode::day_ahead) plan = run_schedule(topology, config.forecast, Mode::exact, config);
  std::vector<grid::CcrcId> pair;
  if (mode == Mode::no_mcdm) {
    pair = config.fallback_pair.empty() ? fallback_pair(exact, config.reduced, ops) : config.fallback_pair;
    for (auto id : pair)
      if (std::find(ids.begin(), ids.end(), id) == ids.end())
        throw InvalidInput("run_schedule: fallback CCRC " + std::to_string(id) + " is not in the reduced set");
  }

  grid::Ccrc current;
  if (config.initial) {
    if (std::find(ids.begin(), ids.end(), *config.initial) == ids.end())
      throw InvalidInput("run_schedule: initial CCRC is not in the reduced set");
    current = grid::Ccrc::from_id(*config.initial, ipcs);
  } else {
    // no-mcdm starts on its first usable fallback; the others on the best
    // weighted sum of exact indicators at the first OP
    const auto& candidates = mode == Mode::no_mcdm ? pair : ids;
    double best = std::numeric_limits<double>::infinity();
    for (auto id : candidates) {
      const auto c = grid::Ccrc::from_id(id, ipcs);
      const auto ind = exact.indicators(ops.front(), c);
      if (!ind) continue;
      double score = 0;
      for (std::size_t k = 0; k < kCriteria; ++k) score += config.weights[k] * (*ind)[k];
      if (mode == Mode::no_mcdm) score = 0;
      if (score < best) {
        best = score;
        current = c;
      }
    }
    if (!std::isfinite(best))
      throw NoStableAlternative("run_schedule: no candidate CCRC is stable at the first operating point");
  }

  const Oracle& mcdm_source = mode == Mode::data_driven ? *surrogate : static_cast<const Oracle&>(exact);
  std::vector<ScheduleRecord> records;
  for (std::size_t t = 0; t < ops.size(); ++t) {
    const auto& prev = t == 0 ? ops.front() : ops[t - 1];
    TransitionContext ctx{prev, ops[t], current, exact.indicators(prev, current), config.gamma_star, config.weights};
    ctx.validate(ids);
    ScheduleRecord rec;
    rec.slot = t;
    rec.mode = mode;
    rec.gamma_star = config.gamma_star;
    grid::Ccrc assigned = current;

    auto mcdm = [&](const Oracle& src) {
      const auto t0 = Clock::now();
      Alternatives alts;
      try {
        alts = compute_alternatives(ctx, config.reduced, src);
      } catch (const NoStableAlternative&) {
        if (&src == &exact) throw;
        spdlog::info("{} slot {}: surrogate filter is empty, using the exact filter", mode_name(mode), t);
        alts = compute_alternatives(ctx, config.reduced, exact);
      }
      auto m = performance_matrix(ctx, alts.ccrcs, src);
      if (m.rows() == 0 && &src != &exact) m = performance_matrix(ctx, alts.ccrcs, exact);
      if (m.rows() == 0) throw NoStableAlternative("no alternative has indicators");
      const auto ranking = solve(m, current);
      rec.solve_ms += ms_since(t0);
      const auto t1 = Clock::now();
      const auto v = verify_and_assign(m, ranking, ctx, config.reduced, exact, src);
      rec.verify_ms += ms_since(t1);
      rec.alternatives = alts.ccrcs.size();
      rec.gamma_star = v.fallback ? v.gamma_star : alts.gamma_star;
      rec.relaxations = v.fallback ? v.relaxations : alts.relaxations;
      rec.verification_calls += v.calls;
      return v.ccrc;
    };

    try {
      switch (mode) {
        case Mode::exact:
        case Mode::data_driven:
          if (!ctx.current_indicators) throw NoStableAlternative("current CCRC has no indicators at the current OP");
          assigned = mcdm(mcdm_source);
          break;
        case Mode::day_ahead: {
          const auto planned = grid::Ccrc::from_id(plan[t].ccrc, ipcs);
          rec.planned = planned.id();
          const auto t0 = Clock::now();
          rec.plan_stable = grid::ccr_distance(planned, current) <= plan[t].gamma_star &&
                            stable_at_both(exact, prev, ops[t], planned);
          rec.verify_ms = ms_since(t0);
          rec.verification_calls = 1;
          rec.gamma_star = plan[t].gamma_star;
          rec.relaxations = plan[t].relaxations;
          if (rec.plan_stable) {
            assigned = planned;
          } else {
            spdlog::info("day-ahead slot {}: planned CCRC {} is not executable, corrective exact MCDM", t,
                         planned.id());
            if (!ctx.current_indicators) throw NoStableAlternative("current CCRC has no indicators at the current OP");
            assigned = mcdm(exact);
          }
          break;
        }
        case Mode::no_mcdm: {
          const auto t0 = Clock::now();
          rec.gamma_star = static_cast<int>(ipcs);
          rec.verification_calls = 1;
          if (!stable_at_both(exact, prev, ops[t], current)) {
            bool found = false;
            for (auto id : pair) {
              if (id == current.id()) continue;
              const auto c = grid::Ccrc::from_id(id, ipcs);
              ++rec.verification_calls;
              if (stable_at_both(exact, prev, ops[t], c)) {
                assigned = c;
                found = true;
                break;
              }
            }
            if (!found) {
              rec.verify_ms = ms_since(t0);
              throw NoStableAlternative("neither fallback CCRC is stable at both operating points");
            }
          }
          rec.verify_ms = ms_since(t0);
          break;
        }
      }
    } catch (const Error& e) {
      rec.error = std::string(e.kind()) + ": " + e.what();
      spdlog::warn("{} slot {}: {}", mode_name(mode), t, rec.error);
    }
    rec.ccrc = assigned.id();
    if (mode != Mode::day_ahead) rec.planned = rec.ccrc;
    rec.verified = stable_at_both(exact, prev, ops[t], assigned);
    rec.indicators = exact.indicators(ops[t], assigned);
    rec.gamma = grid::ccr_distance(assigned, current);
    current = assigned;
    records.push_back(std::move(rec));
  }
  return records;
}

DayScenario day_scenario(const grid::OperatingRanges& ranges, std::size_t slots, std::uint64_t seed) {
  if (slots == 0) throw InvalidInput("day_scenario: zero slots");
  const dataforge::OpSpace space(ranges);
  const auto G = ranges.generators.size(), L = ranges.load_base_share.size();
  Rng rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2 * std::numbers::pi);
  std::uniform_real_distribution<double> amp(0.2, 0.4);
  std::vector<double> gen_phase(G), gen_amp(G), pf_phase(G), share_phase(L);
  for (std::size_t g = 0; g < G; ++g) {
    gen_phase[g] = phase(rng);
    gen_amp[g] = amp(rng);
    pf_phase[g] = phase(rng);
  }
  for (auto& p : share_phase) p = phase(rng);
  const auto clamp01 = [](double v) { return std::clamp(v, 0.02, 0.98); };
  const double w = 2 * std::numbers::pi / 24.0;

  DayScenario s;
  std::normal_distribution<double> noise(0.0, 1.0);
  Rng nrng(derive_seed(seed, "deviation"));
  for (std::size_t t = 0; t < slots; ++t) {
    const double h = 24.0 * static_cast<double>(t) / static_cast<double>(slots);
    Eigen::VectorXd u(static_cast<Eigen::Index>(space.dimension()));
    Eigen::Index d = 0;
    for (std::size_t g = 0; g < G; ++g)
      u(d++) = clamp01(0.5 + gen_amp[g] * std::sin(w * h + gen_phase[g]) + 0.08 * std::sin(3 * w * h + gen_phase[g]));
    for (std::size_t g = 0; g < G; ++g) u(d++) = clamp01(0.5 + 0.3 * std::sin(w * h + pf_phase[g]));
    u(d++) = clamp01(0.5 + 0.35 * std::sin(w * (h - 9.0)) + 0.1 * std::sin(2 * w * h));
    for (std::size_t l = 0; l < L; ++l) u(d++) = clamp01(0.5 + 0.3 * std::sin(w * h + share_phase[l]));
    auto f = space.to_op(u);
    auto a = f;
    for (std::size_t g = 0; g < G; ++g) {
      const auto& r = ranges.generators[g];
      a.generators[g].p_mw = std::clamp(f.generators[g].p_mw * (1 + kGenerationNoise * noise(nrng)), r.p_min_mw, r.p_max_mw);
    }
    a.demand_mw = std::clamp(f.demand_mw * (1 + kDemandNoise * noise(nrng)), ranges.demand_min_mw, ranges.demand_max_mw);
    s.forecast.push_back(std::move(f));
    s.actual.push_back(std::move(a));
  }
  return s;
}

void write_ops_csv(const grid::GridTopology& topology, const std::vector<grid::OperatingPoint>& ops,
                   const std::filesystem::path& path) {
  CsvTable t;
  for (const auto& g : topology.generators()) t.header.push_back("P_" + g.id);
  for (const auto& g : topology.generators()) t.header.push_back("cosphi_" + g.id);
  t.header.push_back("demand");
  for (const auto& l : topology.loads()) t.header.push_back("share_" + l.id);
  for (const auto& op : ops) {
    if (op.generators.size() != topology.generators().size() || op.load_shares.size() != topology.loads().size())
      throw InvalidInput("write_ops_csv: operating point does not match the topology");
    std::vector<std::string> row;
    for (const auto& g : op.generators) row.push_back(format_number(g.p_mw));
    for (const auto& g : op.generators) row.push_back(format_number(g.cos_phi));
    row.push_back(format_number(op.demand_mw));
    for (double s : op.load_shares) row.push_back(format_number(s));
    t.rows.push_back(std::move(row));
  }
  write_csv(path, t);
}

std::vector<grid::OperatingPoint> read_ops_csv(const grid::GridTopology& topology, const std::filesystem::path& path) {
  const auto t = read_csv(path);
  std::vector<std::size_t> p, c, s;
  for (const auto& g : topology.generators()) {
    p.push_back(t.column("P_" + g.id));
    c.push_back(t.column("cosphi_" + g.id));
  }
  const auto d = t.column("demand");
  for (const auto& l : topology.loads()) s.push_back(t.column("share_" + l.id));
  std::vector<grid::OperatingPoint> ops;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    grid::OperatingPoint op;
    for (std::size_t g = 0; g < p.size(); ++g) op.generators.push_back({t.number(r, p[g]), t.number(r, c[g])});
    op.demand_mw = t.number(r, d);
    for (auto j : s) op.load_shares.push_back(t.number(r, j));
    try {
      grid::validate_operating_point(topology.ranges(), op);
    } catch (const InvalidInput& e) {
      throw InvalidInput(path.string() + " row " + std::to_string(r + 1) + ": " + e.what());
    }
    ops.push_back(std::move(op));
  }
  return ops;
}

namespace {

Quartiles quartiles(std::vector<double> v) {
  Quartiles q;
  q.count = v.size();
  if (v.empty()) return q;
  q.min = *std::min_element(v.begin(), v.end());
  q.max = *std::max_element(v.begin(), v.end());
  q.q1 = dataforge::percentile(v, 0.25);
  q.median = dataforge::percentile(v, 0.5);
  q.q3 = dataforge::percentile(v, 0.75);
  double sum = 0;
  for (double x : v) sum += x;
  q.mean = sum / static_cast<double>(v.size());
  return q;
}

}  // namespace

BenchmarkReport compare_schedules(const std::vector<std::vector<ScheduleRecord>>& runs) {
  if (runs.size() < 2) throw InvalidInput("compare_schedules: need at least two modes");
  const std::vector<ScheduleRecord>* ref = nullptr;
  for (const auto& r : runs) {
    if (r.empty()) throw InvalidInput("compare_schedules: empty schedule");
    if (r.size() != runs.front().size()) throw InvalidInput("compare_schedules: schedules differ in length");
    if (r.front().mode == Mode::exact && !ref) ref = &r;
  }
  if (!ref) throw InvalidInput("compare_schedules: no exact-mode schedule to compare against");
  BenchmarkReport rep;
  for (const auto& run : runs) {
    ModeSummary s;
    s.mode = run.front().mode;
    s.slots = run.size();
    std::size_t same = 0, unstable = 0;
    std::array<std::vector<double>, kCriteria> vals;
    double solve = 0, verify = 0;
    for (std::size_t t = 0; t < run.size(); ++t) {
      const auto& r = run[t];
      same += r.ccrc == (*ref)[t].ccrc;
      unstable += !r.plan_stable || !r.verified;
      s.errors += !r.error.empty();
      solve += r.solve_ms;
      verify += r.verify_ms;
      if (r.verified && r.indicators)
        for (std::size_t k = 0; k < kCriteria; ++k) vals[k].push_back((*r.indicators)[k]);
    }
    const double n = static_cast<double>(run.size());
    s.agreement = 100.0 * static_cast<double>(same) / n;
    s.instability = 100.0 * static_cast<double>(unstable) / n;
    s.mean_solve_ms = solve / n;
    s.mean_verify_ms = verify / n;
    for (std::size_t k = 0; k < kCriteria; ++k) s.indicators[k] = quartiles(vals[k]);
    rep.modes.push_back(s);
  }
  const ModeSummary *ex = nullptr, *dd = nullptr;
  for (const auto& s : rep.modes) {
    if (s.mode == Mode::exact && !ex) ex = &s;
    if (s.mode == Mode::data_driven && !dd) dd = &s;
  }
  if (ex && dd && ex->mean_solve_ms > 0) rep.speedup = 1.0 - dd->mean_solve_ms / ex->mean_solve_ms;
  return rep;
}

nlohmann::json report_to_json(const BenchmarkReport& report) {
  nlohmann::json doc;
  doc["modes"] = nlohmann::json::array();
  for (const auto& s : report.modes) {
    nlohmann::json m;
    m["mode"] = mode_name(s.mode);
    m["slots"] = s.slots;
    m["agreement_pct"] = s.agreement;
    m["instability_pct"] = s.instability;
    m["mean_solve_ms"] = s.mean_solve_ms;
    m["mean_verify_ms"] = s.mean_verify_ms;
    m["errors"] = s.errors;
    for (std::size_t k = 0; k < kCriteria; ++k) {
      const auto& q = s.indicators[k];
      m["indicators"][indicator_label(k)] = {{"count", q.count}, {"min", q.min},   {"q1", q.q1},   {"median", q.median},
                                             {"q3", q.q3},       {"max", q.max},   {"mean", q.mean}};
    }
    doc["modes"].push_back(m);
  }
  doc["speedup"] = report.speedup ? nlohmann::json(*report.speedup) : nlohmann::json(nullptr);
  return doc;
}

void write_schedule_outputs(const grid::GridTopology& topology,
                            const std::vector<std::vector<ScheduleRecord>>& runs, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto ipcs = topology.ipc_count();
  CsvTable timing{{"mode", "slot", "alternatives", "solve_ms", "verify_ms"}, {}};
  for (const auto& run : runs) {
    if (run.empty()) continue;
    const std::string mode(mode_name(run.front().mode));
    CsvTable sched{{"slot", "ccrc", "label", "planned", "plan_stable", "verified", "H2_f", "H2_Vdc", "K_f", "K_Vdc",
                    "gamma", "gamma_star", "relaxations", "alternatives", "verification_calls", "error"},
                   {}};
    CsvTable roles{{"slot"}, {}};
    for (const auto& ipc : topology.ipcs()) roles.header.push_back(ipc.id);
    for (const auto& r : run) {
      const auto c = grid::Ccrc::from_id(r.ccrc, ipcs);
      std::vector<std::string> row{std::to_string(r.slot), std::to_string(r.ccrc), c.label(),
                                   std::to_string(r.planned), r.plan_stable ? "1" : "0", r.verified ? "1" : "0"};
      for (std::size_t k = 0; k < kCriteria; ++k) row.push_back(r.indicators ? format_number((*r.indicators)[k]) : "");
      for (auto v : {r.gamma, r.gamma_star, r.relaxations}) row.push_back(std::to_string(v));
      row.push_back(std::to_string(r.alternatives));
      row.push_back(std::to_string(r.verification_calls));
      row.push_back(r.error);
      sched.rows.push_back(std::move(row));
      std::vector<std::string> rr{std::to_string(r.slot)};
      for (std::size_t i = 0; i < ipcs; ++i) rr.emplace_back(grid::role_name(c.role(i)));
      roles.rows.push_back(std::move(rr));
      timing.rows.push_back({mode, std::to_string(r.slot), std::to_string(r.alternatives), format_number(r.solve_ms),
                             format_number(r.verify_ms)});
    }
    write_csv(dir / ("schedule_" + mode + ".csv"), sched);
    write_csv(dir / ("roles_" + mode + ".csv"), roles);
  }
  write_csv(dir / "timing.csv", timing);

  // CCRC per slot, one step line per mode.
  std::vector<grid::CcrcId> seen;
  for (const auto& run : runs)
    for (const auto& r : run)
      if (std::find(seen.begin(), seen.end(), r.ccrc) == seen.end()) seen.push_back(r.ccrc);
  std::sort(seen.begin(), seen.end());
  const double left = 60, top = 30, width = 600, lane = 18;
  const double height = lane * static_cast<double>(std::max<std::size_t>(seen.size(), 1));
  SvgDocument svg(left + width + 140, top + height + 40);
  svg.text(left, 18, "assigned CCRC per slot", 12);
  for (std::size_t i = 0; i < seen.size(); ++i)
    svg.text(left - 6, top + lane * (static_cast<double>(i) + 0.5) + 3, std::to_string(seen[i]), 9, "end");
  for (std::size_t m = 0; m < runs.size(); ++m) {
    const auto& run = runs[m];
    if (run.empty()) continue;
    std::string pts;
    const double dx = width / static_cast<double>(run.size());
    for (const auto& r : run) {
      const auto lanei = static_cast<double>(std::find(seen.begin(), seen.end(), r.ccrc) - seen.begin());
      const double y = top + lane * (lanei + 0.5) + 2.0 * static_cast<double>(m);
      pts += format_number(left + dx * static_cast<double>(r.slot)) + "," + format_number(y) + " " +
             format_number(left + dx * static_cast<double>(r.slot + 1)) + "," + format_number(y) + " ";
      if (!r.verified || !r.plan_stable) svg.circle(left + dx * (static_cast<double>(r.slot) + 0.5), y, 2.5, "#d62728");
    }
    svg.polyline(pts, series_color(m), 1.5);
    svg.text(left + width + 10, top + 12 * static_cast<double>(m + 1), mode_name(run.front().mode), 10);
  }
  svg.save(dir / "schedule.svg");

  if (runs.size() >= 2 && std::any_of(runs.begin(), runs.end(), [](const auto& r) {
        return !r.empty() && r.front().mode == Mode::exact;
      })) {
    const auto rep = compare_schedules(runs);
    CsvTable box{{"mode", "indicator", "count", "min", "q1", "median", "q3", "max", "mean"}, {}};
    for (const auto& s : rep.modes)
      for (std::size_t k = 0; k < kCriteria; ++k) {
        const auto& q = s.indicators[k];
        box.rows.push_back({std::string(mode_name(s.mode)), indicator_label(k), std::to_string(q.count),
                            format_number(q.min), format_number(q.q1), format_number(q.median), format_number(q.q3),
                            format_number(q.max), format_number(q.mean)});
      }
    write_csv(dir / "indicator_boxplot.csv", box);
    std::ofstream out(dir / "benchmark.json");
    if (!out) throw IoError("cannot write " + (dir / "benchmark.json").string());
    out << report_to_json(rep).dump(2) << '\n';
  }

  // solve time against alternative count
  double tmax = 1e-9;
  std::size_t amax = 1;
  for (const auto& r : timing.rows) {
    tmax = std::max(tmax, std::stod(r[3]));
    amax = std::max<std::size_t>(amax, std::stoul(r[2]));
  }
  SvgDocument sc(left + 400 + 140, top + 300 + 40);
  sc.text(left, 18, "MCDM solve time [ms] vs alternatives", 12);
  sc.line(left, top + 300, left + 400, top + 300, "#000000");
  sc.line(left, top, left, top + 300, "#000000");
  sc.text(left - 4, top + 8, format_number(tmax), 8, "end");
  sc.text(left + 400, top + 312, std::to_string(amax), 8, "end");
  std::size_t series = 0;
  std::string last;
  for (const auto& r : timing.rows) {
    if (r[0] != last) {
      if (!last.empty()) ++series;
      last = r[0];
      sc.text(left + 410, top + 12 * static_cast<double>(series + 1), last, 10);
    }
    sc.circle(left + 400 * std::stod(r[2]) / static_cast<double>(amax), top + 300 - 300 * std::stod(r[3]) / tmax, 2,
              series_color(series));
  }
  sc.save(dir / "timing.svg");
}

}  // namespace acdc::scheduler
