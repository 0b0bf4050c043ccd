#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "acdc/common/csv.hpp"
#include "acdc/common/error.hpp"
#include "acdc/common/svg.hpp"
#include "acdc/dataforge/dataset.hpp"
#include "acdc/dataforge/engineering.hpp"
#include "acdc/dataforge/sampling.hpp"
#include "acdc/grid/feasibility.hpp"
#include "acdc/powerflow/features.hpp"
#include "acdc/powerflow/internals.hpp"
#include "acdc/powerflow/solver.hpp"
#include "acdc/reduction/performance_map.hpp"
#include "acdc/reduction/selection.hpp"
#include "acdc/scheduler/oracle.hpp"
#include "acdc/scheduler/schedule.hpp"
#include "acdc/smallsignal/indicators.hpp"
#include "acdc/smallsignal/state_space.hpp"
#include "acdc/surrogate/metrics.hpp"
#include "acdc/surrogate/training.hpp"

namespace acdc::cli {

using nlohmann::json;

namespace {

grid::OperatingPoint read_op(const fs::path& path, const grid::GridTopology& topology) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
  auto op = grid::operating_point_from_json(doc);
  grid::validate_operating_point(topology.ranges(), op);
  return op;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string show(const std::optional<double>& v) { return v ? fmt::format("{:.6g}", *v) : "undefined"; }

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

CsvTable matrix_csv(const Eigen::MatrixXd& M, const std::vector<std::string>& rows,
                    const std::vector<std::string>& cols) {
  CsvTable t;
  t.header.push_back("row");
  t.header.insert(t.header.end(), cols.begin(), cols.end());
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    std::vector<std::string> r{rows.at(static_cast<std::size_t>(i))};
    for (Eigen::Index j = 0; j < M.cols(); ++j) r.push_back(format_number(M(i, j)));
    t.rows.push_back(std::move(r));
  }
  return t;
}

scheduler::Weights weights_array(const std::string& text) {
  const auto w = parse_weights(text);
  if (w.size() != scheduler::kCriteria)
    throw InvalidInput(fmt::format("--weights needs {} values, got {}", scheduler::kCriteria, w.size()));
  scheduler::Weights out{};
  std::copy(w.begin(), w.end(), out.begin());
  return out;
}

}  // namespace

grid::Ccrc parse_ccrc(const std::string& text, const grid::GridTopology& topology) {
  const auto n = topology.ipc_count();
  if (!text.empty() && std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    const auto id = std::stoull(text);
    if (id >= grid::ccrc_count(n))
      throw InvalidInput(fmt::format("CCRC id {} out of range [0, {})", id, grid::ccrc_count(n)));
    return grid::Ccrc::from_id(static_cast<grid::CcrcId>(id), n);
  }
  std::vector<grid::ControlRole> roles;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, '|')) roles.push_back(grid::parse_role(tok));
  if (roles.size() != n) throw InvalidInput(fmt::format("CCRC label '{}' needs {} roles", text, n));
  return grid::Ccrc(std::move(roles));
}

std::vector<grid::Ccrc> read_ccrc_set(const fs::path& path, const grid::GridTopology& topology) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const auto text = buf.str();
  std::vector<std::string> items;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::exception& e) {
      throw InvalidInput(path.string() + ": " + e.what());
    }
    const json& ids = doc.is_object() ? doc.at("reduced") : doc;
    for (const auto& v : ids) items.push_back(v.is_string() ? v.get<std::string>() : std::to_string(v.get<long long>()));
  } else {
    std::string t = text;
    std::replace(t.begin(), t.end(), ',', ' ');
    std::stringstream ss(t);
    std::string tok;
    while (ss >> tok) items.push_back(tok);
  }
  if (items.empty()) throw InvalidInput(path.string() + ": empty CCRC set");
  std::vector<grid::Ccrc> out;
  for (const auto& s : items) {
    auto c = parse_ccrc(s, topology);
    if (!grid::is_feasible(topology, c)) throw InvalidInput(fmt::format("CCRC {} is not feasible", c.id()));
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id() < b.id(); });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> parse_weights(const std::string& text) {
  std::vector<double> w;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      w.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw InvalidInput("not a number in weight list: '" + tok + "'");
    }
  }
  return w;
}

void run_enumerate(const grid::GridTopology& topology, const EnumerateArgs& a, RunManifest& m) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto all = grid::enumerate_all_ccrcs(topology);
  std::size_t feasible = 0;
  CsvTable t;
  t.header = {"id", "label", "feasible"};
  for (const auto& c : all) {
    const bool ok = grid::is_feasible(topology, c);
    feasible += ok;
    t.rows.push_back({std::to_string(c.id()), c.label(), ok ? "1" : "0"});
  }
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  fmt::print("{} total / {} feasible\n", all.size(), feasible);
  spdlog::info("enumeration took {:.2f} ms", ms);
  fs::create_directories(a.out);
  write_csv(a.out / "ccrcs.csv", t);
  m.artifact(a.out / "ccrcs.csv");
}

void run_powerflow(const grid::GridTopology& topology, const PowerflowArgs& a, RunManifest& m) {
  const auto op = read_op(a.op, topology);
  const auto ccrc = parse_ccrc(a.ccrc, topology);
  m.set("ccrc", ccrc.id());
  const auto pf = powerflow::solve_power_flow(topology, op, ccrc);
  const auto losses = powerflow::compute_losses(topology, pf);
  const auto row = powerflow::extract_feature_vector(topology, pf, powerflow::compute_ipc_internals(topology, pf));

  fmt::print("ccrc {} ({})\n", ccrc.id(), ccrc.label());
  fmt::print("converged in {} iterations, max mismatch {:.3g} p.u.\n", pf.iterations, pf.max_mismatch);
  fmt::print("losses: ac {:.4f} MW, dc {:.4f} MW, converters {:.4f} MW\n", losses.ac_lines_mw, losses.dc_lines_mw,
             losses.converters_mw);

  CsvTable t;
  std::vector<std::string> values;
  for (std::size_t i = 0; i < row.columns.size(); ++i) {
    t.header.push_back(row.columns[i].name);
    values.push_back(format_number(row.values[i]));
  }
  t.rows.push_back(std::move(values));
  fs::create_directories(a.out);
  write_csv(a.out / "powerflow.csv", t);
  m.artifact(a.out / "powerflow.csv");
}

void run_assess(const grid::GridTopology& topology, const AssessArgs& a, RunManifest& m) {
  const auto op = read_op(a.op, topology);
  const auto ccrc = parse_ccrc(a.ccrc, topology);
  m.set("ccrc", ccrc.id());
  const auto pf = powerflow::solve_power_flow(topology, op, ccrc);
  const auto ss = smallsignal::assemble_state_space(topology, ccrc, pf);
  const auto ind = smallsignal::indicators(ss);

  fmt::print("ccrc {} ({})\n", ccrc.id(), ccrc.label());
  fmt::print("Y = {}  (abscissa {:.6g} 1/s, {} states)\n", ind.label.stable ? 1 : 0, ind.label.abscissa,
             ss.n_states());
  fmt::print("H2_f = {}  H2_Vdc = {}  K_f = {}  K_Vdc = {}\n", show(ind.h2_f), show(ind.h2_vdc), show(ind.k_f),
             show(ind.k_vdc));

  fs::create_directories(a.out);
  json doc{{"ccrc", ccrc.id()},
           {"label", ccrc.label()},
           {"stable", ind.label.stable},
           {"abscissa", ind.label.abscissa},
           {"states", ss.n_states()},
           {"H2_f", optional_json(ind.h2_f)},
           {"H2_Vdc", optional_json(ind.h2_vdc)},
           {"K_f", optional_json(ind.k_f)},
           {"K_Vdc", optional_json(ind.k_vdc)}};
  write_json(a.out / "assessment.json", doc);
  m.artifact(a.out / "assessment.json");

  if (a.dump_ss) {
    write_csv(a.out / "ss_A.csv", matrix_csv(ss.A, ss.state_names, ss.state_names));
    write_csv(a.out / "ss_B.csv", matrix_csv(ss.B, ss.state_names, ss.input_names));
    write_csv(a.out / "ss_C.csv", matrix_csv(ss.C, ss.output_names, ss.state_names));
    write_csv(a.out / "ss_D.csv", matrix_csv(ss.D, ss.output_names, ss.input_names));
    json reg{{"states", ss.state_names},
             {"inputs", ss.input_names},
             {"outputs", ss.output_names},
             {"frequency_outputs", ss.frequency_outputs},
             {"dc_voltage_outputs", ss.dc_voltage_outputs}};
    write_json(a.out / "ss_registry.json", reg);
    for (const char* f : {"ss_A.csv", "ss_B.csv", "ss_C.csv", "ss_D.csv", "ss_registry.json"}) m.artifact(a.out / f);
  }
}

void run_indicators(const grid::GridTopology& topology, const IndicatorsArgs& a, RunManifest& m) {
  std::vector<grid::OperatingPoint> ops;
  if (a.ops_file) {
    ops = scheduler::read_ops_csv(topology, *a.ops_file);
  } else {
    m.seed("lhs", a.seed);
    auto sample = dataforge::lhs_sample(topology.ranges(), a.ops, a.seed);
    for (const auto& w : sample.warnings) spdlog::warn("{}", w);
    ops = std::move(sample.points);
  }
  const auto ccrcs = a.ccrc_set ? read_ccrc_set(*a.ccrc_set, topology) : grid::feasible_ccrcs(topology);
  m.set("ops", ops.size());
  m.set("ccrcs", ccrcs.size());
  const auto table = reduction::build_indicator_table(topology, ccrcs, ops);
  std::size_t stable = 0;
  for (const auto& s : table.samples) stable += s.stable;
  fmt::print("{} samples over {} CCRCs x {} OPs, {} stable\n", table.samples.size(), ccrcs.size(), ops.size(),
             stable);
  reduction::save_indicator_table(table, a.out);
  m.artifacts_in(a.out);
}

void run_datagen(const grid::GridTopology& topology, const DatagenArgs& a, RunManifest& m) {
  const auto reduced = read_ccrc_set(a.ccrc_set, topology);
  scheduler::TrainingOptions opts;
  opts.classifier_budget = a.budget;
  opts.regressor_budget = a.regressor_budget;
  m.seed("datagen", a.seed);
  m.set("budget", a.budget);
  m.set("regressor_budget", a.regressor_budget);
  const auto corpus = scheduler::generate_corpus(topology, reduced, opts, a.seed);
  const auto& y = corpus.stability.y;
  fmt::print("D_Y: {} rows, {:.1f} % stable\n", corpus.stability.rows(),
             y.size() ? 100.0 * y.mean() : 0.0);
  for (const auto& [id, sets] : corpus.indicators)
    fmt::print("ccrc {}: {} indicator datasets, {} rows each\n", id, sets.size(), sets.empty() ? 0 : sets[0].rows());
  corpus.save(a.out);
  m.artifacts_in(a.out);
}

void run_train(const TrainArgs& a, RunManifest& m) {
  const auto corpus = scheduler::SurrogateCorpus::load(a.data);
  scheduler::TrainingOptions opts;
  opts.folds = a.folds;
  opts.winsor_percentile = a.winsor;
  m.seed("train", a.seed);
  m.set("folds", a.folds);
  m.set("winsor", a.winsor);
  scheduler::TrainingReport report;
  const auto models = scheduler::fit_surrogates(corpus, opts, a.seed, &report);
  models.save(a.out);

  json doc;
  doc["classifier"] = {{"model", report.classifier_model},
                       {"beta", report.classifier_beta},
                       {"cv_f_beta", report.classifier_cv},
                       {"rows", report.classifier_rows}};
  fmt::print("classifier: {} (beta {:.3g}), CV F_beta {:.4f} on {} rows\n", report.classifier_model,
             report.classifier_beta, report.classifier_cv, report.classifier_rows);
  doc["regressors"] = json::object();
  for (const auto& [id, arr] : report.regressors) {
    json per = json::object();
    for (std::size_t j = 0; j < arr.size(); ++j) {
      const auto target = std::string(dataforge::target_name(dataforge::kIndicatorRoles[j]));
      per[target] = {{"model", arr[j].first}, {"cv_r2", arr[j].second}};
      fmt::print("ccrc {} {}: {} CV R2 {:.4f}\n", id, target, arr[j].first, arr[j].second);
    }
    doc["regressors"][std::to_string(id)] = per;
  }
  write_json(a.out / "training_report.json", doc);
  m.artifacts_in(a.out);
}

void run_predict(const PredictArgs& a, RunManifest& m) {
  const auto model = surrogate::TrainedModel::load(a.model);
  const auto ds = dataforge::engineer_features(dataforge::load_dataset(a.data));
  const bool classify = model.spec().task == surrogate::Task::classification;

  CsvTable t;
  Eigen::VectorXd pred;
  t.header = {"row", "prediction"};
  Eigen::VectorXd scores;
  if (classify) {
    auto p = surrogate::predict_stability(model, ds);
    pred = p.labels;
    scores = p.scores;
    t.header.push_back("score");
  } else {
    pred = surrogate::predict_indicator(model, ds);
  }
  const bool truth = ds.y.size() == ds.rows();
  if (truth) t.header.push_back("truth");
  for (Eigen::Index i = 0; i < pred.size(); ++i) {
    std::vector<std::string> r{std::to_string(i), format_number(pred(i))};
    if (classify) r.push_back(format_number(scores(i)));
    if (truth) r.push_back(format_number(ds.y(i)));
    t.rows.push_back(std::move(r));
  }
  fs::create_directories(a.out.parent_path().empty() ? fs::path(".") : a.out.parent_path());
  write_csv(a.out, t);
  m.artifact(a.out);

  if (truth && pred.size() > 0) {
    std::span<const double> p(pred.data(), static_cast<std::size_t>(pred.size()));
    std::span<const double> y(ds.y.data(), static_cast<std::size_t>(ds.y.size()));
    const auto metric = classify ? surrogate::classification_metric(y) : surrogate::regression_metric();
    try {
      fmt::print("{} rows, {} = {:.4f}\n", pred.size(), metric.name(), metric(p, y));
    } catch (const UndefinedMetric& e) {
      fmt::print("{} rows, {} undefined: {}\n", pred.size(), metric.name(), e.what());
    }
  } else {
    fmt::print("{} rows predicted\n", pred.size());
  }
}

void run_reduce(const ReduceArgs& a, RunManifest& m) {
  const auto table = reduction::load_indicator_table(a.table);
  m.seed("partition", a.seed);
  m.set("regions", a.regions);
  const auto out = reduction::reduce(table, a.regions, a.seed);
  fs::create_directories(a.out);
  reduction::render_outputs(out, table, a.out);

  const auto& r = out.result;
  json doc;
  doc["reduced"] = r.reduced;
  doc["indicators"] = json::array();
  for (auto role : r.indicators) doc["indicators"].push_back(std::string(dataforge::target_name(role)));
  doc["groups"] = json::array();
  for (const auto& g : r.groups)
    doc["groups"].push_back({{"attribute", g.attribute}, {"members", g.members}, {"representative", g.representative}});
  std::string rules;
  for (std::size_t i = 0; i < r.rules.size(); ++i) {
    const auto name = i < r.indicators.size() ? std::string(dataforge::target_name(r.indicators[i])) : "";
    rules += "# " + name + "\n" + r.rules[i];
    if (!rules.empty() && rules.back() != '\n') rules += '\n';
  }
  doc["rules"] = rules;
  const auto gaps = reduction::coverage_gaps(out.maps, r.reduced, 1);
  doc["coverage_gaps"] = json::array();
  for (const auto& g : gaps)
    doc["coverage_gaps"].push_back({{"indicator", std::string(dataforge::target_name(g.indicator))},
                                    {"region", g.region},
                                    {"best", g.best},
                                    {"achieved", g.achieved}});
  write_json(a.out / "reduced_set.json", doc);

  fmt::print("reduced set ({}):", r.reduced.size());
  for (auto id : r.reduced) fmt::print(" {}", id);
  fmt::print("\n{} regions, {} coverage gaps beyond one quartile level\n", out.regions.size(), gaps.size());
  m.artifacts_in(a.out);
}

void run_schedule_cmd(const grid::GridTopology& topology, const ScheduleArgs& a, RunManifest& m) {
  const auto mode = scheduler::parse_mode(a.mode);
  const auto ops = scheduler::read_ops_csv(topology, a.ops);
  scheduler::ScheduleConfig config;
  config.reduced = read_ccrc_set(a.reduced, topology);
  config.initial = a.initial;
  config.gamma_star = a.gamma_star;
  config.weights = weights_array(a.weights);
  if (mode == scheduler::Mode::day_ahead) {
    if (!a.forecast) throw InvalidInput("day-ahead mode needs --forecast");
    config.forecast = scheduler::read_ops_csv(topology, *a.forecast);
  }
  std::optional<scheduler::SurrogateModels> models;
  std::optional<scheduler::SurrogateOracle> oracle;
  if (mode == scheduler::Mode::data_driven) {
    if (!a.models) throw InvalidInput("data-driven mode needs --models");
    models = scheduler::SurrogateModels::load(*a.models);
    oracle.emplace(topology, *models);
  }
  m.set("mode", std::string(scheduler::mode_name(mode)));
  m.set("gamma_star", a.gamma_star);
  m.set("weights", config.weights);
  m.set("slots", ops.size());

  const auto run = scheduler::run_schedule(topology, ops, mode, config, oracle ? &*oracle : nullptr);
  scheduler::write_schedule_outputs(topology, {run}, a.out);
  std::size_t verified = 0, errors = 0, switches = 0;
  for (std::size_t i = 0; i < run.size(); ++i) {
    verified += run[i].verified;
    errors += !run[i].error.empty();
    switches += i > 0 && run[i].ccrc != run[i - 1].ccrc;
  }
  fmt::print("{}: {} slots, {} verified, {} switches, {} errors\n", scheduler::mode_name(mode), run.size(), verified,
             switches, errors);
  m.artifacts_in(a.out);
}

void run_benchmark(const grid::GridTopology& topology, const BenchmarkArgs& a, RunManifest& m) {
  m.seed("scenario", a.seed);
  m.set("slots", a.slots);
  m.set("gamma_star", a.gamma_star);
  const auto day = scheduler::day_scenario(topology.ranges(), a.slots, a.seed);
  fs::create_directories(a.out);
  scheduler::write_ops_csv(topology, day.forecast, a.out / "forecast.csv");
  scheduler::write_ops_csv(topology, day.actual, a.out / "actual.csv");

  scheduler::ScheduleConfig config;
  config.reduced = read_ccrc_set(a.reduced, topology);
  config.gamma_star = a.gamma_star;
  config.weights = weights_array(a.weights);
  config.forecast = day.forecast;
  m.set("weights", config.weights);
  const auto models = scheduler::SurrogateModels::load(a.models);
  const scheduler::SurrogateOracle oracle(topology, models);

  std::vector<std::vector<scheduler::ScheduleRecord>> runs;
  for (auto mode : {scheduler::Mode::exact, scheduler::Mode::data_driven, scheduler::Mode::day_ahead,
                    scheduler::Mode::no_mcdm}) {
    spdlog::info("running {} schedule", scheduler::mode_name(mode));
    runs.push_back(scheduler::run_schedule(topology, day.actual, mode, config, &oracle));
  }
  scheduler::write_schedule_outputs(topology, runs, a.out);
  const auto report = scheduler::compare_schedules(runs);
  for (const auto& s : report.modes)
    fmt::print("{:<12} agreement {:6.2f} %  unstable {:5.2f} %  solve {:8.2f} ms  verify {:8.2f} ms  errors {}\n",
               scheduler::mode_name(s.mode), s.agreement, s.instability, s.mean_solve_ms, s.mean_verify_ms,
               s.errors);
  if (report.speedup) fmt::print("data-driven solve-time reduction {:.1f} %\n", 100.0 * *report.speedup);
  m.artifacts_in(a.out);
}

void run_plot(const PlotArgs& a, RunManifest& m) {
  const auto t = read_csv(a.csv);
  const auto xi = t.column(a.x);
  std::vector<std::size_t> ys;
  std::vector<std::string> names;
  {
    std::stringstream ss(a.y);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      ys.push_back(t.column(tok));
      names.push_back(tok);
    }
  }
  if (ys.empty()) throw InvalidInput("--y needs at least one column");
  if (t.rows.empty()) throw InvalidInput(a.csv.string() + " has no rows");

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    x0 = std::min(x0, t.number(r, xi));
    x1 = std::max(x1, t.number(r, xi));
    for (auto c : ys) {
      const double v = t.number(r, c);
      if (!std::isfinite(v)) continue;
      y0 = std::min(y0, v);
      y1 = std::max(y1, v);
    }
  }
  if (!std::isfinite(y0)) throw InvalidInput("no finite values to plot");
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) y1 = y0 + 1.0;

  const double W = 720, H = 400, L = 70, R = 150, T = 40, B = 50;
  SvgDocument svg(W, H);
  svg.rect(0, 0, W, H, "white");
  const auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  const auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
  svg.line(L, H - B, W - R, H - B, "black");
  svg.line(L, T, L, H - B, "black");
  for (int k = 0; k <= 4; ++k) {
    const double fx = x0 + (x1 - x0) * k / 4.0, fy = y0 + (y1 - y0) * k / 4.0;
    svg.text(px(fx), H - B + 16, fmt::format("{:.4g}", fx), 10, "middle");
    svg.text(L - 6, py(fy) + 3, fmt::format("{:.4g}", fy), 10, "end");
  }
  svg.text(W / 2, H - 10, a.x, 11, "middle");
  if (!a.title.empty()) svg.text(W / 2, 20, a.title, 13, "middle");
  for (std::size_t s = 0; s < ys.size(); ++s) {
    std::string pts;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const double v = t.number(r, ys[s]);
      if (!std::isfinite(v)) continue;
      pts += fmt::format("{:.2f},{:.2f} ", px(t.number(r, xi)), py(v));
    }
    svg.polyline(pts, series_color(s), 1.5);
    svg.line(W - R + 10, T + 14.0 * s, W - R + 30, T + 14.0 * s, series_color(s), 2);
    svg.text(W - R + 34, T + 14.0 * s + 3, names[s]);
  }
  fs::create_directories(a.out.parent_path().empty() ? fs::path(".") : a.out.parent_path());
  svg.save(a.out);
  m.artifact(a.out);
}

}  // namespace acdc::cli
