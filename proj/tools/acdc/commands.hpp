#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "acdc/grid/ccrc.hpp"
#include "acdc/grid/topology.hpp"
#include "manifest.hpp"

namespace acdc::cli {

namespace fs = std::filesystem;

// Accepts a numeric id or a role label such as "AC-GFM|GFL|DC-GFM|...".
grid::Ccrc parse_ccrc(const std::string& text, const grid::GridTopology& topology);

// JSON ({"reduced": [...]} or a bare array) or whitespace/comma separated ids.
std::vector<grid::Ccrc> read_ccrc_set(const fs::path& path, const grid::GridTopology& topology);

std::vector<double> parse_weights(const std::string& text);

struct EnumerateArgs {
  fs::path out = ".";
};
void run_enumerate(const grid::GridTopology& topology, const EnumerateArgs& a, RunManifest& m);

struct PowerflowArgs {
  fs::path op;
  std::string ccrc;
  fs::path out = ".";
};
void run_powerflow(const grid::GridTopology& topology, const PowerflowArgs& a, RunManifest& m);

struct AssessArgs {
  fs::path op;
  std::string ccrc;
  bool dump_ss = false;
  fs::path out = ".";
};
void run_assess(const grid::GridTopology& topology, const AssessArgs& a, RunManifest& m);

struct IndicatorsArgs {
  std::size_t ops = 200;
  std::optional<fs::path> ops_file;
  std::optional<fs::path> ccrc_set;  // default: every feasible CCRC
  std::uint64_t seed = 0;
  fs::path out;
};
void run_indicators(const grid::GridTopology& topology, const IndicatorsArgs& a, RunManifest& m);

struct DatagenArgs {
  fs::path ccrc_set;
  std::size_t budget = 360;
  std::size_t regressor_budget = 400;
  std::uint64_t seed = 0;
  fs::path out;
};
void run_datagen(const grid::GridTopology& topology, const DatagenArgs& a, RunManifest& m);

struct TrainArgs {
  fs::path data;
  std::uint64_t seed = 0;
  std::size_t folds = 5;
  double winsor = 0.95;
  fs::path out;
};
void run_train(const TrainArgs& a, RunManifest& m);

struct PredictArgs {
  fs::path model;
  fs::path data;  // dataset stem
  fs::path out;
};
void run_predict(const PredictArgs& a, RunManifest& m);

struct ReduceArgs {
  fs::path table;
  std::size_t regions = 20;
  std::uint64_t seed = 0;
  fs::path out;
};
void run_reduce(const ReduceArgs& a, RunManifest& m);

struct ScheduleArgs {
  std::string mode;
  fs::path ops;
  std::optional<fs::path> forecast;
  std::optional<fs::path> models;
  fs::path reduced;
  std::optional<grid::CcrcId> initial;
  int gamma_star = 1;
  std::string weights = "0.25,0.25,0.25,0.25";
  fs::path out;
};
void run_schedule_cmd(const grid::GridTopology& topology, const ScheduleArgs& a, RunManifest& m);

struct BenchmarkArgs {
  fs::path reduced;
  fs::path models;
  std::size_t slots = 96;
  std::uint64_t seed = 0;
  int gamma_star = 1;
  std::string weights = "0.25,0.25,0.25,0.25";
  fs::path out;
};
void run_benchmark(const grid::GridTopology& topology, const BenchmarkArgs& a, RunManifest& m);

struct PlotArgs {
  fs::path csv;
  std::string x;
  std::string y;  // comma separated columns
  std::string title;
  fs::path out;  // .svg
};
void run_plot(const PlotArgs& a, RunManifest& m);

}  // namespace acdc::cli
