#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "acdc/common/error.hpp"
#include "acdc/common/hash.hpp"
#include "acdc/common/log.hpp"
#include "acdc/common/parallel.hpp"
#include "acdc/grid/topology.hpp"
#include "commands.hpp"
#include "manifest.hpp"

namespace fs = std::filesystem;

namespace {

std::string topology_digest(const acdc::grid::GridTopology& topology) {
  return fmt::format("{:016x}", acdc::fnv1a64(acdc::grid::topology_to_json(topology).dump()));
}

fs::path parent_or_cwd(const fs::path& file) { return file.parent_path().empty() ? fs::path(".") : file.parent_path(); }

}  // namespace

using namespace acdc::cli;

int main(int argc, char** argv) {
  acdc::init_logging_from_env();

  CLI::App app{"AC/DC converter control-role scheduling toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string grid_path = "default";
  std::size_t jobs = 0;
  app.add_option("--grid", grid_path, "grid JSON file or 'default' for the bundled system")->capture_default_str();
  app.add_option("--jobs", jobs, "worker cap (0 = logical cores)")->capture_default_str();

  EnumerateArgs en;
  auto* c_en = app.add_subcommand("enumerate", "count all and feasible CCRCs, write ccrcs.csv");
  c_en->add_option("--out", en.out, "output directory")->capture_default_str();

  PowerflowArgs pf;
  auto* c_pf = app.add_subcommand("powerflow", "solve the AC/DC power flow at one OP");
  c_pf->add_option("--op", pf.op, "operating point JSON")->required()->check(CLI::ExistingFile);
  c_pf->add_option("--ccrc", pf.ccrc, "CCRC id or role label")->required();
  c_pf->add_option("--out", pf.out, "output directory")->capture_default_str();

  AssessArgs as;
  auto* c_as = app.add_subcommand("assess", "small-signal label and indicators at one OP");
  c_as->add_option("--op", as.op, "operating point JSON")->required()->check(CLI::ExistingFile);
  c_as->add_option("--ccrc", as.ccrc, "CCRC id or role label")->required();
  c_as->add_flag("--dump-ss", as.dump_ss, "write A, B, C, D and the registries");
  c_as->add_option("--out", as.out, "output directory")->capture_default_str();

  IndicatorsArgs ind;
  auto* c_ind = app.add_subcommand("indicators", "exact indicator table over LHS OPs and CCRCs");
  c_ind->add_option("--ops", ind.ops, "number of LHS operating points")->capture_default_str();
  c_ind->add_option("--ops-file", ind.ops_file, "OP sequence CSV instead of LHS")->check(CLI::ExistingFile);
  c_ind->add_option("--ccrc-set", ind.ccrc_set, "CCRC set file (default: all feasible)")->check(CLI::ExistingFile);
  c_ind->add_option("--seed", ind.seed, "LHS seed")->required();
  c_ind->add_option("--out", ind.out, "output directory")->required();

  DatagenArgs dg;
  auto* c_dg = app.add_subcommand("datagen", "stability and indicator datasets over a CCRC set");
  c_dg->add_option("--ccrc-set", dg.ccrc_set, "CCRC set file")->required()->check(CLI::ExistingFile);
  c_dg->add_option("--budget", dg.budget, "entropy-guided OPs per CCRC")->capture_default_str();
  c_dg->add_option("--regressor-budget", dg.regressor_budget, "LHS OPs per CCRC for indicators")
      ->capture_default_str();
  c_dg->add_option("--seed", dg.seed, "generation seed")->required();
  c_dg->add_option("--out", dg.out, "output directory")->required();

  TrainArgs tr;
  auto* c_tr = app.add_subcommand("train", "fit the stability classifier and indicator regressors");
  c_tr->add_option("--data", tr.data, "datagen output directory")->required()->check(CLI::ExistingDirectory);
  c_tr->add_option("--seed", tr.seed, "training seed")->required();
  c_tr->add_option("--folds", tr.folds, "cross-validation folds")->capture_default_str()->check(CLI::Range(2, 50));
  c_tr->add_option("--winsor", tr.winsor, "winsorization percentile")->capture_default_str()->check(CLI::Range(0.5, 1.0));
  c_tr->add_option("--out", tr.out, "model store directory")->required();

  PredictArgs pr;
  auto* c_pr = app.add_subcommand("predict", "apply one stored model to a dataset");
  c_pr->add_option("--model", pr.model, "model directory")->required()->check(CLI::ExistingDirectory);
  c_pr->add_option("--data", pr.data, "dataset stem (without .csv)")->required();
  c_pr->add_option("--out", pr.out, "predictions CSV")->required();

  ReduceArgs rd;
  auto* c_rd = app.add_subcommand("reduce", "reduced CCRC set from an indicator table");
  c_rd->add_option("--table", rd.table, "indicator table directory")->required()->check(CLI::ExistingDirectory);
  c_rd->add_option("--regions", rd.regions, "operating-space subregions")->capture_default_str();
  c_rd->add_option("--seed", rd.seed, "partition seed")->required();
  c_rd->add_option("--out", rd.out, "output directory")->required();

  ScheduleArgs sc;
  auto* c_sc = app.add_subcommand("schedule", "CCRC schedule over an OP sequence");
  c_sc->add_option("--mode", sc.mode, "exact | data-driven | day-ahead | no-mcdm")
      ->required()
      ->check(CLI::IsMember({"exact", "data-driven", "day-ahead", "no-mcdm"}));
  c_sc->add_option("--ops", sc.ops, "OP sequence CSV")->required()->check(CLI::ExistingFile);
  c_sc->add_option("--forecast", sc.forecast, "forecast OP CSV (day-ahead)")->check(CLI::ExistingFile);
  c_sc->add_option("--models", sc.models, "model store (data-driven)")->check(CLI::ExistingDirectory);
  c_sc->add_option("--reduced", sc.reduced, "reduced CCRC set file")->required()->check(CLI::ExistingFile);
  c_sc->add_option("--initial", sc.initial, "initial CCRC id");
  c_sc->add_option("--gamma-star", sc.gamma_star, "max role changes per transition")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  c_sc->add_option("--weights", sc.weights, "H2_f,H2_Vdc,K_f,K_Vdc weights")->capture_default_str();
  c_sc->add_option("--out", sc.out, "output directory")->required();

  BenchmarkArgs bm;
  auto* c_bm = app.add_subcommand("benchmark", "seeded day scenario in all four modes");
  c_bm->add_option("--reduced", bm.reduced, "reduced CCRC set file")->required()->check(CLI::ExistingFile);
  c_bm->add_option("--models", bm.models, "model store")->required()->check(CLI::ExistingDirectory);
  c_bm->add_option("--slots", bm.slots, "quarter-hour slots")->capture_default_str();
  c_bm->add_option("--seed", bm.seed, "scenario seed")->required();
  c_bm->add_option("--gamma-star", bm.gamma_star, "max role changes per transition")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  c_bm->add_option("--weights", bm.weights, "H2_f,H2_Vdc,K_f,K_Vdc weights")->capture_default_str();
  c_bm->add_option("--out", bm.out, "output directory")->required();

  PlotArgs pl;
  auto* c_pl = app.add_subcommand("plot", "line plot of CSV columns as SVG");
  c_pl->add_option("--csv", pl.csv, "input CSV")->required()->check(CLI::ExistingFile);
  c_pl->add_option("--x", pl.x, "x column")->required();
  c_pl->add_option("--y", pl.y, "comma separated y columns")->required();
  c_pl->add_option("--title", pl.title, "plot title");
  c_pl->add_option("--out", pl.out, "output SVG")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error[usage]: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  std::vector<std::string> args(argv + 1, argv + argc);
  RunManifest manifest(sub->get_name(), args);

  try {
    acdc::set_max_jobs(jobs);
    manifest.set("jobs", jobs);
    const bool needs_grid = !(sub == c_tr || sub == c_pr || sub == c_rd || sub == c_pl);
    std::optional<acdc::grid::GridTopology> topology;
    if (needs_grid) {
      topology.emplace(acdc::grid::resolve_topology(grid_path));
      manifest.set("grid", grid_path);
      manifest.set("grid_digest", topology_digest(*topology));
    }

    fs::path dir;
    if (sub == c_en) {
      manifest.set_base(dir = en.out);
      run_enumerate(*topology, en, manifest);
    } else if (sub == c_pf) {
      manifest.set_base(dir = pf.out);
      run_powerflow(*topology, pf, manifest);
    } else if (sub == c_as) {
      manifest.set_base(dir = as.out);
      run_assess(*topology, as, manifest);
    } else if (sub == c_ind) {
      manifest.set_base(dir = ind.out);
      run_indicators(*topology, ind, manifest);
    } else if (sub == c_dg) {
      manifest.set_base(dir = dg.out);
      run_datagen(*topology, dg, manifest);
    } else if (sub == c_tr) {
      manifest.set_base(dir = tr.out);
      run_train(tr, manifest);
    } else if (sub == c_pr) {
      manifest.set_base(dir = parent_or_cwd(pr.out));
      run_predict(pr, manifest);
    } else if (sub == c_rd) {
      manifest.set_base(dir = rd.out);
      run_reduce(rd, manifest);
    } else if (sub == c_sc) {
      manifest.set_base(dir = sc.out);
      run_schedule_cmd(*topology, sc, manifest);
    } else if (sub == c_bm) {
      manifest.set_base(dir = bm.out);
      run_benchmark(*topology, bm, manifest);
    } else if (sub == c_pl) {
      manifest.set_base(dir = parent_or_cwd(pl.out));
      run_plot(pl, manifest);
    }
    manifest.write(dir);
  } catch (const acdc::Error& e) {
    std::cerr << "error[" << e.kind() << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
