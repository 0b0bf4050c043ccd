#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "acdc/common/csv.hpp"
#include "acdc/common/error.hpp"
#include "acdc/grid/feasibility.hpp"
#include "acdc/powerflow/dispatch.hpp"
#include "acdc/powerflow/features.hpp"
#include "acdc/powerflow/internals.hpp"
#include "acdc/powerflow/solver.hpp"
#include "fixtures.hpp"

using namespace acdc;
using namespace acdc::grid;
using namespace acdc::powerflow;

namespace {

// AC subgrid "S" with an AC-GFM slack at bus S1 feeding a unity-pf load over
// a lossless line of reactance x; its IPC is fed from a Thevenin-backed
// subgrid through a DC link whose far end is DC-GFM.
TopologySpec two_bus_spec(double x) {
  TopologySpec s;
  s.name = "two-bus";
  s.ac_subgrid_ids = {"S", "G"};
  s.dc_subgrid_ids = {"DC"};
  s.ac_buses = {{"S1", 220, 0}, {"S2", 220, 0}, {"GT", 220, 1}, {"G1", 220, 1}};
  s.ac_branches = {{0, 1, 0.0, x}, {2, 3, 0.005, 0.05}};
  s.dc_buses = {{"D1", 320, 0, 0.1}, {"D2", 320, 0, 0.1}};
  s.dc_branches = {{0, 1, 0.005, 0.05}};
  s.ipcs = {{"IPC-S", 0, 0, 300}, {"IPC-G", 3, 1, 300}};
  s.loads = {{"LS", 1, 1.0}};
  s.thevenins = {{"TH", 2, 0.02, 0.2, 1.0}};
  s.ranges.demand_min_mw = 0;
  s.ranges.demand_max_mw = 100;
  s.ranges.load_base_share = {1.0};
  return s;
}

OperatingPoint demand_only(double mw) {
  OperatingPoint op;
  op.demand_mw = mw;
  op.load_shares = {1.0};
  return op;
}

const Ccrc kTwoBusRoles({ControlRole::ac_gfm, ControlRole::dc_gfm});

}  // namespace

TEST_CASE("no-load system stays flat") {
  GridTopology t(two_bus_spec(0.1));
  const auto pf = solve_power_flow(t, demand_only(0.0), kTwoBusRoles);
  for (std::size_t i = 0; i < pf.v_ac.size(); ++i) {
    CHECK(pf.v_ac[i] == Catch::Approx(1.0).margin(1e-10));
    CHECK(pf.theta_ac[i] == Catch::Approx(0.0).margin(1e-10));
  }
  for (double v : pf.v_dc) CHECK(v == Catch::Approx(1.0).margin(1e-10));
  const auto q = compute_ipc_internals(t, pf);
  for (const auto& x : q) {
    CHECK(x.i_diff == Catch::Approx(0.0).margin(1e-10));
    CHECK(x.i_sum == Catch::Approx(0.0).margin(1e-10));
  }
}

TEST_CASE("two-bus line matches the closed-form solution") {
  // Lossless line, V1 = 1 angle 0, load P at bus 2 with Q = 0:
  //   Q balance gives V2 = cos(d), then P = sin(2 d) / (2 x).
  for (double p_mw : {20.0, 50.0, 90.0}) {
    const double x = 0.1, p = p_mw / 100.0;
    const double d = 0.5 * std::asin(2.0 * x * p);
    GridTopology t(two_bus_spec(x));
    const auto pf = solve_power_flow(t, demand_only(p_mw), kTwoBusRoles);
    CHECK(pf.v_ac[1] == Catch::Approx(std::cos(d)).margin(1e-9));
    CHECK(pf.theta_ac[1] == Catch::Approx(-d).margin(1e-9));
    CHECK(pf.ipcs[0].p_ac_mw == Catch::Approx(p_mw).margin(1e-6));
  }
}

TEST_CASE("bundled system converges with conservation, droop and tolerance") {
  const auto t = default_topology();
  const auto feas = feasible_ccrcs(t);
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::size_t> pick(0, feas.size() - 1);
  const auto& par = t.parameters();
  for (int trial = 0; trial < 60; ++trial) {
    const auto op = fixtures::random_op(t, rng);
    const auto& c = feas[pick(rng)];
    const auto pf = solve_power_flow(t, op, c);
    CHECK(pf.max_mismatch < 1e-8);
    CHECK(max_mismatch(t, op, pf) < 1e-8);

    double balance = 0.0;
    for (const auto& g : pf.generators) balance += g.p_mw;
    for (const auto& th : pf.thevenins) balance += th.p_mw;
    for (const auto& l : pf.loads) balance -= l.p_mw;
    const auto losses = compute_losses(t, pf);
    CHECK(losses.ac_lines_mw >= 0.0);
    CHECK(losses.dc_lines_mw >= 0.0);
    CHECK(losses.converters_mw >= 0.0);
    CHECK(balance == Catch::Approx(losses.total()).margin(1e-5));

    for (std::size_t k = 0; k < t.ipc_count(); ++k) {
      if (c.role(k) != ControlRole::dc_gfm) continue;
      const double p = pf.to_pu(pf.ipcs[k].p_dc_mw), ps = pf.to_pu(pf.ipcs[k].schedule_mw);
      CHECK(std::abs(pf.v_dc[t.ipcs()[k].dc_bus] - (par.v_dc0 - par.dc_droop * (p - ps))) < 1e-8);
    }
    for (double v : pf.v_ac) CHECK(v > 0.0);
  }
}

TEST_CASE("dispatch balances DC subgrids and islanded AC subgrids") {
  const auto t = default_topology();
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const auto op = fixtures::random_op(t, rng);
    const auto s = dispatch_ipcs(t, op);
    for (const auto& d : t.dc_subgrids()) {
      double sum = 0.0;
      for (auto k : d.ipcs) sum += s[k];
      CHECK(sum == Catch::Approx(0.0).margin(1e-6));
    }
    // IPC-E exports all wind.
    CHECK(s[t.ipc_index("IPC-E")] == Catch::Approx(op.generators[2].p_mw).margin(1e-6));
    for (std::size_t k = 0; k < s.size(); ++k) CHECK(std::abs(s[k]) <= t.ipcs()[k].rating_mw + 1e-9);
  }
}

TEST_CASE("converter energy balance holds for random flows") {
  const auto t = default_topology();
  const auto feas = feasible_ccrcs(t);
  std::mt19937_64 rng(29);
  const double r = t.parameters().r_arm;
  for (int trial = 0; trial < 30; ++trial) {
    const auto op = fixtures::random_op(t, rng);
    const auto pf = solve_power_flow(t, op, feas[trial % feas.size()]);
    const auto q = compute_ipc_internals(t, pf);
    for (std::size_t k = 0; k < t.ipc_count(); ++k) {
      // AC power into the converter minus arm losses equals DC power out.
      const double p_ac_in = -pf.to_pu(pf.ipcs[k].p_ac_mw);
      const double loss = 0.5 * r * q[k].i_diff * q[k].i_diff + r * q[k].i_sum * q[k].i_sum;
      CHECK(std::abs(p_ac_in - loss - pf.to_pu(pf.ipcs[k].p_dc_mw)) < 1e-6);
      for (double a : {q[k].theta_v_ac, q[k].theta_v_diff, q[k].theta_v_sum, q[k].theta_i_diff, q[k].theta_i_sum}) {
        CHECK(a > -M_PI);
        CHECK(a <= M_PI);
      }
    }
    const auto again = compute_ipc_internals(t, pf);
    for (std::size_t k = 0; k < q.size(); ++k) {
      CHECK(again[k].i_sum == q[k].i_sum);
      CHECK(again[k].v_diff == q[k].v_diff);
    }
  }
}

TEST_CASE("zero AC voltage is a degenerate circuit") {
  const auto t = default_topology();
  std::mt19937_64 rng(1);
  auto pf = solve_power_flow(t, fixtures::random_op(t, rng), feasible_ccrcs(t).front());
  pf.v_ac[t.ipcs()[0].ac_bus] = 0.0;
  CHECK_THROWS_AS(compute_ipc_internals(t, pf), DegenerateCircuit);
}

TEST_CASE("feature row layout and round trip") {
  const auto t = default_topology();
  std::mt19937_64 rng(2);
  const auto op = fixtures::random_op(t, rng);
  const auto pf = solve_power_flow(t, op, feasible_ccrcs(t)[10]);
  const auto row = extract_feature_vector(t, pf, compute_ipc_internals(t, pf));
  const std::size_t x_pf = 2 * t.ac_buses().size() + t.dc_buses().size() +
                           2 * (t.generators().size() + t.loads().size() + t.thevenins().size()) +
                           3 * t.ipc_count();
  CHECK(row.columns.size() == x_pf + 10 * t.ipc_count());
  CHECK(row.values.size() == row.columns.size());
  const auto row2 = extract_feature_vector(t, pf, compute_ipc_internals(t, pf));
  CHECK(row2.values == row.values);

  CsvTable table;
  for (const auto& c : row.columns) table.header.push_back(c.name);
  std::vector<std::string> cells;
  for (double v : row.values) cells.push_back(format_number(v));
  table.rows.push_back(cells);
  const auto back = parse_csv(to_csv_string(table));
  CHECK(back.header == table.header);
  for (std::size_t i = 0; i < row.values.size(); ++i) CHECK(back.number(0, i) == row.values[i]);
}

TEST_CASE("infeasible CCRC and out-of-range OP are rejected") {
  const auto t = default_topology();
  std::mt19937_64 rng(3);
  auto op = fixtures::random_op(t, rng);
  CHECK_THROWS_AS(solve_power_flow(t, op, Ccrc::from_id(0, 6)), InvalidInput);
  op.demand_mw = 1000;
  CHECK_THROWS_AS(solve_power_flow(t, op, feasible_ccrcs(t).front()), InvalidInput);
}
