#include <catch_amalgamated.hpp>

#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "acdc/common/error.hpp"
#include "acdc/grid/ccrc.hpp"
#include "acdc/grid/feasibility.hpp"
#include "acdc/grid/operating_point.hpp"
#include "acdc/grid/topology.hpp"
#include "fixtures.hpp"

using namespace acdc;
using namespace acdc::grid;

namespace {

// Independent brute-force feasibility: count role vectors by nested loops and
// the forming rules written out directly from the element lists.
std::size_t brute_force_feasible(const GridTopology& t) {
  const std::size_t n = t.ipc_count();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= 3;
  std::size_t count = 0;
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<int> roles(n);
    std::size_t c = code;
    for (std::size_t i = 0; i < n; ++i) {
      roles[i] = static_cast<int>(c % 3);
      c /= 3;
    }
    bool ok = true;
    for (std::size_t sg = 0; sg < t.ac_subgrids().size(); ++sg) {
      bool formed = false;
      for (const auto& th : t.thevenins()) formed |= t.ac_buses()[th.bus].subgrid == sg;
      for (std::size_t i = 0; i < n; ++i) formed |= t.ac_buses()[t.ipcs()[i].ac_bus].subgrid == sg && roles[i] == 1;
      ok &= formed;
    }
    for (std::size_t sg = 0; sg < t.dc_subgrids().size(); ++sg) {
      bool formed = false;
      for (std::size_t i = 0; i < n; ++i) formed |= t.dc_buses()[t.ipcs()[i].dc_bus].subgrid == sg && roles[i] == 2;
      ok &= formed;
    }
    count += ok;
  }
  return count;
}

}  // namespace

TEST_CASE("bundled topology enumerates 729 configurations, 95 feasible") {
  const auto t = default_topology();
  REQUIRE(t.ipc_count() == 6);
  const auto all = enumerate_all_ccrcs(t);
  CHECK(all.size() == 729);
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i].id() == i);
  const auto feas = feasible_ccrcs(t);
  CHECK(feas.size() == 95);
  CHECK(brute_force_feasible(t) == 95);
  for (std::size_t i = 1; i < feas.size(); ++i) CHECK(feas[i - 1].id() < feas[i].id());
}

TEST_CASE("IPC-E must form the wind-only AC subgrid") {
  const auto t = default_topology();
  const std::size_t e = t.ipc_index("IPC-E");
  for (const auto& c : enumerate_all_ccrcs(t))
    if (c.role(e) != ControlRole::ac_gfm) CHECK_FALSE(is_feasible(t, c));
}

TEST_CASE("a DC subgrid without a DC-GFM terminal is infeasible") {
  const auto t = default_topology();
  // E forms AC-3, D forms DC-2, DC-1 all GFL.
  Ccrc c({ControlRole::gfl, ControlRole::gfl, ControlRole::gfl, ControlRole::dc_gfm, ControlRole::ac_gfm,
          ControlRole::gfl});
  CHECK_FALSE(is_feasible(t, c));
  CHECK(is_feasible(t, c.with_role(0, ControlRole::dc_gfm)));
}

TEST_CASE("small systems enumerate 3^n and match brute force") {
  GridTopology one(fixtures::thevenin_dc_link(1));
  CHECK(enumerate_all_ccrcs(one).size() == 3);
  const auto f1 = feasible_ccrcs(one);
  REQUIRE(f1.size() == 1);
  CHECK(f1[0].role(0) == ControlRole::dc_gfm);

  GridTopology two(fixtures::thevenin_dc_link(2));
  const auto all2 = enumerate_all_ccrcs(two);
  REQUIRE(all2.size() == 9);
  for (std::size_t i = 0; i < 9; ++i) CHECK(all2[i].id() == i);
  CHECK(feasible_ccrcs(two).size() == 5);

  GridTopology b2b(fixtures::back_to_back());
  CHECK(feasible_ccrcs(b2b).size() == 5);
  CHECK(brute_force_feasible(b2b) == 5);

  GridTopology three(fixtures::thevenin_dc_link(3));
  CHECK(feasible_ccrcs(three).size() == 19);
  CHECK(brute_force_feasible(three) == 19);
}

TEST_CASE("feasibility is monotone when a forming unit is added") {
  auto spec = fixtures::back_to_back();
  GridTopology base(spec);
  // Remove the Thevenin of AC-2, then put it back.
  auto weaker = spec;
  weaker.thevenins.pop_back();
  GridTopology weak(weaker);
  for (const auto& c : enumerate_all_ccrcs(weak))
    if (is_feasible(weak, c)) CHECK(is_feasible(base, c));
  CHECK(feasible_ccrcs(weak).size() < feasible_ccrcs(base).size());
}

TEST_CASE("feasibility rejects a length mismatch") {
  const auto t = default_topology();
  CHECK_THROWS_AS(is_feasible(t, Ccrc::from_id(0, 5)), InvalidInput);
}

TEST_CASE("ccrc id encoding is base 3 with the first IPC most significant") {
  Ccrc c({ControlRole::dc_gfm, ControlRole::gfl, ControlRole::ac_gfm});
  CHECK(c.id() == 2 * 9 + 0 * 3 + 1);
  CHECK(Ccrc::from_id(c.id(), 3) == c);
  CHECK(c.label() == "DC-GFM|GFL|AC-GFM");
  CHECK_THROWS_AS(Ccrc::from_id(27, 3), InvalidInput);
  CHECK(parse_role("ac_gfm") == ControlRole::ac_gfm);
  CHECK_THROWS_AS(parse_role("PQ"), InvalidInput);
}

TEST_CASE("ccr_distance is a metric") {
  const Ccrc a = Ccrc::from_id(0, 6);
  CHECK(ccr_distance(a, a) == 0);
  CHECK(ccr_distance(a, a.with_role(3, ControlRole::dc_gfm)) == 1);
  std::vector<ControlRole> other(6, ControlRole::ac_gfm);
  CHECK(ccr_distance(a, Ccrc(other)) == 6);
  CHECK_THROWS_AS(ccr_distance(a, Ccrc::from_id(0, 5)), InvalidInput);

  std::mt19937_64 rng(3);
  std::uniform_int_distribution<CcrcId> pick(0, 728);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto x = Ccrc::from_id(pick(rng), 6), y = Ccrc::from_id(pick(rng), 6), z = Ccrc::from_id(pick(rng), 6);
    CHECK(ccr_distance(x, y) == ccr_distance(y, x));
    CHECK(ccr_distance(x, z) <= ccr_distance(x, y) + ccr_distance(y, z));
    CHECK((ccr_distance(x, y) == 0) == (x == y));
  }
}

TEST_CASE("topology validation catches broken descriptions") {
  auto s = fixtures::back_to_back();
  s.ac_branches.pop_back();
  CHECK_THROWS_AS(GridTopology(s), InvalidInput);  // AC-2 disconnected

  s = fixtures::back_to_back();
  s.thevenins.push_back({"TH3", 1, 0.02, 0.2, 1.0});
  CHECK_THROWS_AS(GridTopology(s), InvalidInput);  // two Thevenins in AC-1

  s = fixtures::back_to_back();
  s.ranges.load_base_share = {0.6, 0.6};
  CHECK_THROWS_AS(GridTopology(s), InvalidInput);

  s = fixtures::back_to_back();
  s.ipcs[1].dc_bus = 0;
  CHECK_THROWS_AS(GridTopology(s), InvalidInput);
}

TEST_CASE("grid description round-trips through JSON") {
  const auto t = default_topology();
  const auto doc = topology_to_json(t);
  const auto back = topology_from_json(doc);
  CHECK(topology_to_json(back) == doc);
  CHECK(back.ipcs()[4].id == "IPC-E");
  CHECK(back.ac_subgrids()[2].thevenins.empty());
  CHECK(back.ranges().generators[2].p_max_mw == 142.5);

  auto bad = doc;
  bad["schema"] = 2;
  CHECK_THROWS_AS(topology_from_json(bad), InvalidInput);
  bad = doc;
  bad["parameters"]["no_such_knob"] = 1.0;
  CHECK_THROWS_AS(topology_from_json(bad), InvalidInput);
  CHECK_THROWS_AS(load_topology("/nonexistent/grid.json"), IoError);
}

TEST_CASE("share projection keeps bands and sums to one") {
  const auto t = default_topology();
  const auto& base = t.ranges().load_base_share;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> raw(base.size());
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = base[i] * (1.0 + 0.3 * u(rng));
    const auto s = project_shares(raw, base, 0.3);
    double sum = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(s[i] >= base[i] * 0.7 - 1e-12);
      CHECK(s[i] <= base[i] * 1.3 + 1e-12);
      sum += s[i];
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("operating point validation") {
  const auto t = default_topology();
  OperatingPoint op;
  op.generators = {{100, 0.9}, {50, 0.9}, {70, 0.85}};
  op.demand_mw = 400;
  op.load_shares = {0.3, 0.2, 0.2, 0.3};
  CHECK_NOTHROW(validate_operating_point(t.ranges(), op));
  auto back = operating_point_from_json(operating_point_to_json(op));
  CHECK(back.load_shares == op.load_shares);
  op.generators[1].p_mw = 96;
  CHECK_THROWS_AS(validate_operating_point(t.ranges(), op), InvalidInput);
  op.generators[1].p_mw = 50;
  op.load_shares = {0.35, 0.2, 0.2, 0.3};
  CHECK_THROWS_AS(validate_operating_point(t.ranges(), op), InvalidInput);
}
