#include <catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <random>
#include <set>

#include "acdc/common/error.hpp"
#include "acdc/dataforge/dataset.hpp"
#include "acdc/dataforge/engineering.hpp"
#include "acdc/dataforge/generation.hpp"
#include "acdc/dataforge/sampling.hpp"
#include "acdc/grid/feasibility.hpp"
#include "fixtures.hpp"

using namespace acdc;
using namespace acdc::dataforge;
using acdc::powerflow::ColumnInfo;
using acdc::powerflow::ElementGroup;
using acdc::powerflow::FeatureKind;

namespace {

Dataset synthetic(const std::vector<ColumnInfo>& cols, const Eigen::MatrixXd& X) {
  Dataset ds;
  ds.columns = cols;
  ds.X = X;
  ds.y = Eigen::VectorXd::Zero(X.rows());
  ds.provenance.resize(static_cast<std::size_t>(X.rows()));
  return ds;
}

ColumnInfo col(std::string name, FeatureKind kind, std::string node, std::string element = "",
               std::string quantity = "", ElementGroup group = ElementGroup::bus) {
  return {std::move(name), kind, std::move(node), std::move(element), std::move(quantity), group};
}

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("acdc_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

const grid::GridTopology& bundled() {
  static const grid::GridTopology t = grid::default_topology();
  return t;
}

grid::Ccrc always_stable() {
  // Thevenin governor mode dominates this configuration over the whole space.
  return grid::Ccrc({grid::ControlRole::dc_gfm, grid::ControlRole::gfl, grid::ControlRole::ac_gfm,
                     grid::ControlRole::dc_gfm, grid::ControlRole::ac_gfm, grid::ControlRole::gfl});
}

}  // namespace

TEST_CASE("LHS places one sample in every stratum") {
  for (std::size_t n : {1u, 10u, 100u}) {
    const auto U = lhs_unit(n, 7, 42);
    for (Eigen::Index j = 0; j < U.cols(); ++j) {
      std::vector<int> count(n, 0);
      for (Eigen::Index i = 0; i < U.rows(); ++i) {
        const double v = U(i, j);
        REQUIRE(v >= 0.0);
        REQUIRE(v < 1.0);
        count[static_cast<std::size_t>(v * static_cast<double>(n))]++;
      }
      CHECK(std::all_of(count.begin(), count.end(), [](int c) { return c == 1; }));
    }
  }
  CHECK(lhs_unit(20, 3, 1) == lhs_unit(20, 3, 1));
  CHECK(lhs_unit(20, 3, 1) != lhs_unit(20, 3, 2));
  CHECK_THROWS_AS(lhs_unit(0, 3, 1), InvalidInput);
}

TEST_CASE("LHS over the bundled operating ranges") {
  const auto& r = bundled().ranges();
  const auto s = lhs_sample(r, 10, 7);
  REQUIRE(s.points.size() == 10);
  std::vector<int> strata(10, 0);
  for (const auto& op : s.points) {
    CHECK_NOTHROW(grid::validate_operating_point(r, op));
    strata[static_cast<std::size_t>((op.demand_mw - 200.0) / 50.0)]++;
    CHECK(op.generators[0].p_mw >= 15.0);
    CHECK(op.generators[0].p_mw <= 285.0);
  }
  CHECK(std::all_of(strata.begin(), strata.end(), [](int c) { return c == 1; }));
  CHECK(s.warnings.empty());

  // empirical CDF of every directly mapped dimension within 1/n of uniform
  const std::size_t n = 100;
  const auto big = lhs_sample(r, n, 8);
  const OpSpace space(r);
  for (std::size_t j = 0; j < 2 * r.generators.size() + 1; ++j) {
    std::vector<double> v;
    for (const auto& op : big.points) v.push_back(space.to_unit(op)(static_cast<Eigen::Index>(j)));
    std::sort(v.begin(), v.end());
    double sup = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      sup = std::max({sup, std::abs(static_cast<double>(i + 1) / n - v[i]), std::abs(static_cast<double>(i) / n - v[i])});
    CHECK(sup <= 1.0 / n + 1e-12);
  }
}

TEST_CASE("degenerate ranges are held constant with a warning") {
  auto r = bundled().ranges();
  r.generators[1].p_min_mw = r.generators[1].p_max_mw = 50.0;
  const auto s = lhs_sample(r, 12, 3);
  REQUIRE(s.warnings.size() == 1);
  CHECK(s.warnings[0].find("gen1_P") != std::string::npos);
  for (const auto& op : s.points) CHECK(op.generators[1].p_mw == 50.0);
}

TEST_CASE("unit coordinates round-trip for generator and demand dimensions") {
  const OpSpace space(bundled().ranges());
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(space.dimension()));
    for (auto& v : x) v = u(rng);
    const auto back = space.to_unit(space.to_op(x));
    CHECK((back.head(7) - x.head(7)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("binary entropy and local stable fraction") {
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.5) == Catch::Approx(1.0));
  CHECK(binary_entropy(0.2) == Catch::Approx(binary_entropy(0.8)));
  for (double p = 0.01; p < 1.0; p += 0.01) CHECK(binary_entropy(p) <= 1.0);

  PointMatrix pts(4, 1);
  pts << 0.0, 0.1, 0.9, 1.0;
  const std::vector<bool> st = {true, true, false, false};
  CHECK(local_stable_fraction(pts, st, Eigen::VectorXd::Constant(1, 0.0), 2) == 1.0);
  CHECK(local_stable_fraction(pts, st, Eigen::VectorXd::Constant(1, 1.0), 2) == 0.0);
  CHECK(local_stable_fraction(pts, st, Eigen::VectorXd::Constant(1, 0.5), 4) == 0.5);
  CHECK(local_stable_fraction(PointMatrix(0, 1), {}, Eigen::VectorXd::Zero(1), 3) == 0.5);
}

TEST_CASE("entropy-guided generation is deterministic and spends its budget") {
  const auto a = entropy_guided_generate(bundled(), always_stable(), 12, 77);
  const auto b = entropy_guided_generate(bundled(), always_stable(), 12, 77);
  REQUIRE(a.size() == 12);
  std::size_t lhs = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].unit == b[i].unit);
    CHECK(a[i].exact.features == b[i].exact.features);
    CHECK(a[i].provenance.ccrc == always_stable().id());
    CHECK(a[i].exact.stable());
    lhs += a[i].provenance.phase == SamplingPhase::lhs ? 1 : 0;
  }
  CHECK(lhs == 6);
  CHECK_THROWS_AS(entropy_guided_generate(bundled(), always_stable(), 1, 1), InvalidInput);
}

TEST_CASE("stability dataset carries decodable X_C columns and its class balance") {
  const auto feas = grid::feasible_ccrcs(bundled());
  const std::vector<grid::Ccrc> set = {feas[0], feas[3], always_stable()};
  ClassBalance bal;
  const auto ds = build_stability_dataset(bundled(), set, 4, 5, &bal);
  CHECK(ds.rows() == 12);
  CHECK_NOTHROW(ds.validate());
  std::set<grid::CcrcId> ids;
  for (const auto& c : set) ids.insert(c.id());
  const auto first_xc = ds.column("XC_IPC-A");
  for (Eigen::Index i = 0; i < ds.rows(); ++i) {
    std::vector<grid::ControlRole> roles;
    for (std::size_t k = 0; k < 6; ++k)
      roles.push_back(static_cast<grid::ControlRole>(static_cast<int>(ds.X(i, static_cast<Eigen::Index>(first_xc + k)))));
    const grid::Ccrc decoded(roles);
    CHECK(ids.count(decoded.id()) == 1);
    CHECK(decoded.id() == ds.provenance[static_cast<std::size_t>(i)].ccrc);
  }
  CHECK(bal.rows == 12);
  CHECK(std::abs(bal.stable_fraction - ds.y.sum() / static_cast<double>(ds.rows())) < 1e-12);
  CHECK_THROWS_AS(build_stability_dataset(bundled(), {}, 4, 5), InvalidInput);
}

TEST_CASE("indicator datasets hold only stable rows and share their columns") {
  const auto sets = build_indicator_datasets(bundled(), always_stable(), 60, 3);
  REQUIRE(sets.size() == 4);
  for (const auto& ds : sets) {
    CHECK_NOTHROW(ds.validate());
    CHECK(ds.rows() == sets[0].rows());
    CHECK(ds.rows() >= 50);
    CHECK(ds.owner == always_stable().id());
    CHECK((ds.y.array() > 0.0).all());
    CHECK(ds.X == sets[0].X);
    for (const auto& c : ds.columns) CHECK(c.kind != FeatureKind::categorical);
  }
  CHECK(sets[0].target() == "H2_f");
  CHECK(sets[3].target() == "K_Vdc");
  CHECK(sets[0].y != sets[2].y);

  // an always-unstable configuration never yields indicator rows
  const auto feas = grid::feasible_ccrcs(bundled());
  const auto pts = lhs_generate(bundled(), feas[0], 8, 1, SamplingPhase::lhs);
  for (const auto& p : pts) CHECK_FALSE(p.exact.stable());
  CHECK_THROWS_AS(indicator_datasets(bundled(), feas[0].id(), pts), InsufficientData);
}

TEST_CASE("validation stream never reproduces training rows") {
  const auto c = always_stable();
  const auto train = stability_dataset(bundled(), lhs_generate(bundled(), c, 30, 9, SamplingPhase::lhs));
  const auto val = stability_dataset(bundled(), lhs_generate(bundled(), c, 30, validation_seed(9), SamplingPhase::validation));
  std::set<std::uint64_t> seen;
  for (Eigen::Index i = 0; i < train.rows(); ++i) seen.insert(row_hash(train, i));
  for (Eigen::Index i = 0; i < val.rows(); ++i) CHECK(seen.count(row_hash(val, i)) == 0);
  CHECK(validation_seed(9) != 9);
}

TEST_CASE("feature engineering adds apparent power and flow direction") {
  const std::vector<ColumnInfo> cols = {
      col("P_G", FeatureKind::power, "B1", "G", "P", ElementGroup::generator),
      col("Q_G", FeatureKind::power, "B1", "G", "Q", ElementGroup::generator),
      col("P_I", FeatureKind::power, "I", "I", "P", ElementGroup::ipc),
      col("Q_I", FeatureKind::power, "I", "I", "Q", ElementGroup::ipc),
      col("Pdc_I", FeatureKind::power, "I", "I", "Pdc", ElementGroup::ipc)};
  Eigen::MatrixXd X(2, 5);
  X << 3, 4, 0, 0, -2,
       1, 0, -5, 12, 7;
  const auto e = engineer_features(synthetic(cols, X));
  CHECK(e.X(0, e.column("S_G")) == Catch::Approx(5.0));
  CHECK(e.X(1, e.column("S_I")) == Catch::Approx(13.0));
  CHECK(e.X(0, e.column("S_I")) == 0.0);
  CHECK(e.X(0, e.column("Sdc_I")) == 2.0);
  CHECK(e.X(0, e.column("dir_I")) == 1.0);
  CHECK(e.X(1, e.column("dir_I")) == 0.0);
  CHECK_FALSE(e.has_column("dir_G"));
  CHECK(e.columns[e.column("dir_I")].kind == FeatureKind::flag);

  // |G| + |L| + |T| + 2|C| apparent powers plus |C| + |T| flags
  const auto pts = lhs_generate(bundled(), always_stable(), 3, 1, SamplingPhase::lhs);
  const auto ds = stability_dataset(bundled(), pts);
  const auto eng = engineer_features(ds);
  const auto& t = bundled();
  const auto expected = t.generators().size() + t.loads().size() + t.thevenins().size() + 2 * t.ipc_count() +
                        t.ipc_count() + t.thevenins().size();
  CHECK(static_cast<std::size_t>(eng.cols() - ds.cols()) == expected);
  CHECK_NOTHROW(eng.validate());
}

TEST_CASE("cleaning removes constants, duplicates and follows the retention order") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 1.0);
  const Eigen::Index n = 200;
  Eigen::VectorXd base(n), other(n), noise(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    base(i) = g(rng);
    other(i) = g(rng);
    noise(i) = 1e-3 * g(rng);
  }
  const std::vector<ColumnInfo> cols = {
      col("VAC_A", FeatureKind::ac_voltage, "A"), col("Idiff_A", FeatureKind::current, "A"),
      col("P_G1", FeatureKind::power, "B1", "G1", "P"), col("Q_G1", FeatureKind::power, "B1", "G1", "Q"),
      col("V_X", FeatureKind::ac_voltage, "X"), col("V_Y", FeatureKind::ac_voltage, "Y"),
      col("const", FeatureKind::angle, "Z"), col("dup", FeatureKind::angle, "W"),
      col("thV_W", FeatureKind::angle, "W"), col("XC_A", FeatureKind::categorical, "A")};
  Eigen::MatrixXd X(n, 10);
  X.col(0) = base;
  X.col(1) = 2.0 * base + noise;
  X.col(2) = other;
  X.col(3) = -other + noise;
  X.col(4) = base - noise;
  X.col(5) = base + noise;
  X.col(6).setConstant(3.0);
  X.col(7) = other.array().square();
  X.col(8) = X.col(7);
  X.col(9).setConstant(1.0);
  CleaningReport rep;
  const auto c = clean_features(synthetic(cols, X), 0.95, &rep);
  CHECK_FALSE(c.has_column("Idiff_A"));
  CHECK(c.has_column("VAC_A"));
  CHECK(c.has_column("P_G1"));
  CHECK(c.has_column("Q_G1"));
  CHECK(c.has_column("V_X"));
  CHECK(c.has_column("V_Y"));
  CHECK_FALSE(c.has_column("const"));
  CHECK(c.has_column("dup") != c.has_column("thV_W"));
  CHECK(c.has_column("XC_A"));
  std::map<std::string, std::string> why;
  for (const auto& r : rep.removed) why[r.name] = r.reason;
  CHECK(why["Idiff_A"] == "correlated");
  CHECK(why["const"] == "constant");
  CHECK(why["thV_W"] == "duplicate");
  bool pq_flagged = false;
  for (const auto& f : rep.flagged)
    if (f.a == "P_G1" && f.b == "Q_G1") pq_flagged = f.both_kept;
  CHECK(pq_flagged);
  CHECK_THROWS_AS(clean_features(synthetic({cols[0]}, X.leftCols(1))), InvalidInput);
}

TEST_CASE("scaling standardizes, passes categoricals through and inverts") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(5.0, 3.0);
  const std::vector<ColumnInfo> cols = {col("a", FeatureKind::power, "A"), col("b", FeatureKind::angle, "B"),
                                        col("k", FeatureKind::ac_voltage, "K"), col("XC", FeatureKind::categorical, "C")};
  Eigen::MatrixXd X(100, 4);
  for (Eigen::Index i = 0; i < 100; ++i) X.row(i) << g(rng), 10.0 * g(rng), 2.0, static_cast<double>(i % 3);
  std::vector<std::string> warnings;
  const auto s = scale_features(synthetic(cols, X), nullptr, &warnings);
  CHECK(std::abs(s.X.col(0).mean()) < 1e-12);
  CHECK(std::abs(s.X.col(1).mean()) < 1e-12);
  CHECK(std::sqrt(s.X.col(0).array().square().mean()) == Catch::Approx(1.0));
  CHECK(s.X.col(2) == X.col(2));
  CHECK(s.X.col(3) == X.col(3));
  CHECK(warnings.size() == 1);
  const Eigen::MatrixXd back = invert_scaler(*s.scaler, cols, s.X);
  CHECK((back - X).cwiseAbs().maxCoeff() < 1e-12);

  Eigen::MatrixXd unseen = X.topRows(5).array() + 1.0;
  const auto t = scale_features(synthetic(cols, unseen), &*s.scaler);
  CHECK(t.X(0, 0) == Catch::Approx((unseen(0, 0) - s.scaler->mean[0]) / s.scaler->scale[0]));
}

TEST_CASE("winsorization clamps the upper tail") {
  std::vector<double> v;
  for (int i = 1; i <= 100; ++i) v.push_back(i);
  const auto w = winsorize(v, 0.95);
  CHECK(w.upper == Catch::Approx(95.05));
  CHECK(*std::max_element(w.values.begin(), w.values.end()) == w.upper);
  CHECK(w.values[0] == 1.0);
  CHECK(w.values[94] == 95.0);
  const std::vector<double> same(10, 2.5);
  CHECK(winsorize(same, 0.9).values == same);
  CHECK_THROWS_AS(winsorize({}, 0.95), InvalidInput);
  CHECK_THROWS_AS(winsorize(v, 0.4), InvalidInput);
  CHECK_THROWS_AS(winsorize(v, 1.0), InvalidInput);
}

TEST_CASE("datasets round-trip through CSV and schema") {
  const auto sets = build_indicator_datasets(bundled(), always_stable(), 55, 8);
  auto ds = scale_features(sets[1]);
  ds.winsor_upper = 1.25;
  const auto dir = temp_dir("dataset");
  save_dataset(ds, dir / "h2vdc");
  const auto back = load_dataset(dir / "h2vdc");
  CHECK(back.role == DatasetRole::h2_vdc);
  CHECK(back.owner == ds.owner);
  CHECK(back.X == ds.X);
  CHECK(back.y == ds.y);
  CHECK(back.winsor_upper == 1.25);
  REQUIRE(back.scaler.has_value());
  CHECK(back.scaler->mean == ds.scaler->mean);
  for (std::size_t i = 0; i < ds.provenance.size(); ++i) {
    CHECK(back.provenance[i].seed == ds.provenance[i].seed);
    CHECK(back.provenance[i].phase == ds.provenance[i].phase);
  }
  for (std::size_t j = 0; j < ds.columns.size(); ++j) {
    CHECK(back.columns[j].name == ds.columns[j].name);
    CHECK(back.columns[j].group == ds.columns[j].group);
  }
  CHECK_THROWS_AS(load_dataset(dir / "missing"), IoError);
}

TEST_CASE("dataset validation catches malformed tables") {
  const std::vector<ColumnInfo> cols = {col("a", FeatureKind::power, "A"), col("a", FeatureKind::power, "B")};
  auto ds = synthetic(cols, Eigen::MatrixXd::Zero(3, 2));
  CHECK_THROWS_AS(ds.validate(), InvalidInput);
  ds.columns[1].name = "b";
  CHECK_NOTHROW(ds.validate());
  ds.role = DatasetRole::k_f;
  CHECK_THROWS_AS(ds.validate(), InvalidInput);  // no owner
  ds.owner = 3;
  ds.columns[1].kind = FeatureKind::categorical;
  CHECK_THROWS_AS(ds.validate(), InvalidInput);  // X_C in an indicator dataset
}
