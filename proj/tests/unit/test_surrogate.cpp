#include <catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include <Eigen/QR>

#include "acdc/common/error.hpp"
#include "acdc/simd/kernels.hpp"
#include "acdc/surrogate/evaluation.hpp"
#include "acdc/surrogate/metrics.hpp"
#include "acdc/surrogate/model.hpp"
#include "acdc/surrogate/training.hpp"

using namespace acdc;
using namespace acdc::surrogate;
using acdc::dataforge::Dataset;
using acdc::dataforge::DatasetRole;
using acdc::powerflow::ColumnInfo;
using acdc::powerflow::FeatureKind;

namespace {

std::vector<double> vec(std::initializer_list<double> v) { return v; }

// n rows of d standard-normal features named x0..x{d-1}; y from f(row).
template <class F>
Dataset synthetic(Eigen::Index n, Eigen::Index d, std::uint64_t seed, F f, DatasetRole role = DatasetRole::h2_f) {
  Dataset ds;
  ds.role = role;
  if (role != DatasetRole::stability) ds.owner = 1;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  ds.X.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) ds.X(i, j) = g(rng);
  ds.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) ds.y(i) = f(Eigen::VectorXd(ds.X.row(i).transpose()), rng);
  for (Eigen::Index j = 0; j < d; ++j) {
    ColumnInfo c;
    c.name = "x" + std::to_string(j);
    c.kind = FeatureKind::power;
    c.node = c.name;
    ds.columns.push_back(c);
  }
  ds.provenance.resize(static_cast<std::size_t>(n));
  return ds;
}

Dataset with_categorical(Dataset ds) {
  ColumnInfo c;
  c.name = "XC_A";
  c.kind = FeatureKind::categorical;
  c.node = "A";
  ds.columns.push_back(c);
  ds.X.conservativeResize(Eigen::NoChange, ds.X.cols() + 1);
  for (Eigen::Index i = 0; i < ds.rows(); ++i) ds.X(i, ds.X.cols() - 1) = static_cast<double>(i % 3);
  ds.role = DatasetRole::stability;
  ds.owner.reset();
  return ds;
}

double score(const Metric& m, const Eigen::VectorXd& pred, const Eigen::VectorXd& y) {
  return m({pred.data(), static_cast<std::size_t>(pred.size())}, {y.data(), static_cast<std::size_t>(y.size())});
}

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("acdc_surrogate_" + name);
  std::filesystem::remove_all(p);
  return p;
}

ModelSpec small(Family f, Task t) {
  auto s = ModelSpec::make(f, t);
  s.hp.n_estimators = 40;
  s.hp.max_depth = f == Family::decision_tree ? 0 : 3;
  s.hp.hidden_layers = {8};
  s.hp.max_epochs = 60;
  return s;
}

}  // namespace

TEST_CASE("F-beta follows the precision/recall formula") {
  CHECK(f_beta(vec({1, 0, 1}), vec({1, 0, 1}), 2.0) == 1.0);
  // P = 1, R = 0.5
  CHECK(f_beta(vec({1, 0, 0, 0}), vec({1, 1, 0, 0}), 2.0) == Catch::Approx(5.0 * 0.5 / 4.5).epsilon(1e-12));
  // P = 0.5, R = 1
  CHECK(f_beta(vec({1, 1}), vec({1, 0}), 0.5) == Catch::Approx(0.625 / 1.125).epsilon(1e-12));
  CHECK(f_beta(vec({0, 0}), vec({0, 0}), 1.0) == 0.0);
  CHECK(f_beta(vec({0, 0}), vec({1, 0}), 1.0) == 0.0);
  CHECK_THROWS_AS(f_beta(vec({1}), vec({1, 0}), 1.0), InvalidInput);
  CHECK_THROWS_AS(f_beta(vec({1}), vec({2}), 1.0), InvalidInput);
}

TEST_CASE("beta is chosen from the stable share") {
  CHECK(choose_beta(0.46) == 2.0);
  CHECK(choose_beta(0.60) == 0.5);
  CHECK(choose_beta(0.50) == 0.5);
  CHECK(choose_beta(0.0) == 2.0);
  CHECK_THROWS_AS(choose_beta(1.2), InvalidInput);
  CHECK(classification_metric(vec({1, 0, 0})).beta == 2.0);
  CHECK(classification_metric(vec({1, 1, 0, 0})).beta == 0.5);
  CHECK(classification_metric(vec({1, 1, 0, 0})).kind == Metric::Kind::f_beta);
}

TEST_CASE("R2 score") {
  CHECK(r2_score(vec({1, 2, 3}), vec({1, 2, 3})) == 1.0);
  CHECK(r2_score(vec({2, 2, 2}), vec({1, 2, 3})) == Catch::Approx(0.0).margin(1e-15));
  CHECK(r2_score(vec({3, 2, 1}), vec({1, 2, 3})) < 0.0);
  CHECK_THROWS_AS(r2_score(vec({1, 1}), vec({2, 2})), UndefinedMetric);
  CHECK_THROWS_AS(r2_score(vec({1}), vec({2})), UndefinedMetric);
}

TEST_CASE("fold assignment is balanced, stratified and seeded") {
  Eigen::VectorXd y(103);
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = i % 3 == 0 ? 1.0 : 0.0;
  for (auto task : {Task::classification, Task::regression}) {
    const auto f = assign_folds(y, 5, task, 9);
    std::vector<int> size(5, 0), pos(5, 0);
    for (std::size_t i = 0; i < f.size(); ++i) {
      size[static_cast<std::size_t>(f[i])]++;
      pos[static_cast<std::size_t>(f[i])] += y(static_cast<Eigen::Index>(i)) > 0.5;
    }
    CHECK(*std::max_element(size.begin(), size.end()) - *std::min_element(size.begin(), size.end()) <= 1);
    if (task == Task::classification)
      CHECK(*std::max_element(pos.begin(), pos.end()) - *std::min_element(pos.begin(), pos.end()) <= 1);
    CHECK(f == assign_folds(y, 5, task, 9));
  }
  CHECK(assign_folds(y, 5, Task::regression, 9) != assign_folds(y, 5, Task::regression, 10));
  CHECK_THROWS_AS(assign_folds(y, 1, Task::regression, 0), InvalidInput);
  CHECK_THROWS_AS(assign_folds(y.head(3), 5, Task::regression, 0), InvalidInput);
}

TEST_CASE("dummy baselines") {
  auto ds = with_categorical(synthetic(90, 2, 1, [](const Eigen::VectorXd& x, auto&) { return x(0) > 0.3 ? 1.0 : 0.0; }));
  const auto metric = classification_metric({ds.y.data(), static_cast<std::size_t>(ds.y.size())});
  const auto cv = kfold_cv(ModelSpec::make(Family::dummy, Task::classification), ds, 5, metric, 4);
  // always-stable predictor: precision = positive share of the fold, recall = 1
  const auto folds = assign_folds(ds.y, 5, Task::classification, 4);
  double expected = 0;
  for (int f = 0; f < 5; ++f) {
    double n = 0, p = 0;
    for (std::size_t i = 0; i < folds.size(); ++i)
      if (folds[i] == f) {
        n += 1;
        p += ds.y(static_cast<Eigen::Index>(i));
      }
    const double P = p / n, b2 = metric.beta * metric.beta;
    expected += (1 + b2) * P / (b2 * P + 1) / 5.0;
  }
  CHECK(cv.mean == Catch::Approx(expected).epsilon(1e-12));
  CHECK(cv.fold_scores == kfold_cv(ModelSpec::make(Family::dummy, Task::classification), ds, 5, metric, 4).fold_scores);

  const auto reg = synthetic(40, 2, 2, [](const Eigen::VectorXd& x, auto&) { return 2 * x(0) + 1; });
  const auto m = fit_model(ModelSpec::make(Family::dummy, Task::regression), reg, 0);
  CHECK((m.predict(reg).array() == reg.y.mean()).all());
}

TEST_CASE("compare_models ranks real learners above the dummy") {
  auto ds = with_categorical(synthetic(150, 3, 3, [](const Eigen::VectorXd& x, auto&) { return x(0) + x(1) > 0 ? 1.0 : 0.0; }));
  const auto metric = classification_metric({ds.y.data(), static_cast<std::size_t>(ds.y.size())});
  std::vector<ModelSpec> specs = {ModelSpec::make(Family::dummy, Task::classification),
                                  small(Family::linear, Task::classification),
                                  small(Family::decision_tree, Task::classification),
                                  small(Family::gradient_boosting, Task::classification)};
  const auto rep = compare_models(specs, ds, 5, metric, 1);
  REQUIRE(rep.size() == specs.size());
  double dummy = 0;
  for (const auto& r : rep)
    if (r.spec.family == Family::dummy) dummy = r.cv.mean;
  for (const auto& r : rep) CHECK(r.cv.mean >= dummy);
  for (std::size_t i = 1; i < rep.size(); ++i) CHECK(rep[i - 1].cv.mean >= rep[i].cv.mean);
  CHECK_THROWS_AS(compare_models({specs[1], specs[2]}, ds, 5, metric, 1), InvalidInput);
}

TEST_CASE("linear regression reproduces least squares") {
  auto ds = synthetic(60, 4, 5, [](const Eigen::VectorXd& x, auto& rng) {
    std::normal_distribution<double> e(0, 0.1);
    return 1.5 * x(0) - 2 * x(2) + 0.3 + e(rng);
  });
  ds.X.col(1) *= 1000.0;
  const auto m = fit_model(ModelSpec::make(Family::linear, Task::regression), ds, 0);
  Eigen::MatrixXd A(ds.rows(), ds.cols() + 1);
  A << Eigen::VectorXd::Ones(ds.rows()), ds.X;
  const Eigen::VectorXd beta = A.colPivHouseholderQr().solve(ds.y);
  CHECK((m.predict(ds) - A * beta).cwiseAbs().maxCoeff() < 1e-6);

  auto ridge = ModelSpec::make(Family::ridge, Task::regression);
  ridge.hp.l2 = 1e6;
  const auto r = fit_model(ridge, ds, 0);
  CHECK((r.predict(ds).array() - ds.y.mean()).abs().maxCoeff() < 0.05);
}

TEST_CASE("tree learners") {
  auto ds = synthetic(120, 3, 6, [](const Eigen::VectorXd& x, auto&) { return (x(0) > 0) != (x(1) > 0) ? 1.0 : 0.0; });
  const auto tree = fit_model(ModelSpec::make(Family::decision_tree, Task::classification), ds, 0);
  CHECK(tree.predict(ds) == ds.y);

  auto reg = synthetic(400, 3, 7, [](const Eigen::VectorXd& x, auto&) { return std::sin(2 * x(0)) + x(1) * x(1); });
  auto test = synthetic(200, 3, 8, [](const Eigen::VectorXd& x, auto&) { return std::sin(2 * x(0)) + x(1) * x(1); });
  auto gbt = ModelSpec::make(Family::gradient_boosting, Task::regression);
  gbt.hp.max_depth = 4;
  gbt.hp.subsample = 0.8;
  const auto g = fit_model(gbt, reg, 3);
  CHECK(score(regression_metric(), g.predict(test), test.y) > 0.9);
  CHECK(g.predict(test) == fit_model(gbt, reg, 3).predict(test));

  auto cls = synthetic(400, 3, 9, [](const Eigen::VectorXd& x, auto&) { return x(0) * x(0) + x(1) * x(1) < 1.2 ? 1.0 : 0.0; });
  auto cls_test = synthetic(300, 3, 10, [](const Eigen::VectorXd& x, auto&) { return x(0) * x(0) + x(1) * x(1) < 1.2 ? 1.0 : 0.0; });
  const auto gc = fit_model(ModelSpec::make(Family::gradient_boosting, Task::classification), cls, 1);
  const Eigen::VectorXd p = gc.predict(cls_test);
  CHECK((p.array() >= 0.0).all());
  CHECK((p.array() <= 1.0).all());
  CHECK(score({Metric::Kind::f_beta, 1.0}, p, cls_test.y) > 0.9);
}

TEST_CASE("MLP analytic gradients match central differences") {
  for (auto act : {Activation::relu, Activation::logistic, Activation::tanh})
    for (auto task : {Task::classification, Task::regression})
      for (std::uint64_t seed = 0; seed < 4; ++seed) {
        CHECK(mlp_gradient_check({5}, act, task, seed) < kGradientTolerance);
        CHECK(mlp_gradient_check({4, 3}, act, task, seed) < kGradientTolerance);
      }
}

TEST_CASE("MLP learns smooth targets and is kernel-level independent") {
  auto reg = synthetic(600, 2, 11, [](const Eigen::VectorXd& x, auto&) { return x(0) * x(1) + 0.5 * x(0); });
  auto test = synthetic(200, 2, 12, [](const Eigen::VectorXd& x, auto&) { return x(0) * x(1) + 0.5 * x(0); });
  auto spec = ModelSpec::make(Family::mlp, Task::regression);
  spec.hp.hidden_layers = {16, 16};
  spec.hp.activation = Activation::tanh;
  spec.hp.learning_rate = 0.01;
  const auto m = fit_model(spec, reg, 5);
  CHECK(score(regression_metric(), m.predict(test), test.y) > 0.9);

  const auto before = simd::active_level();
  simd::set_level(simd::Level::scalar);
  const Eigen::VectorXd ps = m.predict(test);
  simd::set_level(simd::detected_level());
  const Eigen::VectorXd pv = m.predict(test);
  simd::set_level(before);
  CHECK((ps - pv).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, ps.cwiseAbs().maxCoeff()));

  auto cls = synthetic(500, 2, 13, [](const Eigen::VectorXd& x, auto&) { return x(0) * x(0) + x(1) * x(1) < 1.2 ? 1.0 : 0.0; });
  auto cs = ModelSpec::make(Family::mlp, Task::classification);
  cs.hp.hidden_layers = {16};
  cs.hp.learning_rate = 0.01;
  const auto c = fit_model(cs, cls, 2);
  CHECK(score({Metric::Kind::f_beta, 1.0}, c.predict(cls), cls.y) > 0.9);
}

TEST_CASE("permutation importance") {
  auto ds = synthetic(300, 3, 14, [](const Eigen::VectorXd& x, auto&) { return 3 * x(1); });
  const auto m = fit_model(ModelSpec::make(Family::linear, Task::regression), ds, 0);
  const auto imp = permutation_importance(m, ds, regression_metric(), 5, 3);
  REQUIRE(imp.size() == 3);
  CHECK(imp[0].name == "x1");
  CHECK(imp[0].mean > 1.0);
  for (std::size_t i = 1; i < 3; ++i) CHECK(std::abs(imp[i].mean) <= 2 * imp[i].std + 1e-6);

  Eigen::MatrixXd X = ds.X;
  Rng rng(1);
  permute_column(X, 2, rng);
  std::vector<double> a(X.col(2).data(), X.col(2).data() + X.rows()), b(ds.X.col(2).data(), ds.X.col(2).data() + ds.X.rows());
  CHECK(a != b);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  CHECK(a == b);
  CHECK(X.col(0) == ds.X.col(0));
}

TEST_CASE("grid search picks the best lattice point and breaks ties toward smaller models") {
  auto ds = synthetic(80, 2, 15, [](const Eigen::VectorXd& x, auto&) { return x(0) > 0 ? 1.0 : 0.0; }, DatasetRole::stability);
  for (Eigen::Index i = 0; i < ds.rows(); ++i) ds.X(i, 0) += ds.y(i) > 0 ? 1.0 : -1.0;
  const Metric m{Metric::Kind::f_beta, 0.5};
  auto base = small(Family::gradient_boosting, Task::classification);
  ParamGrid one;
  const auto r1 = grid_search(base, one, ds, 4, m, 1);
  CHECK(r1.table.size() == 1);
  CHECK(r1.best.hp.n_estimators == base.hp.n_estimators);

  ParamGrid g;
  g.n_estimators = {30, 10};
  g.learning_rate = {0.3, 0.1};
  const auto r = grid_search(base, g, ds, 4, m, 1);
  REQUIRE(r.table.size() == 4);
  for (const auto& row : r.table) CHECK(r.table[r.best_index].cv.mean >= row.cv.mean);
  // the classes are separated by a gap in x0, so every lattice point is exact
  for (const auto& row : r.table) CHECK(row.cv.mean == 1.0);
  CHECK(r.best.hp.n_estimators == 10);
  CHECK(r.best.hp.learning_rate == 0.1);

  const auto dg = default_grid(Family::gradient_boosting, 10).lattice(base);
  CHECK(dg.size() == 12);
  const auto mg = default_grid(Family::mlp, 10).lattice(ModelSpec::make(Family::mlp, Task::regression));
  REQUIRE(mg.size() == 4);
  CHECK(mg[0].hp.hidden_layers == std::vector<int>{5});
  CHECK(mg[3].hp.hidden_layers == std::vector<int>{10, 10});
}

TEST_CASE("trained models reload to bit-identical predictions") {
  auto reg = synthetic(120, 3, 16, [](const Eigen::VectorXd& x, auto&) { return std::exp(x(0)) + x(2); });
  auto cls = with_categorical(synthetic(120, 3, 17, [](const Eigen::VectorXd& x, auto&) { return x(0) > x(1) ? 1.0 : 0.0; }));
  auto probe = synthetic(30, 3, 18, [](const Eigen::VectorXd&, auto&) { return 0.0; });
  auto probe_c = with_categorical(probe);
  for (auto fam : {Family::dummy, Family::linear, Family::ridge, Family::decision_tree, Family::gradient_boosting, Family::mlp}) {
    for (auto task : {Task::classification, Task::regression}) {
      const auto spec = small(fam, task);
      const auto m = task == Task::classification ? train_classifier(cls, spec, 7) : train_regressor(reg, spec, 7);
      const auto dir = temp_dir(std::string(family_name(fam)) + std::string(task_name(task)));
      m.save(dir);
      const auto back = TrainedModel::load(dir);
      const auto& p = task == Task::classification ? probe_c : probe;
      CHECK(back.predict(p) == m.predict(p));
      CHECK(back.manifest() == m.manifest());
      CHECK(back.spec().label() == m.spec().label());
      CHECK(back.metadata().winsor_upper == m.metadata().winsor_upper);
    }
  }
  const auto dir = temp_dir("tamper");
  train_regressor(reg, small(Family::linear, Task::regression), 1).save(dir);
  {
    std::fstream f(dir / "params.bin", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(-3, std::ios::end);
    f.put('\x7f');
  }
  CHECK_THROWS_AS(TrainedModel::load(dir), InvalidInput);
  CHECK_THROWS_AS(TrainedModel::load(temp_dir("absent")), IoError);
}

TEST_CASE("prediction matches columns by name and rejects mismatches") {
  auto reg = synthetic(50, 3, 19, [](const Eigen::VectorXd& x, auto&) { return x(0) - x(2); });
  const auto m = train_regressor(reg, ModelSpec::make(Family::linear, Task::regression), 0, 1.0);
  auto shuffled = reg.select_columns({2, 0, 1});
  CHECK(m.predict(shuffled) == m.predict(reg));
  auto missing = reg.select_columns({0, 1});
  CHECK_THROWS_AS(m.predict(missing), InvalidInput);
  CHECK_THROWS_AS(m.predict_matrix(Eigen::MatrixXd::Zero(2, 2)), InvalidInput);
}

TEST_CASE("training entry points enforce dataset roles") {
  auto reg = synthetic(100, 2, 20, [](const Eigen::VectorXd& x, auto&) { return std::exp(2 * x(0)); });
  auto cls = with_categorical(synthetic(40, 2, 21, [](const Eigen::VectorXd& x, auto&) { return x(0) > 0 ? 1.0 : 0.0; }));
  const auto spec_r = ModelSpec::make(Family::dummy, Task::regression);
  const auto spec_c = ModelSpec::make(Family::dummy, Task::classification);
  CHECK_THROWS_AS(train_regressor(cls, spec_r, 0), InvalidInput);
  CHECK_THROWS_AS(train_classifier(reg, spec_c, 0), InvalidInput);
  CHECK_THROWS_AS(train_classifier(cls, spec_r, 0), InvalidInput);
  auto no_xc = cls.select_columns({0, 1});
  CHECK_THROWS_AS(train_classifier(no_xc, spec_c, 0), InvalidInput);

  const auto w = train_regressor(reg, spec_r, 0);
  REQUIRE(w.metadata().winsor_upper.has_value());
  std::vector<double> ys(reg.y.data(), reg.y.data() + reg.y.size());
  std::sort(ys.begin(), ys.end());
  const double h = 0.95 * (ys.size() - 1);
  const auto lo = static_cast<std::size_t>(h);
  CHECK(*w.metadata().winsor_upper == Catch::Approx(ys[lo] + (h - lo) * (ys[lo + 1] - ys[lo])));
  // mean of the clipped target
  double mean = 0;
  for (double v : ys) mean += std::min(v, *w.metadata().winsor_upper);
  CHECK(w.predict(reg)(0) == Catch::Approx(mean / ys.size()));

  const auto pred = predict_stability(train_classifier(cls, small(Family::gradient_boosting, Task::classification), 0), cls);
  for (Eigen::Index i = 0; i < pred.scores.size(); ++i) CHECK(pred.labels(i) == (pred.scores(i) >= 0.5 ? 1.0 : 0.0));
}

TEST_CASE("model specs validate their hyperparameters and round-trip through JSON") {
  auto s = ModelSpec::make(Family::mlp, Task::regression);
  CHECK_NOTHROW(s.validate());
  s.hp.hidden_layers = {};
  CHECK_THROWS_AS(s.validate(), InvalidInput);
  auto g = ModelSpec::make(Family::gradient_boosting, Task::classification);
  g.hp.subsample = 0.0;
  CHECK_THROWS_AS(g.validate(), InvalidInput);
  g.hp.subsample = 0.8;
  g.hp.hidden_layers = {3, 2};
  g.hp.activation = Activation::tanh;
  const auto back = spec_from_json(to_json(g));
  CHECK(back.label() == g.label());
  CHECK(back.hp.subsample == 0.8);
  CHECK(back.hp.hidden_layers == g.hp.hidden_layers);
  CHECK(back.hp.activation == Activation::tanh);
  CHECK_THROWS_AS(parse_family("svm"), InvalidInput);
}
