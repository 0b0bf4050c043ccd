// Acceptance run over the bundled system. One PASS/FAIL line per criterion;
// exit status is the number of failed criteria.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "acdc/common/error.hpp"
#include "acdc/common/rng.hpp"
#include "acdc/dataforge/engineering.hpp"
#include "acdc/dataforge/generation.hpp"
#include "acdc/dataforge/sampling.hpp"
#include "acdc/grid/feasibility.hpp"
#include "acdc/reduction/performance_map.hpp"
#include "acdc/reduction/selection.hpp"
#include "acdc/scheduler/schedule.hpp"
#include "acdc/smallsignal/indicators.hpp"
#include "acdc/smallsignal/stability.hpp"
#include "acdc/smallsignal/state_space.hpp"
#include "acdc/surrogate/metrics.hpp"
#include "acdc/surrogate/training.hpp"
#include "unit/lti_oracles.hpp"

using namespace acdc;
using grid::Ccrc;
using grid::CcrcId;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Tally {
  int passed = 0, failed = 0;
  std::vector<std::string> lines;

  void report(int id, const std::string& name, bool ok, const std::string& detail) {
    const auto line = fmt::format("{} {:>2} {} | {}", ok ? "PASS" : "FAIL", id, name, detail);
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    lines.push_back(line);
    (ok ? passed : failed)++;
  }

  // Exceptions inside a criterion count as a failure of that criterion only.
  void run(int id, const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
    try {
      const auto [ok, detail] = body();
      report(id, name, ok, detail);
    } catch (const std::exception& e) {
      report(id, name, false, fmt::format("exception: {}", e.what()));
    }
  }
};

void note(const std::string& s) {
  std::printf("      %s\n", s.c_str());
  std::fflush(stdout);
}

smallsignal::StateSpaceModel from_lti(const oracles::Lti& s) {
  return smallsignal::make_state_space(s.A, s.B, s.C, Eigen::MatrixXd::Zero(s.C.rows(), s.B.cols()), s.C.rows());
}

// y(T) for unit steps on every input: exp([[A, B], [0, 0]] T) top-right block
// is int_0^T e^{As} ds B, so no inverse of A is involved.
Eigen::MatrixXd step_asymptote(const oracles::Lti& s, double T) {
  const auto n = s.A.rows(), m = s.B.cols();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + m, n + m);
  M.topLeftCorner(n, n) = s.A * T;
  M.topRightCorner(n, m) = s.B * T;
  const Eigen::MatrixXd E = M.exp();
  return s.C * E.topRightCorner(n, m);
}

double weighted(const scheduler::Indicators& v, const scheduler::Weights& w) {
  double s = 0;
  for (std::size_t j = 0; j < v.size(); ++j) s += w[j] * v[j];
  return s;
}

std::string ids_text(const std::vector<CcrcId>& ids) {
  std::string s;
  for (auto id : ids) s += (s.empty() ? "" : ",") + std::to_string(id);
  return "{" + s + "}";
}

// Shared pipeline state
struct Pipeline {
  grid::GridTopology topology = grid::default_topology();
  std::vector<CcrcId> reduced_ids;
  std::vector<Ccrc> reduced;
  std::optional<scheduler::SurrogateModels> models;
  double training_s = 0.0;
};

constexpr std::uint64_t kSeed = 2024;
constexpr std::size_t kTableOps = 200;
constexpr std::size_t kRegions = 20;
constexpr std::size_t kCorpusRows = 5000;
constexpr std::size_t kRegressorBudget = 400;
constexpr std::size_t kDaySlots = 96;
constexpr CcrcId kBoundaryCcrc = 221;  // about 2/3 stable over the ranges

}  // namespace

int main() {
  Tally tally;
  Pipeline P;
  const auto& T = P.topology;
  const auto t_all = Clock::now();

  tally.run(1, "feasibility count", [&] {
    const auto t0 = Clock::now();
    const auto all = grid::enumerate_all_ccrcs(T);
    const auto feasible = grid::feasible_ccrcs(T);
    const double s = seconds_since(t0);
    return std::pair{all.size() == 729 && feasible.size() == 95 && s < 1.0,
                     fmt::format("{} total / {} feasible in {:.4f} s (need 729 / 95, < 1 s)", all.size(),
                                 feasible.size(), s)};
  });

  tally.run(2, "H2 norm vs frequency-domain quadrature", [&] {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(derive_seed(kSeed, "h2"));
    std::uniform_int_distribution<int> dim(1, 8), io(1, 3);
    double worst = 0;
    for (int k = 0; k < 200; ++k) {
      const auto s = oracles::random_stable(dim(rng), io(rng), io(rng), rng);
      const double h2 = smallsignal::h2_norm(from_lti(s), smallsignal::OutputSet::frequency);
      const double ref = oracles::h2_by_quadrature(s.A, s.B, s.C);
      worst = std::max(worst, std::abs(h2 - ref) / ref);
    }
    double analytic = 0;
    std::uniform_real_distribution<double> a(0.05, 20.0), bc(-3.0, 3.0);
    for (int k = 0; k < 50; ++k) {
      const double ak = a(rng), b = bc(rng), c = bc(rng);
      const auto ss = smallsignal::make_state_space(Eigen::MatrixXd::Constant(1, 1, -ak), Eigen::MatrixXd::Constant(1, 1, b),
                                                    Eigen::MatrixXd::Constant(1, 1, c), Eigen::MatrixXd::Zero(1, 1), 1);
      const double exact = std::abs(b * c) / std::sqrt(2 * ak);
      analytic = std::max(analytic, std::abs(smallsignal::h2_norm(ss, smallsignal::OutputSet::frequency) - exact));
    }
    const double s = seconds_since(t0);
    return std::pair{worst <= 5e-3 && analytic <= 1e-10 && s < 30,
                     fmt::format("200 systems worst rel err {:.2e} (<= 5e-3), 1/sqrt(2a) cases max err {:.1e} "
                                 "(<= 1e-10), {:.1f} s (< 30 s)",
                                 worst, analytic, s)};
  });

  tally.run(3, "DC gain vs step-response asymptote", [&] {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(derive_seed(kSeed, "dcgain"));
    std::uniform_int_distribution<int> dim(1, 8), io(1, 3);
    double worst = 0;
    for (int k = 0; k < 200; ++k) {
      const auto s = oracles::random_stable(dim(rng), io(rng), io(rng), rng, 0.2, 1.0);
      const Eigen::MatrixXd G = smallsignal::dc_gain_matrix(from_lti(s), smallsignal::OutputSet::frequency);
      // abscissa <= -0.2, so transients are below e^-40 at T = 200
      const Eigen::MatrixXd Y = step_asymptote(s, 200.0);
      worst = std::max(worst, (G - Y).cwiseAbs().maxCoeff());
    }
    const double s = seconds_since(t0);
    return std::pair{worst <= 1e-4 && s < 60,
                     fmt::format("200 systems worst abs err {:.2e} (<= 1e-4), {:.1f} s (< 60 s)", worst, s)};
  });

  tally.run(4, "stability label vs free-response energy", [&] {
    std::mt19937_64 rng(derive_seed(kSeed, "label"));
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_int_distribution<int> dim(1, 8);
    std::uniform_real_distribution<double> margin(0.002, 1.0);
    int agree = 0, total = 0, stable = 0;
    while (total < 100) {
      const int n = dim(rng);
      Eigen::MatrixXd A = Eigen::MatrixXd::NullaryExpr(n, n, [&] { return g(rng); });
      const double target = (total % 2 ? 1.0 : -1.0) * margin(rng);
      A -= (oracles::max_real_eig(A) - target) * Eigen::MatrixXd::Identity(n, n);
      const auto label = smallsignal::assess_stability(A);
      if (std::abs(label.abscissa) <= 1e-3) continue;
      const auto grows = oracles::free_response_grows(A);
      ++total;
      stable += label.stable;
      agree += grows.has_value() && *grows == !label.stable;
    }
    return std::pair{agree == total,
                     fmt::format("{}/{} agree ({} stable, {} unstable; need 100 %)", agree, total, stable, total - stable)};
  });

  tally.run(5, "LHS strata and entropy refinement", [&] {
    const dataforge::OpSpace space(T.ranges());
    bool strata = true;
    for (std::size_t n : {10u, 100u}) {
      const auto sample = dataforge::lhs_sample(T.ranges(), n, derive_seed(kSeed, n));
      for (Eigen::Index j = 0; j < sample.unit.cols(); ++j) {
        std::set<long> seen;
        for (Eigen::Index i = 0; i < sample.unit.rows(); ++i)
          seen.insert(static_cast<long>(std::floor(sample.unit(i, j) * static_cast<double>(n))));
        strata = strata && seen.size() == n && *seen.begin() == 0 && *seen.rbegin() == static_cast<long>(n) - 1;
      }
    }

    // Boundary distance of a point: nearest dense-reference point with the
    // opposite exact label (unit-cube coordinates).
    const auto c = Ccrc::from_id(kBoundaryCcrc, T.ipc_count());
    const auto ref = dataforge::lhs_generate(T, c, 3000, derive_seed(kSeed, "reference"),
                                             dataforge::SamplingPhase::validation);
    const auto pts = dataforge::entropy_guided_generate(T, c, 400, derive_seed(kSeed, "entropy"));
    auto dist = [&](const dataforge::LabeledPoint& p) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& r : ref)
        if (r.exact.stable() != p.exact.stable()) best = std::min(best, (r.unit - p.unit).norm());
      return best;
    };
    std::vector<double> d1, d2;
    for (const auto& p : pts) (p.provenance.phase == dataforge::SamplingPhase::lhs ? d1 : d2).push_back(dist(p));
    std::vector<double> sorted = d1;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    const auto closer = std::count_if(d2.begin(), d2.end(), [&](double d) { return d < median; });
    const double share = d2.empty() ? 0.0 : static_cast<double>(closer) / static_cast<double>(d2.size());
    return std::pair{strata && share >= 0.60,
                     fmt::format("strata n=10,100 over {} dims: {}; CCRC {} phase-2 closer than phase-1 median "
                                 "{:.3f}: {}/{} = {:.1f} % (>= 60 %)",
                                 space.dimension(), strata ? "exact" : "violated", kBoundaryCcrc, median, closer,
                                 d2.size(), 100 * share)};
  });

  tally.run(12, "MLP gradient check", [&] {
    double worst = 0;
    int nets = 0;
    for (const auto& hidden : std::vector<std::vector<int>>{{3}, {5, 3}, {4, 4, 2}})
      for (auto act : {surrogate::Activation::relu, surrogate::Activation::logistic, surrogate::Activation::tanh})
        for (auto task : {surrogate::Task::classification, surrogate::Task::regression})
          for (std::uint64_t s = 0; s < 3; ++s) {
            worst = std::max(worst, surrogate::mlp_gradient_check(hidden, act, task, derive_seed(kSeed, s * 31 + nets)));
            ++nets;
          }
    return std::pair{worst <= 1e-4, fmt::format("{} random networks, worst rel err {:.2e} (<= 1e-4)", nets, worst)};
  });

  tally.run(11, "reduction coverage", [&] {
    const auto t0 = Clock::now();
    const auto feasible = grid::feasible_ccrcs(T);
    const auto ops = dataforge::lhs_sample(T.ranges(), kTableOps, derive_seed(kSeed, "table")).points;
    const auto table = reduction::build_indicator_table(T, feasible, ops);
    const auto out = reduction::reduce(table, kRegions, derive_seed(kSeed, "regions"));
    P.reduced_ids = out.result.reduced;
    for (auto id : P.reduced_ids) P.reduced.push_back(Ccrc::from_id(id, T.ipc_count()));
    note(fmt::format("indicator table {} CCRCs x {} OPs, {} regions, {:.1f} s; reduced set {}", feasible.size(),
                     ops.size(), out.regions.size(), seconds_since(t0), ids_text(P.reduced_ids)));

    int level5 = 0;
    for (const auto& map : out.maps) {
      const auto sub = reduction::restrict_rows(map, P.reduced_ids);
      for (std::size_t c = 0; c < sub.regions(); ++c) {
        int best = 5;
        for (std::size_t r = 0; r < sub.rows(); ++r)
          best = std::min(best, sub.level(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
        level5 += best == 5;
      }
    }
    const auto gaps = reduction::coverage_gaps(out.maps, P.reduced_ids, 1);
    for (const auto& g : gaps)
      note(fmt::format("gap {} region {}: best {} reduced {}", dataforge::target_name(g.indicator), g.region, g.best,
                       g.achieved));
    return std::pair{!P.reduced.empty() && level5 == 0 && gaps.empty(),
                     fmt::format("|R| = {}, uncovered (level 5) cells {}, regions worse than the all-CCRC optimum "
                                 "by more than one level {}",
                                 P.reduced.size(), level5, gaps.size())};
  });

  // Surrogates over R, shared by 6, 7, 9 and 10.
  std::optional<scheduler::SurrogateCorpus> corpus;
  const auto t_train = Clock::now();
  tally.run(6, "surrogate classifier F-beta", [&] {
    if (P.reduced.empty()) return std::pair{false, std::string("no reduced set")};
    scheduler::TrainingOptions opts;
    opts.classifier_budget = (kCorpusRows + P.reduced.size() - 1) / P.reduced.size();
    opts.regressor_budget = kRegressorBudget;
    corpus = scheduler::generate_corpus(T, P.reduced, opts, derive_seed(kSeed, "corpus"));
    scheduler::TrainingReport report;
    P.models = scheduler::fit_surrogates(*corpus, opts, derive_seed(kSeed, "fit"), &report);
    P.training_s = seconds_since(t_train);

    std::vector<dataforge::LabeledPoint> held;
    for (const auto& c : P.reduced) {
      auto v = dataforge::lhs_generate(T, c, opts.classifier_budget / 3,
                                       dataforge::validation_seed(derive_seed(kSeed, c.id())),
                                       dataforge::SamplingPhase::validation);
      held.insert(held.end(), v.begin(), v.end());
    }
    const auto V = dataforge::engineer_features(dataforge::stability_dataset(T, held));
    const auto& y = corpus->stability.y;
    const auto metric = surrogate::classification_metric({y.data(), static_cast<std::size_t>(y.size())});
    const auto pred = surrogate::predict_stability(*P.models->classifier, V);
    const double f = metric({pred.labels.data(), static_cast<std::size_t>(pred.labels.size())},
                            {V.y.data(), static_cast<std::size_t>(V.y.size())});
    note(fmt::format("R corpus {} rows, {:.2f} % stable; classifier {}; CV {:.4f}; held-out {} rows, {:.2f} % stable",
                     corpus->stability.rows(), 100 * y.mean(), report.classifier_model, report.classifier_cv, V.rows(),
                     100 * V.y.mean()));

    // R is almost always stable on this system, so a mixed-class corpus over
    // every seventh feasible CCRC is scored as well.
    const auto t1 = Clock::now();
    const auto feasible = grid::feasible_ccrcs(T);
    std::vector<Ccrc> mixed;
    for (std::size_t i = 0; i < feasible.size(); i += 7) mixed.push_back(feasible[i]);
    const std::size_t per = (kCorpusRows + mixed.size() - 1) / mixed.size();
    dataforge::ClassBalance balance;
    const auto D = dataforge::clean_features(dataforge::engineer_features(
        dataforge::build_stability_dataset(T, mixed, per, derive_seed(kSeed, "mixed"), &balance)));
    std::vector<dataforge::LabeledPoint> mheld;
    for (const auto& c : mixed) {
      auto v = dataforge::lhs_generate(T, c, per / 3, dataforge::validation_seed(derive_seed(kSeed, c.id() + 7919)),
                                       dataforge::SamplingPhase::validation);
      mheld.insert(mheld.end(), v.begin(), v.end());
    }
    const auto MV = dataforge::engineer_features(dataforge::stability_dataset(T, mheld));
    const auto mmetric = surrogate::classification_metric({D.y.data(), static_cast<std::size_t>(D.y.size())});
    const auto model = surrogate::train_classifier(
        D, surrogate::ModelSpec::make(surrogate::Family::gradient_boosting, surrogate::Task::classification),
        derive_seed(kSeed, "mixed-fit"));
    const auto mp = surrogate::predict_stability(model, MV);
    const double mf = mmetric({mp.labels.data(), static_cast<std::size_t>(mp.labels.size())},
                              {MV.y.data(), static_cast<std::size_t>(MV.y.size())});
    const double mixed_s = seconds_since(t1);
    note(fmt::format("mixed corpus {} CCRCs, {} rows, {:.1f} % stable; held-out {} rows; {:.1f} s", mixed.size(),
                     D.rows(), 100 * balance.stable_fraction, MV.rows(), mixed_s));

    const bool ok = corpus->stability.rows() >= static_cast<Eigen::Index>(kCorpusRows) && f >= 0.90 &&
                    D.rows() >= static_cast<Eigen::Index>(kCorpusRows) && mf >= 0.90 && P.training_s < 600 &&
                    mixed_s < 600;
    return std::pair{ok, fmt::format("R: F{:.2g} = {:.4f} on {} rows; mixed: F{:.2g} = {:.4f}; "
                                     "R corpus + all surrogates {:.0f} s (>= 0.90, >= 5000 rows, < 10 min)",
                                     metric.beta, f, corpus->stability.rows(), mmetric.beta, mf, P.training_s)};
  });

  tally.run(7, "surrogate regressors R2", [&] {
    if (!P.models) return std::pair{false, std::string("no trained surrogates")};
    bool ok = true;
    double k_min = 1, h2_min = 1, margin_min = std::numeric_limits<double>::infinity();
    std::size_t models = 0;
    for (const auto& c : P.reduced) {
      const auto it = P.models->regressors.find(c.id());
      if (it == P.models->regressors.end()) {
        note(fmt::format("CCRC {} has no regressors", c.id()));
        ok = false;
        continue;
      }
      const auto held = dataforge::build_indicator_datasets(
          T, c, kRegressorBudget / 2, dataforge::validation_seed(derive_seed(kSeed, c.id() + 104729)));
      for (std::size_t j = 0; j < scheduler::kCriteria; ++j) {
        const auto& m = it->second[j];
        if (!m) {
          ok = false;
          continue;
        }
        const auto V = dataforge::engineer_features(held[j]);
        const auto pred = surrogate::predict_indicator(*m, V);
        const double upper = m->metadata().winsor_upper.value_or(std::numeric_limits<double>::infinity());
        std::vector<double> p, y, pw, yw;
        for (Eigen::Index i = 0; i < pred.size(); ++i) {
          p.push_back(pred(i));
          y.push_back(V.y(i));
          if (V.y(i) <= upper) {
            pw.push_back(pred(i));
            yw.push_back(V.y(i));
          }
        }
        const double r2 = surrogate::r2_score(p, y), r2w = surrogate::r2_score(pw, yw);
        const auto target = std::string(dataforge::target_name(dataforge::kIndicatorRoles[j]));
        note(fmt::format("CCRC {} {}: held-out R2 {:.4f}, winsorized range R2 {:.4f} ({} rows, {})", c.id(), target,
                         r2, r2w, y.size(), m->spec().label()));
        ++models;
        if (target.starts_with("K")) {
          k_min = std::min(k_min, r2);
          ok = ok && r2 >= 0.95;
        } else {
          h2_min = std::min(h2_min, r2);
          margin_min = std::min(margin_min, r2w - r2);
          ok = ok && r2 >= 0.60 && r2w > r2;
        }
      }
    }
    return std::pair{ok && models > 0,
                     fmt::format("{} models: min K R2 {:.4f} (>= 0.95), min H2 R2 {:.4f} (>= 0.60), min winsorized "
                                 "minus overall H2 R2 {:+.4f} (> 0)",
                                 models, k_min, h2_min, margin_min)};
  });

  tally.run(8, "MCDM correctness", [&] {
    std::mt19937_64 rng(derive_seed(kSeed, "mcdm"));
    std::uniform_int_distribution<int> rows(1, 12), level(-3, 3), id(0, 80);
    std::uniform_real_distribution<double> wd(0.0, 1.0);
    int mismatches = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      scheduler::PerformanceMatrix m;
      const int n = rows(rng);
      std::vector<CcrcId> used;
      while (static_cast<int>(used.size()) < n) {
        const auto c = static_cast<CcrcId>(id(rng));
        if (std::find(used.begin(), used.end(), c) == used.end()) used.push_back(c);
      }
      for (auto c : used) m.alternatives.push_back(Ccrc::from_id(c, 4));
      m.rho.resize(n, 4);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < 4; ++j) m.rho(i, j) = trial % 2 ? level(rng) : wd(rng) - 0.5;
      for (auto& w : m.weights) w = trial % 2 ? std::round(4 * wd(rng)) / 4 : wd(rng);
      if (std::all_of(m.weights.begin(), m.weights.end(), [](double w) { return w == 0; })) m.weights[0] = 1;
      const auto current = Ccrc::from_id(static_cast<CcrcId>(id(rng)), 4);
      auto key = [&](std::size_t i) {
        double s = 0;
        for (int j = 0; j < 4; ++j) s += m.weights[static_cast<std::size_t>(j)] * m.rho(static_cast<Eigen::Index>(i), j);
        return std::make_tuple(s, grid::ccr_distance(m.alternatives[i], current), m.alternatives[i].id());
      };
      std::size_t brute = 0;
      for (std::size_t i = 1; i < m.rows(); ++i)
        if (key(i) < key(brute)) brute = i;
      mismatches += scheduler::solve(m, current).best() != brute;
    }

    if (P.reduced.empty()) return std::pair{false, fmt::format("enumeration mismatches {}; no reduced set", mismatches)};
    // A surrogate that answers with the exact chain.
    class ExactBacked final : public scheduler::Oracle {
     public:
      explicit ExactBacked(const grid::GridTopology& t) : exact_(t) {}
      std::optional<bool> stable(const grid::OperatingPoint& op, const Ccrc& c) const override {
        return exact_.stable(op, c);
      }
      std::optional<scheduler::Indicators> indicators(const grid::OperatingPoint& op, const Ccrc& c) const override {
        return exact_.indicators(op, c);
      }

     private:
      scheduler::ExactOracle exact_;
    } perfect(T);
    const auto day = scheduler::day_scenario(T.ranges(), kDaySlots, derive_seed(kSeed, "perfect-day"));
    scheduler::ScheduleConfig config;
    config.reduced = P.reduced;
    const auto ex = scheduler::run_schedule(T, day.actual, scheduler::Mode::exact, config);
    const auto dd = scheduler::run_schedule(T, day.actual, scheduler::Mode::data_driven, config, &perfect);
    std::size_t differ = 0, switches = 0;
    for (std::size_t i = 0; i < ex.size(); ++i) {
      differ += ex[i].ccrc != dd[i].ccrc;
      switches += i > 0 && ex[i].ccrc != ex[i - 1].ccrc;
    }
    return std::pair{mismatches == 0 && differ == 0 && ex.size() == kDaySlots,
                     fmt::format("1000 random matrices, {} mismatches vs enumeration; exact-backed data-driven vs "
                                 "exact on {} slots: {} differing ({} switches in the exact run)",
                                 mismatches, ex.size(), differ, switches)};
  });

  std::vector<std::vector<scheduler::ScheduleRecord>> runs;
  double benchmark_s = 0;
  const scheduler::Weights weights = scheduler::kUniformWeights;
  tally.run(9, "transition safety", [&] {
    if (!P.models) return std::pair{false, std::string("no trained surrogates")};
    const auto t0 = Clock::now();
    const auto day = scheduler::day_scenario(T.ranges(), kDaySlots, derive_seed(kSeed, "benchmark-day"));
    scheduler::ScheduleConfig config;
    config.reduced = P.reduced;
    config.forecast = day.forecast;
    config.weights = weights;
    const scheduler::SurrogateOracle oracle(T, *P.models);
    for (auto mode : {scheduler::Mode::exact, scheduler::Mode::data_driven, scheduler::Mode::day_ahead,
                      scheduler::Mode::no_mcdm})
      runs.push_back(scheduler::run_schedule(T, day.actual, mode, config, &oracle));
    benchmark_s = seconds_since(t0);

    std::size_t slots = 0, unsafe = 0, over = 0, errors = 0;
    for (const auto& run : runs)
      for (const auto& r : run) {
        ++slots;
        unsafe += !r.verified;
        over += r.gamma > r.gamma_star;
        errors += !r.error.empty();
      }
    return std::pair{slots == 4 * kDaySlots && unsafe == 0 && over == 0 && errors == 0,
                     fmt::format("4 modes x {} slots: {} not exact-stable at both OPs, {} with gamma > relaxed "
                                 "gamma*, {} slot errors",
                                 kDaySlots, unsafe, over, errors)};
  });

  tally.run(10, "benchmark directionality", [&] {
    if (runs.size() != 4) return std::pair{false, std::string("benchmark did not run")};
    const auto report = scheduler::compare_schedules(runs);
    for (const auto& s : report.modes)
      note(fmt::format("{:<12} agreement {:6.2f} %  plan/assignment unstable {:5.2f} %  solve {:8.3f} ms  "
                       "verify {:8.3f} ms",
                       scheduler::mode_name(s.mode), s.agreement, s.instability, s.mean_solve_ms, s.mean_verify_ms));
    const auto find = [&](scheduler::Mode m) {
      return *std::find_if(report.modes.begin(), report.modes.end(), [&](const auto& s) { return s.mode == m; });
    };
    const auto dd = find(scheduler::Mode::data_driven);

    // mean exact indicators and weighted objective over slots where both are verified
    const auto& dd_run = runs[1];
    const auto& base = runs[3];
    scheduler::Indicators dd_mean{}, base_mean{};
    double dd_obj = 0, base_obj = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < dd_run.size(); ++i) {
      if (!dd_run[i].indicators || !base[i].indicators) continue;
      ++n;
      dd_obj += weighted(*dd_run[i].indicators, weights);
      base_obj += weighted(*base[i].indicators, weights);
      for (std::size_t j = 0; j < scheduler::kCriteria; ++j) {
        dd_mean[j] += (*dd_run[i].indicators)[j];
        base_mean[j] += (*base[i].indicators)[j];
      }
    }
    bool no_higher = n > 0;
    std::string per;
    for (std::size_t j = 0; j < scheduler::kCriteria; ++j) {
      dd_mean[j] /= static_cast<double>(std::max<std::size_t>(n, 1));
      base_mean[j] /= static_cast<double>(std::max<std::size_t>(n, 1));
      no_higher = no_higher && dd_mean[j] <= base_mean[j];
      per += fmt::format(" {} {:.6g}/{:.6g}", dataforge::target_name(dataforge::kIndicatorRoles[j]), dd_mean[j],
                         base_mean[j]);
    }
    dd_obj /= static_cast<double>(std::max<std::size_t>(n, 1));
    base_obj /= static_cast<double>(std::max<std::size_t>(n, 1));
    note(fmt::format("mean exact indicators data-driven/no-mcdm over {} slots:{}", n, per));

    const double speedup = report.speedup.value_or(-1.0);
    const double total_s = P.training_s + benchmark_s;
    const bool ok = dd.agreement >= 70.0 && dd_obj < base_obj && no_higher && speedup > 0 && total_s < 900;
    return std::pair{ok, fmt::format("agreement {:.1f} % (>= 70 %); objective {:.6g} vs no-mcdm {:.6g} (strictly "
                                     "lower, no indicator mean higher: {}); solve-time reduction {:.1f} % (> 0), "
                                     "verification {:.3f} ms/slot reported separately; surrogates + day {:.0f} s "
                                     "(< 900 s)",
                                     dd.agreement, dd_obj, base_obj, no_higher ? "yes" : "no", 100 * speedup,
                                     dd.mean_verify_ms, total_s)};
  });

  std::printf("\nsummary (%.0f s):\n", seconds_since(t_all));
  std::sort(tally.lines.begin(), tally.lines.end(), [](const std::string& a, const std::string& b) {
    return std::stoi(a.substr(5, 2)) < std::stoi(b.substr(5, 2));
  });
  for (const auto& l : tally.lines) std::printf("%s\n", l.c_str());
  std::printf("%d passed, %d failed\n", tally.passed, tally.failed);
  return tally.failed;
}
