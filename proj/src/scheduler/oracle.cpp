#include "acdc/scheduler/oracle.hpp"

#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "acdc/common/error.hpp"
#include "acdc/common/hash.hpp"
#include "acdc/common/parallel.hpp"
#include "acdc/common/rng.hpp"
#include "acdc/dataforge/engineering.hpp"
#include "acdc/dataforge/generation.hpp"
#include "acdc/powerflow/features.hpp"
#include "acdc/powerflow/internals.hpp"
#include "acdc/powerflow/solver.hpp"
#include "acdc/surrogate/evaluation.hpp"
#include "acdc/surrogate/training.hpp"

namespace acdc::scheduler {

namespace {

void append(std::string& bytes, double v) {
  char buf[sizeof(double)];
  std::memcpy(buf, &v, sizeof v);
  bytes.append(buf, sizeof buf);
}

}  // namespace

std::uint64_t op_hash(const grid::OperatingPoint& op) noexcept {
  std::string bytes;
  for (const auto& g : op.generators) {
    append(bytes, g.p_mw);
    append(bytes, g.cos_phi);
  }
  append(bytes, op.demand_mw);
  for (double s : op.load_shares) append(bytes, s);
  bytes.push_back('|');
  for (double s : op.ipc_schedule_mw) append(bytes, s);
  return fnv1a64(bytes);
}

const dataforge::ExactEvaluation& ExactOracle::evaluate(const grid::OperatingPoint& op,
                                                        const grid::Ccrc& ccrc) const {
  const auto key = std::make_pair(op_hash(op), ccrc.id());
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return *it->second;
  }
  auto eval = std::make_shared<const dataforge::ExactEvaluation>(dataforge::evaluate_exact(topology_, op, ccrc));
  std::lock_guard lock(mutex_);
  return *cache_.emplace(key, std::move(eval)).first->second;
}

std::size_t ExactOracle::evaluations() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

std::optional<bool> ExactOracle::stable(const grid::OperatingPoint& op, const grid::Ccrc& ccrc) const {
  const auto& e = evaluate(op, ccrc);
  if (e.diverged) return std::nullopt;
  return e.stable();
}

std::optional<Indicators> ExactOracle::indicators(const grid::OperatingPoint& op, const grid::Ccrc& ccrc) const {
  const auto& e = evaluate(op, ccrc);
  if (!e.stable() || !e.indicators.complete()) return std::nullopt;
  const auto& i = e.indicators;
  return Indicators{*i.h2_f, *i.h2_vdc, *i.k_f, *i.k_vdc};
}

std::shared_ptr<const dataforge::Dataset> SurrogateOracle::features(const grid::OperatingPoint& op,
                                                                    const grid::Ccrc& ccrc) const {
  const auto key = std::make_pair(op_hash(op), ccrc.id());
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  std::shared_ptr<const dataforge::Dataset> row;
  try {
    const auto pf = powerflow::solve_power_flow(topology_, op, ccrc);
    const auto f = powerflow::extract_feature_vector(topology_, pf, powerflow::compute_ipc_internals(topology_, pf));
    dataforge::Dataset ds;
    ds.columns = f.columns;
    for (auto& c : dataforge::xc_columns(topology_)) ds.columns.push_back(std::move(c));
    ds.X.resize(1, static_cast<Eigen::Index>(ds.columns.size()));
    for (std::size_t j = 0; j < f.values.size(); ++j) ds.X(0, static_cast<Eigen::Index>(j)) = f.values[j];
    for (std::size_t k = 0; k < ccrc.size(); ++k)
      ds.X(0, static_cast<Eigen::Index>(f.values.size() + k)) = static_cast<double>(ccrc.role(k));
    ds.y = Eigen::VectorXd::Zero(1);
    row = std::make_shared<const dataforge::Dataset>(dataforge::engineer_features(ds));
  } catch (const InvalidInput&) {
    throw;
  } catch (const NumericError& e) {
    spdlog::debug("surrogate features: CCRC {} has no power flow: {}", ccrc.id(), e.what());
  }
  std::lock_guard lock(mutex_);
  return cache_.emplace(key, std::move(row)).first->second;
}

std::optional<bool> SurrogateOracle::stable(const grid::OperatingPoint& op, const grid::Ccrc& ccrc) const {
  if (!models_.classifier) throw InvalidInput("surrogate oracle: no stability classifier loaded");
  const auto row = features(op, ccrc);
  if (!row) return std::nullopt;
  return surrogate::predict_stability(*models_.classifier, *row).labels(0) > 0.5;
}

std::optional<Indicators> SurrogateOracle::indicators(const grid::OperatingPoint& op, const grid::Ccrc& ccrc) const {
  const auto it = models_.regressors.find(ccrc.id());
  if (it == models_.regressors.end()) return std::nullopt;
  const auto row = features(op, ccrc);
  if (!row) return std::nullopt;
  Indicators out{};
  for (std::size_t k = 0; k < kCriteria; ++k) {
    if (!it->second[k]) return std::nullopt;
    out[k] = surrogate::predict_indicator(*it->second[k], *row)(0);
  }
  return out;
}

void SurrogateModels::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  nlohmann::json doc;
  doc["classifier"] = classifier.has_value();
  if (classifier) classifier->save(dir / "classifier");
  nlohmann::json regs = nlohmann::json::object();
  for (const auto& [id, models] : regressors) {
    nlohmann::json targets = nlohmann::json::array();
    for (std::size_t k = 0; k < kCriteria; ++k) {
      if (!models[k]) continue;
      const auto name = std::string(dataforge::target_name(dataforge::kIndicatorRoles[k]));
      models[k]->save(dir / (std::to_string(id) + "_" + name));
      targets.push_back(name);
    }
    regs[std::to_string(id)] = targets;
  }
  doc["regressors"] = regs;
  std::ofstream out(dir / "models.json");
  if (!out) throw IoError("cannot write " + (dir / "models.json").string());
  out << doc.dump(2) << '\n';
}

SurrogateModels SurrogateModels::load(const std::filesystem::path& dir) {
  std::ifstream in(dir / "models.json");
  if (!in) throw IoError("cannot read " + (dir / "models.json").string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("models.json: " + std::string(e.what()));
  }
  SurrogateModels m;
  if (doc.value("classifier", false)) m.classifier = surrogate::TrainedModel::load(dir / "classifier");
  const auto regs = doc.value("regressors", nlohmann::json::object());
  for (const auto& [key, targets] : regs.items()) {
    const auto id = static_cast<grid::CcrcId>(std::stoul(key));
    auto& slot = m.regressors[id];
    for (const auto& t : targets) {
      const auto role = dataforge::parse_dataset_role("D_" + t.get<std::string>());
      for (std::size_t k = 0; k < kCriteria; ++k)
        if (dataforge::kIndicatorRoles[k] == role)
          slot[k] = surrogate::TrainedModel::load(dir / (key + "_" + t.get<std::string>()));
    }
  }
  return m;
}

namespace {

std::vector<surrogate::ModelSpec> candidate_specs(surrogate::Task task, std::size_t inputs) {
  auto gbt = surrogate::ModelSpec::make(surrogate::Family::gradient_boosting, task);
  auto mlp = surrogate::ModelSpec::make(surrogate::Family::mlp, task);
  mlp.hp.hidden_layers = {static_cast<int>(inputs)};
  mlp.hp.learning_rate = 0.003;
  return {gbt, mlp};
}

std::pair<surrogate::ModelSpec, double> pick_by_cv(surrogate::Task task, const dataforge::Dataset& ds,
                                                   const surrogate::Metric& metric, int folds, std::uint64_t seed) {
  const auto specs = candidate_specs(task, static_cast<std::size_t>(ds.cols()));
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const double s = surrogate::kfold_cv(specs[i], ds, folds, metric, seed).mean;
    spdlog::info("{} {}: CV {} = {:.4f}", ds.target(), specs[i].label(), metric.name(), s);
    if (s > best_score) {
      best_score = s;
      best = i;
    }
  }
  return {specs[best], best_score};
}

}  // namespace

SurrogateCorpus generate_corpus(const grid::GridTopology& topology, const std::vector<grid::Ccrc>& reduced,
                                const TrainingOptions& options, std::uint64_t seed) {
  if (reduced.empty()) throw InvalidInput("generate_corpus: empty reduced set");
  SurrogateCorpus corpus;
  std::vector<std::vector<dataforge::LabeledPoint>> generated(reduced.size());
  std::vector<std::vector<dataforge::Dataset>> sets(reduced.size());
  parallel_for(reduced.size(), [&](std::size_t i) {
    generated[i] = dataforge::entropy_guided_generate(topology, reduced[i], options.classifier_budget,
                                                      derive_seed(seed, reduced[i].id()));
    try {
      sets[i] = dataforge::build_indicator_datasets(topology, reduced[i], options.regressor_budget,
                                                    derive_seed(seed, "indicators"));
    } catch (const InsufficientData& e) {
      spdlog::warn("generate_corpus: no indicator data for CCRC {}: {}", reduced[i].id(), e.what());
    }
  });
  std::vector<dataforge::LabeledPoint> pooled;
  for (auto& g : generated) pooled.insert(pooled.end(), std::make_move_iterator(g.begin()), std::make_move_iterator(g.end()));
  corpus.stability = dataforge::stability_dataset(topology, pooled);
  for (std::size_t i = 0; i < reduced.size(); ++i)
    if (!sets[i].empty()) corpus.indicators[reduced[i].id()] = std::move(sets[i]);
  return corpus;
}

void SurrogateCorpus::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  dataforge::save_dataset(stability, dir / "D_Y");
  nlohmann::json doc;
  doc["indicators"] = nlohmann::json::array();
  for (const auto& [id, sets] : indicators) {
    for (const auto& ds : sets)
      dataforge::save_dataset(ds, dir / (std::to_string(id) + "_" + std::string(dataforge::role_name(ds.role))));
    doc["indicators"].push_back(id);
  }
  std::ofstream out(dir / "corpus.json");
  if (!out) throw IoError("cannot write " + (dir / "corpus.json").string());
  out << doc.dump(2) << '\n';
}

SurrogateCorpus SurrogateCorpus::load(const std::filesystem::path& dir) {
  std::ifstream in(dir / "corpus.json");
  if (!in) throw IoError("cannot read " + (dir / "corpus.json").string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("corpus.json: " + std::string(e.what()));
  }
  SurrogateCorpus c;
  c.stability = dataforge::load_dataset(dir / "D_Y");
  for (const auto& id : doc.at("indicators")) {
    auto& sets = c.indicators[id.get<grid::CcrcId>()];
    for (auto role : dataforge::kIndicatorRoles)
      sets.push_back(dataforge::load_dataset(dir / (std::to_string(id.get<grid::CcrcId>()) + "_" +
                                                    std::string(dataforge::role_name(role)))));
  }
  return c;
}

SurrogateModels fit_surrogates(const SurrogateCorpus& corpus, const TrainingOptions& options, std::uint64_t seed,
                               TrainingReport* report) {
  const int k = static_cast<int>(options.folds);
  SurrogateModels out;
  TrainingReport rep;

  const auto stab = dataforge::clean_features(dataforge::engineer_features(corpus.stability));
  const auto metric = surrogate::classification_metric({stab.y.data(), static_cast<std::size_t>(stab.y.size())});
  const auto [cspec, cscore] = pick_by_cv(surrogate::Task::classification, stab, metric, k, derive_seed(seed, "cv"));
  out.classifier = surrogate::train_classifier(stab, cspec, derive_seed(seed, "classifier"));
  rep.classifier_beta = metric.beta;
  rep.classifier_cv = cscore;
  rep.classifier_rows = static_cast<std::size_t>(stab.rows());
  rep.classifier_model = cspec.label();

  for (const auto& [id, sets] : corpus.indicators) {
    if (sets.size() != kCriteria) throw InvalidInput("fit_surrogates: CCRC " + std::to_string(id) + " needs four datasets");
    auto& slot = out.regressors[id];
    auto& rslot = rep.regressors[id];
    for (std::size_t j = 0; j < kCriteria; ++j) {
      const auto ds = dataforge::clean_features(dataforge::engineer_features(sets[j]));
      std::pair<surrogate::ModelSpec, double> pick;
      try {
        pick = pick_by_cv(surrogate::Task::regression, ds, surrogate::regression_metric(), k,
                          derive_seed(seed, "cv" + std::to_string(id)));
      } catch (const UndefinedMetric& e) {
        spdlog::warn("fit_surrogates: CCRC {} {}: {}", id, ds.target(), e.what());
        pick = {candidate_specs(surrogate::Task::regression, static_cast<std::size_t>(ds.cols())).front(), 0.0};
      }
      slot[j] = surrogate::train_regressor(ds, pick.first, derive_seed(seed, id * 8 + j), options.winsor_percentile);
      rslot[j] = {pick.first.label(), pick.second};
    }
  }
  if (report) *report = std::move(rep);
  return out;
}

SurrogateModels train_surrogates(const grid::GridTopology& topology, const std::vector<grid::Ccrc>& reduced,
                                 const TrainingOptions& options, std::uint64_t seed, TrainingReport* report) {
  return fit_surrogates(generate_corpus(topology, reduced, options, seed), options, seed, report);
}

}  // namespace acdc::scheduler
