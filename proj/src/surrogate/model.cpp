#include "acdc/surrogate/model.hpp"

#include <fstream>
#include <numeric>
#include <sstream>

#include "acdc/common/error.hpp"
#include "acdc/common/hash.hpp"
#include "binary_io.hpp"
#include "learners.hpp"

namespace acdc::surrogate {

namespace {

constexpr const char* kFamilies[] = {"dummy", "linear", "ridge", "decision-tree", "gradient-boosting", "mlp"};
constexpr const char* kActivations[] = {"relu", "logistic", "tanh"};
constexpr char kMagic[8] = {'A', 'C', 'D', 'C', 'P', 'R', 'M', '1'};
constexpr std::uint32_t kVersion = 1;

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + p.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + p.string());
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string_view family_name(Family f) noexcept { return kFamilies[static_cast<int>(f)]; }

Family parse_family(std::string_view name) {
  for (int i = 0; i < 6; ++i)
    if (name == kFamilies[i]) return static_cast<Family>(i);
  if (name == "logistic") return Family::linear;
  if (name == "gbt") return Family::gradient_boosting;
  if (name == "tree") return Family::decision_tree;
  throw InvalidInput("unknown model family '" + std::string(name) + "'");
}

std::string_view task_name(Task t) noexcept { return t == Task::classification ? "classification" : "regression"; }

Task parse_task(std::string_view name) {
  if (name == "classification") return Task::classification;
  if (name == "regression") return Task::regression;
  throw InvalidInput("unknown task '" + std::string(name) + "'");
}

std::string_view activation_name(Activation a) noexcept { return kActivations[static_cast<int>(a)]; }

Activation parse_activation(std::string_view name) {
  for (int i = 0; i < 3; ++i)
    if (name == kActivations[i]) return static_cast<Activation>(i);
  throw InvalidInput("unknown activation '" + std::string(name) + "'");
}

ModelSpec ModelSpec::make(Family family, Task task) {
  ModelSpec s;
  s.family = family;
  s.task = task;
  switch (family) {
    case Family::linear: s.hp.l2 = 1e-6; break;
    case Family::ridge: s.hp.l2 = 1.0; break;
    case Family::decision_tree:
      s.hp.max_depth = 0;
      s.hp.l2 = 0.0;
      s.hp.max_bins = 4096;
      break;
    case Family::gradient_boosting: s.hp.l2 = 1.0; break;
    case Family::mlp:
      s.hp.l2 = 1e-4;
      s.hp.learning_rate = 1e-3;
      break;
    case Family::dummy: break;
  }
  return s;
}

void ModelSpec::validate() const {
  const auto& h = hp;
  auto bad = [&](const std::string& what) { throw InvalidInput(label() + ": " + what); };
  if (h.max_depth < 0) bad("max_depth must be >= 0");
  if (h.min_samples_leaf < 1) bad("min_samples_leaf must be >= 1");
  if (h.l2 < 0) bad("l2 must be >= 0");
  if (family == Family::gradient_boosting) {
    if (!(h.learning_rate > 0 && h.learning_rate <= 1)) bad("learning_rate must be in (0, 1]");
    if (!(h.subsample > 0 && h.subsample <= 1)) bad("subsample must be in (0, 1]");
    if (h.n_estimators < 1) bad("n_estimators must be >= 1");
  }
  if (family == Family::gradient_boosting || family == Family::decision_tree) {
    if (h.max_bins < 2 || h.max_bins > 65535) bad("max_bins must be in [2, 65535]");
  }
  if (family == Family::mlp) {
    if (h.hidden_layers.empty()) bad("at least one hidden layer");
    for (int w : h.hidden_layers)
      if (w < 1) bad("hidden layer widths must be >= 1");
    if (!(h.learning_rate > 0)) bad("learning_rate must be positive");
    if (h.max_epochs < 1 || h.batch_size < 1 || h.patience < 1) bad("epochs, batch size and patience must be >= 1");
    if (!(h.validation_fraction > 0 && h.validation_fraction < 0.5)) bad("validation_fraction must be in (0, 0.5)");
  }
}

double ModelSpec::complexity() const {
  switch (family) {
    case Family::gradient_boosting: return hp.n_estimators * 100.0 + hp.max_depth;
    case Family::mlp: return std::accumulate(hp.hidden_layers.begin(), hp.hidden_layers.end(), 0.0);
    case Family::decision_tree: return hp.max_depth == 0 ? 1e9 : hp.max_depth;
    default: return 0.0;
  }
}

std::string ModelSpec::label() const {
  std::string s(family_name(family));
  s += "/";
  s += task_name(task);
  switch (family) {
    case Family::gradient_boosting:
      s += "(lr=" + std::to_string(hp.learning_rate).substr(0, 5) + ",depth=" + std::to_string(hp.max_depth) +
           ",sub=" + std::to_string(hp.subsample).substr(0, 4) + ",trees=" + std::to_string(hp.n_estimators) + ")";
      break;
    case Family::mlp: {
      s += "(";
      for (std::size_t i = 0; i < hp.hidden_layers.size(); ++i) s += (i ? "x" : "") + std::to_string(hp.hidden_layers[i]);
      s += "," + std::string(activation_name(hp.activation)) + ")";
      break;
    }
    case Family::decision_tree: s += "(depth=" + std::to_string(hp.max_depth) + ")"; break;
    case Family::ridge: s += "(l2=" + std::to_string(hp.l2) + ")"; break;
    default: break;
  }
  return s;
}

nlohmann::json to_json(const ModelSpec& spec) {
  const auto& h = spec.hp;
  return {{"family", family_name(spec.family)},
          {"task", task_name(spec.task)},
          {"hyperparameters",
           {{"learning_rate", h.learning_rate},
            {"max_depth", h.max_depth},
            {"subsample", h.subsample},
            {"n_estimators", h.n_estimators},
            {"min_samples_leaf", h.min_samples_leaf},
            {"max_bins", h.max_bins},
            {"l2", h.l2},
            {"hidden_layers", h.hidden_layers},
            {"activation", activation_name(h.activation)},
            {"max_epochs", h.max_epochs},
            {"batch_size", h.batch_size},
            {"patience", h.patience},
            {"validation_fraction", h.validation_fraction}}}};
}

ModelSpec spec_from_json(const nlohmann::json& j) {
  try {
    ModelSpec s = ModelSpec::make(parse_family(j.at("family").get<std::string>()),
                                  parse_task(j.at("task").get<std::string>()));
    if (j.contains("hyperparameters")) {
      const auto& h = j.at("hyperparameters");
      auto& o = s.hp;
      o.learning_rate = h.value("learning_rate", o.learning_rate);
      o.max_depth = h.value("max_depth", o.max_depth);
      o.subsample = h.value("subsample", o.subsample);
      o.n_estimators = h.value("n_estimators", o.n_estimators);
      o.min_samples_leaf = h.value("min_samples_leaf", o.min_samples_leaf);
      o.max_bins = h.value("max_bins", o.max_bins);
      o.l2 = h.value("l2", o.l2);
      o.hidden_layers = h.value("hidden_layers", o.hidden_layers);
      if (h.contains("activation")) o.activation = parse_activation(h.at("activation").get<std::string>());
      o.max_epochs = h.value("max_epochs", o.max_epochs);
      o.batch_size = h.value("batch_size", o.batch_size);
      o.patience = h.value("patience", o.patience);
      o.validation_fraction = h.value("validation_fraction", o.validation_fraction);
    }
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("model spec: ") + e.what());
  }
}

std::unique_ptr<Estimator> fit_estimator(const ModelSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                         std::uint64_t seed) {
  spec.validate();
  if (X.rows() != y.size()) throw InvalidInput("fit: X and y row counts differ");
  if (X.rows() == 0) throw InsufficientData("fit: no training rows");
  if (!X.allFinite() || !y.allFinite()) throw InvalidInput("fit: non-finite training data");
  if (spec.task == Task::classification)
    for (double v : y)
      if (v != 0.0 && v != 1.0) throw InvalidInput("fit: classification targets must be 0 or 1");
  switch (spec.family) {
    case Family::dummy: return detail::fit_dummy(spec, y);
    case Family::linear:
    case Family::ridge: return detail::fit_linear(spec, X, y);
    case Family::decision_tree: return detail::fit_tree(spec, X, y);
    case Family::gradient_boosting: return detail::fit_gbt(spec, X, y, seed);
    case Family::mlp: return detail::fit_mlp(spec, X, y, seed);
  }
  throw InvalidInput("fit: unknown family");
}

std::unique_ptr<Estimator> load_estimator(const ModelSpec& spec, BinaryReader& in) {
  switch (spec.family) {
    case Family::dummy: return detail::load_dummy(in);
    case Family::linear:
    case Family::ridge: return detail::load_linear(in);
    case Family::decision_tree: return detail::load_tree(in);
    case Family::gradient_boosting: return detail::load_gbt(in);
    case Family::mlp: return detail::load_mlp(in);
  }
  throw IoError("params.bin: unknown family");
}

TrainedModel::TrainedModel(ModelSpec spec, std::vector<std::string> manifest, std::vector<bool> categorical,
                           Eigen::VectorXd mean, Eigen::VectorXd scale, std::shared_ptr<const Estimator> est,
                           TrainingMetadata meta)
    : spec_(std::move(spec)),
      manifest_(std::move(manifest)),
      categorical_(std::move(categorical)),
      mean_(std::move(mean)),
      scale_(std::move(scale)),
      est_(std::move(est)),
      meta_(std::move(meta)) {
  const auto n = manifest_.size();
  if (categorical_.size() != n || static_cast<std::size_t>(mean_.size()) != n ||
      static_cast<std::size_t>(scale_.size()) != n || !est_)
    throw InvalidInput("TrainedModel: inconsistent manifest");
}

Eigen::MatrixXd TrainedModel::align(const dataforge::Dataset& rows) const {
  Eigen::MatrixXd X(rows.rows(), static_cast<Eigen::Index>(manifest_.size()));
  for (std::size_t j = 0; j < manifest_.size(); ++j) {
    if (!rows.has_column(manifest_[j]))
      throw InvalidInput("predict: column '" + manifest_[j] + "' of the model manifest is missing");
    X.col(static_cast<Eigen::Index>(j)) = rows.X.col(static_cast<Eigen::Index>(rows.column(manifest_[j])));
  }
  return X;
}

Eigen::VectorXd TrainedModel::predict(const dataforge::Dataset& rows) const { return predict_matrix(align(rows)); }

Eigen::VectorXd TrainedModel::predict_matrix(const Eigen::MatrixXd& X) const {
  if (static_cast<std::size_t>(X.cols()) != manifest_.size())
    throw InvalidInput("predict: expected " + std::to_string(manifest_.size()) + " columns, got " +
                       std::to_string(X.cols()));
  Eigen::MatrixXd Z = (X.rowwise() - mean_.transpose()).array().rowwise() / scale_.transpose().array();
  return est_->predict(Z);
}

void TrainedModel::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  BinaryWriter w;
  w.raw(kMagic, sizeof kMagic);
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(spec_.family));
  w.vec(mean_);
  w.vec(scale_);
  est_->save(w);
  write_file(dir / "params.bin", w.bytes());
  write_file(dir / "spec.json", to_json(spec_).dump(2) + "\n");

  nlohmann::json m;
  m["columns"] = manifest_;
  std::vector<int> cat(categorical_.begin(), categorical_.end());
  m["categorical"] = cat;
  m["params_fnv1a64"] = hex(fnv1a64(w.bytes()));
  m["seed"] = meta_.seed;
  m["fold_scores"] = meta_.fold_scores;
  m["selected_features"] = meta_.selected_features;
  m["target"] = meta_.target;
  m["rows"] = meta_.rows;
  if (meta_.winsor_upper) m["winsor_upper"] = *meta_.winsor_upper;
  if (meta_.owner) m["owner"] = *meta_.owner;
  write_file(dir / "manifest.json", m.dump(2) + "\n");
}

TrainedModel TrainedModel::load(const std::filesystem::path& dir) {
  ModelSpec spec;
  nlohmann::json m;
  try {
    spec = spec_from_json(nlohmann::json::parse(read_file(dir / "spec.json")));
    m = nlohmann::json::parse(read_file(dir / "manifest.json"));
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError("model store " + dir.string() + ": " + e.what());
  }
  const std::string bytes = read_file(dir / "params.bin");
  try {
    if (m.at("params_fnv1a64").get<std::string>() != hex(fnv1a64(bytes)))
      throw InvalidInput("model store " + dir.string() + ": params.bin does not match manifest.json");
    BinaryReader r(bytes);
    if (r.raw(sizeof kMagic) != std::string(kMagic, sizeof kMagic)) throw IoError("params.bin: bad magic");
    if (r.u32() != kVersion) throw IoError("params.bin: unsupported version");
    if (r.u32() != static_cast<std::uint32_t>(spec.family))
      throw InvalidInput("model store " + dir.string() + ": params.bin family differs from spec.json");
    Eigen::VectorXd mean = r.vec(), scale = r.vec();
    auto est = load_estimator(spec, r);
    if (!r.done()) throw IoError("params.bin: trailing bytes");

    auto cols = m.at("columns").get<std::vector<std::string>>();
    auto cat_int = m.at("categorical").get<std::vector<int>>();
    if (cols.size() != static_cast<std::size_t>(mean.size()))
      throw InvalidInput("model store " + dir.string() + ": manifest width differs from params.bin");
    TrainingMetadata meta;
    meta.seed = m.at("seed").get<std::uint64_t>();
    meta.fold_scores = m.at("fold_scores").get<std::vector<double>>();
    meta.selected_features = m.at("selected_features").get<std::vector<std::string>>();
    meta.target = m.at("target").get<std::string>();
    meta.rows = m.at("rows").get<std::size_t>();
    if (m.contains("winsor_upper")) meta.winsor_upper = m.at("winsor_upper").get<double>();
    if (m.contains("owner")) meta.owner = m.at("owner").get<grid::CcrcId>();
    return TrainedModel(std::move(spec), std::move(cols), std::vector<bool>(cat_int.begin(), cat_int.end()),
                        std::move(mean), std::move(scale), std::move(est), std::move(meta));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("model store " + dir.string() + ": " + e.what());
  }
}

TrainedModel fit_model(const ModelSpec& spec, const dataforge::Dataset& ds, std::uint64_t seed) {
  const auto d = static_cast<std::size_t>(ds.cols());
  std::vector<std::string> names;
  std::vector<bool> cat;
  Eigen::VectorXd mean(ds.cols()), scale(ds.cols());
  const double n = static_cast<double>(ds.rows());
  for (std::size_t j = 0; j < d; ++j) {
    const auto c = ds.X.col(static_cast<Eigen::Index>(j));
    names.push_back(ds.columns[j].name);
    const bool is_cat = ds.columns[j].kind == powerflow::FeatureKind::categorical;
    cat.push_back(is_cat);
    const double mu = c.mean();
    const double sd = n > 0 ? std::sqrt((c.array() - mu).square().sum() / n) : 0.0;
    const bool pass = is_cat || !(sd > 1e-12 * std::max(1.0, std::abs(mu)));
    mean(static_cast<Eigen::Index>(j)) = pass ? 0.0 : mu;
    scale(static_cast<Eigen::Index>(j)) = pass ? 1.0 : sd;
  }
  Eigen::MatrixXd Z = (ds.X.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
  std::shared_ptr<const Estimator> est = fit_estimator(spec, Z, ds.y, seed);
  TrainingMetadata meta;
  meta.seed = seed;
  meta.selected_features = names;
  meta.target = ds.target();
  meta.owner = ds.owner;
  meta.rows = static_cast<std::size_t>(ds.rows());
  meta.winsor_upper = ds.winsor_upper;
  return TrainedModel(spec, std::move(names), std::move(cat), std::move(mean), std::move(scale), std::move(est),
                      std::move(meta));
}

}  // namespace acdc::surrogate
