#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "acdc/dataforge/dataset.hpp"

namespace acdc::surrogate {

enum class Family { dummy, linear, ridge, decision_tree, gradient_boosting, mlp };
enum class Task { classification, regression };
enum class Activation { relu, logistic, tanh };

std::string_view family_name(Family f) noexcept;
Family parse_family(std::string_view name);
std::string_view task_name(Task t) noexcept;
Task parse_task(std::string_view name);
std::string_view activation_name(Activation a) noexcept;
Activation parse_activation(std::string_view name);

struct Hyperparameters {
  double learning_rate = 0.1;  // GBT shrinkage; MLP Adam step
  int max_depth = 6;           // trees; 0 = unlimited
  double subsample = 1.0;      // GBT row subsampling
  int n_estimators = 200;      // GBT rounds
  int min_samples_leaf = 1;
  int max_bins = 256;          // histogram split candidates per feature
  double l2 = 1.0;             // ridge penalty, GBT leaf penalty, MLP weight decay
  std::vector<int> hidden_layers = {32};
  Activation activation = Activation::relu;
  int max_epochs = 300;
  int batch_size = 64;
  int patience = 15;
  double validation_fraction = 0.1;
};

struct ModelSpec {
  Family family = Family::dummy;
  Task task = Task::classification;
  Hyperparameters hp;

  // Defaults tuned per family (e.g. unlimited depth for a single tree).
  static ModelSpec make(Family family, Task task);
  void validate() const;  // throws InvalidInput
  // Tie-break size used by grid search: trees, neurons or depth.
  double complexity() const;
  std::string label() const;
};

nlohmann::json to_json(const ModelSpec& spec);
ModelSpec spec_from_json(const nlohmann::json& j);

class BinaryWriter;
class BinaryReader;

// A fitted learner on standardized inputs. Classification scores are class-1
// probabilities; regression scores are the predicted target.
class Estimator {
 public:
  virtual ~Estimator() = default;
  virtual Eigen::VectorXd predict(const Eigen::MatrixXd& X) const = 0;
  virtual void save(BinaryWriter& out) const = 0;
};

std::unique_ptr<Estimator> fit_estimator(const ModelSpec& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                         std::uint64_t seed);
std::unique_ptr<Estimator> load_estimator(const ModelSpec& spec, BinaryReader& in);

struct TrainingMetadata {
  std::uint64_t seed = 0;
  std::vector<double> fold_scores;
  std::vector<std::string> selected_features;
  std::optional<double> winsor_upper;
  std::string target;
  std::optional<grid::CcrcId> owner;
  std::size_t rows = 0;
};

// Immutable after construction. Inputs are z-scored internally with the
// statistics of the training rows (categorical columns pass through).
class TrainedModel {
 public:
  TrainedModel(ModelSpec spec, std::vector<std::string> manifest, std::vector<bool> categorical,
               Eigen::VectorXd mean, Eigen::VectorXd scale, std::shared_ptr<const Estimator> est,
               TrainingMetadata meta);

  const ModelSpec& spec() const noexcept { return spec_; }
  const std::vector<std::string>& manifest() const noexcept { return manifest_; }
  const TrainingMetadata& metadata() const noexcept { return meta_; }

  // Columns are matched by name; a missing manifest column throws InvalidInput.
  Eigen::VectorXd predict(const dataforge::Dataset& rows) const;
  // X must already be in manifest order.
  Eigen::VectorXd predict_matrix(const Eigen::MatrixXd& X) const;
  Eigen::MatrixXd align(const dataforge::Dataset& rows) const;

  void save(const std::filesystem::path& dir) const;
  static TrainedModel load(const std::filesystem::path& dir);

 private:
  ModelSpec spec_;
  std::vector<std::string> manifest_;
  std::vector<bool> categorical_;
  Eigen::VectorXd mean_, scale_;
  std::shared_ptr<const Estimator> est_;
  TrainingMetadata meta_;
};

// Fits on every row of ds using all of its columns.
TrainedModel fit_model(const ModelSpec& spec, const dataforge::Dataset& ds, std::uint64_t seed);

}  // namespace acdc::surrogate
