#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <vector>

#include "acdc/dataforge/dataset.hpp"
#include "acdc/dataforge/exact.hpp"
#include "acdc/grid/ccrc.hpp"
#include "acdc/grid/operating_point.hpp"
#include "acdc/grid/topology.hpp"
#include "acdc/surrogate/model.hpp"

namespace acdc::scheduler {

// H2_f, H2_Vdc, K_f, K_Vdc
inline constexpr std::size_t kCriteria = 4;
using Indicators = std::array<double, kCriteria>;

std::uint64_t op_hash(const grid::OperatingPoint& op) noexcept;

// Stability label and indicators for one (OP, CCRC). Empty optionals mean the
// source has no answer (diverged flow, missing model, unstable system).
class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual std::optional<bool> stable(const grid::OperatingPoint& op, const grid::Ccrc& ccrc) const = 0;
  virtual std::optional<Indicators> indicators(const grid::OperatingPoint& op, const grid::Ccrc& ccrc) const = 0;
};

// Full exact chain, memoized per (OP, CCRC). Safe to share across threads.
class ExactOracle final : public Oracle {
 public:
  explicit ExactOracle(const grid::GridTopology& topology) : topology_(topology) {}

  std::optional<bool> stable(const grid::OperatingPoint& op, const grid::Ccrc& ccrc) const override;
  std::optional<Indicators> indicators(const grid::OperatingPoint& op, const grid::Ccrc& ccrc) const override;
  const dataforge::ExactEvaluation& evaluate(const grid::OperatingPoint& op, const grid::Ccrc& ccrc) const;
  std::size_t evaluations() const;

 private:
  const grid::GridTopology& topology_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<std::uint64_t, grid::CcrcId>, std::shared_ptr<const dataforge::ExactEvaluation>> cache_;
};

// Psi-hat over the reduced set plus one Gamma-hat per (CCRC, indicator).
struct SurrogateModels {
  std::optional<surrogate::TrainedModel> classifier;
  std::map<grid::CcrcId, std::array<std::optional<surrogate::TrainedModel>, kCriteria>> regressors;

  // <dir>/classifier/, <dir>/<ccrc>_<target>/ and <dir>/models.json
  void save(const std::filesystem::path& dir) const;
  static SurrogateModels load(const std::filesystem::path& dir);
};

// Power flow only, then the trained models. Feature rows are memoized per
// (OP, CCRC).
class SurrogateOracle final : public Oracle {
 public:
  SurrogateOracle(const grid::GridTopology& topology, const SurrogateModels& models)
      : topology_(topology), models_(models) {}

  std::optional<bool> stable(const grid::OperatingPoint& op, const grid::Ccrc& ccrc) const override;
  std::optional<Indicators> indicators(const grid::OperatingPoint& op, const grid::Ccrc& ccrc) const override;

 private:
  std::shared_ptr<const dataforge::Dataset> features(const grid::OperatingPoint& op, const grid::Ccrc& ccrc) const;

  const grid::GridTopology& topology_;
  const SurrogateModels& models_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<std::uint64_t, grid::CcrcId>, std::shared_ptr<const dataforge::Dataset>> cache_;
};

struct TrainingOptions {
  std::size_t classifier_budget = 360;  // entropy-guided OPs per CCRC
  std::size_t regressor_budget = 400;
  std::size_t folds = 5;
  double winsor_percentile = 0.95;
};

struct TrainingReport {
  double classifier_beta = 1.0;
  double classifier_cv = 0.0;
  std::size_t classifier_rows = 0;
  std::string classifier_model;
  // per CCRC and indicator: chosen family label and mean CV R^2
  std::map<grid::CcrcId, std::array<std::pair<std::string, double>, kCriteria>> regressors;
};

// Raw training data: pooled entropy-guided D_Y over the reduced set and the
// four LHS indicator datasets per CCRC (CCRCs with too few stable rows are
// skipped with a warning).
struct SurrogateCorpus {
  dataforge::Dataset stability;
  std::map<grid::CcrcId, std::vector<dataforge::Dataset>> indicators;

  // <dir>/D_Y.*, <dir>/<ccrc>_D_<target>.* and <dir>/corpus.json
  void save(const std::filesystem::path& dir) const;
  static SurrogateCorpus load(const std::filesystem::path& dir);
};

SurrogateCorpus generate_corpus(const grid::GridTopology& topology, const std::vector<grid::Ccrc>& reduced,
                                const TrainingOptions& options, std::uint64_t seed);

// Features are engineered and cleaned per dataset. Classifier: gradient
// boosting vs MLP by k-fold F_beta. Regressors: the same two families per
// dataset by k-fold R^2, then trained on winsorized targets.
SurrogateModels fit_surrogates(const SurrogateCorpus& corpus, const TrainingOptions& options, std::uint64_t seed,
                               TrainingReport* report = nullptr);

SurrogateModels train_surrogates(const grid::GridTopology& topology, const std::vector<grid::Ccrc>& reduced,
                                 const TrainingOptions& options, std::uint64_t seed,
                                 TrainingReport* report = nullptr);

}  // namespace acdc::scheduler
