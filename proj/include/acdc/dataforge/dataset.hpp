#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "acdc/grid/ccrc.hpp"
#include "acdc/powerflow/features.hpp"

namespace acdc::dataforge {

enum class SamplingPhase { lhs, entropy_refined, validation };
enum class DatasetRole { stability, h2_f, h2_vdc, k_f, k_vdc };

std::string_view phase_name(SamplingPhase phase) noexcept;
SamplingPhase parse_phase(std::string_view name);
std::string_view role_name(DatasetRole role) noexcept;  // D_Y, D_H2_f, ...
DatasetRole parse_dataset_role(std::string_view name);
std::string_view target_name(DatasetRole role) noexcept;  // Y, H2_f, ...

inline constexpr DatasetRole kIndicatorRoles[] = {DatasetRole::h2_f, DatasetRole::h2_vdc, DatasetRole::k_f,
                                                  DatasetRole::k_vdc};

struct RowProvenance {
  std::uint64_t seed = 0;
  grid::CcrcId ccrc = 0;
  SamplingPhase phase = SamplingPhase::lhs;
};

// z-score statistics; pass-through columns keep mean 0 / scale 1.
struct ScalerStats {
  std::vector<std::string> names;
  std::vector<double> mean, scale;
  std::vector<bool> passthrough;
};

struct Dataset {
  DatasetRole role = DatasetRole::stability;
  std::optional<grid::CcrcId> owner;  // indicator datasets only
  std::vector<powerflow::ColumnInfo> columns;
  Eigen::MatrixXd X;  // rows x columns
  Eigen::VectorXd y;
  std::vector<RowProvenance> provenance;
  std::optional<ScalerStats> scaler;
  std::optional<double> winsor_upper;

  Eigen::Index rows() const noexcept { return X.rows(); }
  Eigen::Index cols() const noexcept { return X.cols(); }
  std::string target() const { return std::string(target_name(role)); }
  std::size_t column(const std::string& name) const;  // throws InvalidInput
  bool has_column(const std::string& name) const;
  // Throws InvalidInput on duplicate names, width mismatches, or X_C columns
  // in an indicator dataset.
  void validate() const;
  Dataset subset(const std::vector<Eigen::Index>& rows) const;
  Dataset select_columns(const std::vector<std::size_t>& keep) const;
};

// Row identity: FNV-1a over the CCRC id and the feature bytes.
std::uint64_t row_hash(const Dataset& ds, Eigen::Index row);

// <stem>.csv (features, target, provenance columns prefixed '_') plus
// <stem>.schema.json (column metadata, role, owner, scaler, winsor bound).
void save_dataset(const Dataset& ds, const std::filesystem::path& stem);
Dataset load_dataset(const std::filesystem::path& stem);

}  // namespace acdc::dataforge
