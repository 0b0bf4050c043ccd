#include "acdc/dataforge/dataset.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "acdc/common/csv.hpp"
#include "acdc/common/error.hpp"
#include "acdc/common/hash.hpp"

namespace acdc::dataforge {

using nlohmann::json;

std::string_view phase_name(SamplingPhase phase) noexcept {
  switch (phase) {
    case SamplingPhase::lhs: return "lhs";
    case SamplingPhase::entropy_refined: return "entropy-refined";
    case SamplingPhase::validation: return "validation";
  }
  return "?";
}

SamplingPhase parse_phase(std::string_view name) {
  for (auto p : {SamplingPhase::lhs, SamplingPhase::entropy_refined, SamplingPhase::validation})
    if (phase_name(p) == name) return p;
  throw InvalidInput("unknown sampling phase '" + std::string(name) + "'");
}

std::string_view role_name(DatasetRole role) noexcept {
  switch (role) {
    case DatasetRole::stability: return "D_Y";
    case DatasetRole::h2_f: return "D_H2_f";
    case DatasetRole::h2_vdc: return "D_H2_Vdc";
    case DatasetRole::k_f: return "D_K_f";
    case DatasetRole::k_vdc: return "D_K_Vdc";
  }
  return "?";
}

DatasetRole parse_dataset_role(std::string_view name) {
  for (auto r : {DatasetRole::stability, DatasetRole::h2_f, DatasetRole::h2_vdc, DatasetRole::k_f, DatasetRole::k_vdc})
    if (role_name(r) == name) return r;
  throw InvalidInput("unknown dataset role '" + std::string(name) + "'");
}

std::string_view target_name(DatasetRole role) noexcept { return role_name(role).substr(2); }

std::size_t Dataset::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i].name == name) return i;
  throw InvalidInput("dataset has no column '" + name + "'");
}

bool Dataset::has_column(const std::string& name) const {
  for (const auto& c : columns)
    if (c.name == name) return true;
  return false;
}

void Dataset::validate() const {
  std::set<std::string> seen;
  for (const auto& c : columns)
    if (!seen.insert(c.name).second) throw InvalidInput("duplicate column name " + c.name);
  if (static_cast<std::size_t>(X.cols()) != columns.size()) throw InvalidInput("feature matrix width mismatch");
  if (y.size() != X.rows()) throw InvalidInput("target length mismatch");
  if (static_cast<Eigen::Index>(provenance.size()) != X.rows()) throw InvalidInput("provenance length mismatch");
  const bool has_xc = std::any_of(columns.begin(), columns.end(),
                                  [](const auto& c) { return c.kind == powerflow::FeatureKind::categorical; });
  if (role == DatasetRole::stability && owner) throw InvalidInput("D_Y has no owning CCRC");
  if (role != DatasetRole::stability && has_xc) throw InvalidInput("indicator datasets carry no X_C columns");
  if (role != DatasetRole::stability && !owner) throw InvalidInput("indicator dataset needs an owning CCRC");
}

Dataset Dataset::subset(const std::vector<Eigen::Index>& rows) const {
  Dataset out = *this;
  out.X.resize(static_cast<Eigen::Index>(rows.size()), X.cols());
  out.y.resize(static_cast<Eigen::Index>(rows.size()));
  out.provenance.clear();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = rows[i];
    if (r < 0 || r >= X.rows()) throw InvalidInput("row index out of range");
    out.X.row(static_cast<Eigen::Index>(i)) = X.row(r);
    out.y(static_cast<Eigen::Index>(i)) = y(r);
    out.provenance.push_back(provenance[static_cast<std::size_t>(r)]);
  }
  return out;
}

Dataset Dataset::select_columns(const std::vector<std::size_t>& keep) const {
  Dataset out = *this;
  out.columns.clear();
  out.X.resize(X.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    if (keep[j] >= columns.size()) throw InvalidInput("column index out of range");
    out.columns.push_back(columns[keep[j]]);
    out.X.col(static_cast<Eigen::Index>(j)) = X.col(static_cast<Eigen::Index>(keep[j]));
  }
  if (scaler) {
    ScalerStats s;
    for (const auto& c : out.columns)
      for (std::size_t k = 0; k < scaler->names.size(); ++k)
        if (scaler->names[k] == c.name) {
          s.names.push_back(c.name);
          s.mean.push_back(scaler->mean[k]);
          s.scale.push_back(scaler->scale[k]);
          s.passthrough.push_back(scaler->passthrough[k]);
        }
    out.scaler = std::move(s);
  }
  return out;
}

std::uint64_t row_hash(const Dataset& ds, Eigen::Index row) {
  std::string bytes(sizeof(grid::CcrcId) + sizeof(double) * static_cast<std::size_t>(ds.cols()), '\0');
  const auto id = ds.provenance.at(static_cast<std::size_t>(row)).ccrc;
  std::memcpy(bytes.data(), &id, sizeof id);
  for (Eigen::Index j = 0; j < ds.cols(); ++j) {
    const double v = ds.X(row, j);
    std::memcpy(bytes.data() + sizeof id + sizeof(double) * static_cast<std::size_t>(j), &v, sizeof v);
  }
  return fnv1a64(bytes);
}

namespace {

json scaler_to_json(const ScalerStats& s) {
  json j;
  j["names"] = s.names;
  j["mean"] = s.mean;
  j["scale"] = s.scale;
  j["passthrough"] = s.passthrough;
  return j;
}

ScalerStats scaler_from_json(const json& j) {
  ScalerStats s;
  s.names = j.at("names").get<std::vector<std::string>>();
  s.mean = j.at("mean").get<std::vector<double>>();
  s.scale = j.at("scale").get<std::vector<double>>();
  s.passthrough = j.at("passthrough").get<std::vector<bool>>();
  if (s.mean.size() != s.names.size() || s.scale.size() != s.names.size() || s.passthrough.size() != s.names.size())
    throw InvalidInput("scaler statistics have inconsistent lengths");
  return s;
}

std::filesystem::path with_suffix(const std::filesystem::path& stem, const char* suffix) {
  return stem.parent_path() / (stem.filename().string() + suffix);
}

}  // namespace

void save_dataset(const Dataset& ds, const std::filesystem::path& stem) {
  ds.validate();
  CsvTable t;
  for (const auto& c : ds.columns) t.header.push_back(c.name);
  t.header.push_back(ds.target());
  t.header.insert(t.header.end(), {"_seed", "_ccrc", "_phase"});
  for (Eigen::Index i = 0; i < ds.rows(); ++i) {
    std::vector<std::string> row;
    row.reserve(t.header.size());
    for (Eigen::Index j = 0; j < ds.cols(); ++j) row.push_back(format_number(ds.X(i, j)));
    row.push_back(format_number(ds.y(i)));
    const auto& p = ds.provenance[static_cast<std::size_t>(i)];
    row.push_back(std::to_string(p.seed));
    row.push_back(std::to_string(p.ccrc));
    row.emplace_back(phase_name(p.phase));
    t.rows.push_back(std::move(row));
  }
  if (!stem.parent_path().empty()) std::filesystem::create_directories(stem.parent_path());
  write_csv(with_suffix(stem, ".csv"), t);

  json j;
  j["schema"] = 1;
  j["role"] = role_name(ds.role);
  j["owner"] = ds.owner ? json(*ds.owner) : json(nullptr);
  j["target"] = ds.target();
  j["rows"] = ds.rows();
  json cols = json::array();
  for (const auto& c : ds.columns)
    cols.push_back({{"name", c.name},
                    {"kind", powerflow::kind_name(c.kind)},
                    {"node", c.node},
                    {"element", c.element},
                    {"quantity", c.quantity},
                    {"group", powerflow::group_name(c.group)}});
  j["columns"] = cols;
  j["provenance_columns"] = {"_seed", "_ccrc", "_phase"};
  j["scaler"] = ds.scaler ? scaler_to_json(*ds.scaler) : json(nullptr);
  j["winsor_upper"] = ds.winsor_upper ? json(*ds.winsor_upper) : json(nullptr);
  std::ofstream out(with_suffix(stem, ".schema.json"));
  if (!out) throw IoError("cannot write dataset schema for " + stem.string());
  out << j.dump(2) << '\n';
}

Dataset load_dataset(const std::filesystem::path& stem) {
  const auto schema_path = with_suffix(stem, ".schema.json");
  std::ifstream in(schema_path);
  if (!in) throw IoError("cannot open " + schema_path.string());
  Dataset ds;
  try {
    const json j = json::parse(in);
    if (j.at("schema").get<int>() != 1) throw InvalidInput("unsupported dataset schema");
    ds.role = parse_dataset_role(j.at("role").get<std::string>());
    if (!j.at("owner").is_null()) ds.owner = j.at("owner").get<grid::CcrcId>();
    for (const auto& c : j.at("columns"))
      ds.columns.push_back({c.at("name").get<std::string>(), powerflow::parse_kind(c.at("kind").get<std::string>()),
                            c.at("node").get<std::string>(), c.at("element").get<std::string>(),
                            c.at("quantity").get<std::string>(),
                            powerflow::parse_group(c.at("group").get<std::string>())});
    if (!j.at("scaler").is_null()) ds.scaler = scaler_from_json(j.at("scaler"));
    if (!j.at("winsor_upper").is_null()) ds.winsor_upper = j.at("winsor_upper").get<double>();
  } catch (const json::exception& e) {
    throw InvalidInput("malformed dataset schema " + schema_path.string() + ": " + e.what());
  }

  const CsvTable t = read_csv(with_suffix(stem, ".csv"));
  const std::size_t nc = ds.columns.size();
  if (t.header.size() != nc + 4) throw InvalidInput("dataset CSV width does not match its schema");
  for (std::size_t j = 0; j < nc; ++j)
    if (t.header[j] != ds.columns[j].name) throw InvalidInput("dataset CSV header does not match its schema");
  if (t.header[nc] != ds.target()) throw InvalidInput("dataset CSV target column mismatch");
  const auto n = static_cast<Eigen::Index>(t.rows.size());
  ds.X.resize(n, static_cast<Eigen::Index>(nc));
  ds.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(i);
    for (std::size_t j = 0; j < nc; ++j) ds.X(i, static_cast<Eigen::Index>(j)) = t.number(r, j);
    ds.y(i) = t.number(r, nc);
    RowProvenance p;
    try {
      p.seed = std::stoull(t.rows[r][nc + 1]);
      p.ccrc = static_cast<grid::CcrcId>(std::stoul(t.rows[r][nc + 2]));
    } catch (const std::exception&) {
      throw InvalidInput("bad provenance in dataset row " + std::to_string(r));
    }
    p.phase = parse_phase(t.rows[r][nc + 3]);
    ds.provenance.push_back(p);
  }
  ds.validate();
  return ds;
}

}  // namespace acdc::dataforge
