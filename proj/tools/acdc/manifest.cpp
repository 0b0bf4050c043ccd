#include "manifest.hpp"

#include <fstream>

#include "acdc/common/error.hpp"
#include "acdc/common/hash.hpp"

namespace acdc::cli {

namespace fs = std::filesystem;

RunManifest::RunManifest(std::string command, std::vector<std::string> args)
    : command_(std::move(command)), args_(std::move(args)) {}

void RunManifest::artifact(const fs::path& path) {
  const auto key = base_.empty() ? path.generic_string() : fs::proximate(path, base_).generic_string();
  artifacts_[key] = file_digest(path);
}

void RunManifest::artifacts_in(const fs::path& dir) {
  if (!fs::is_directory(dir)) return;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().filename() == "run_manifest.json") continue;
    artifact(entry.path());
  }
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json doc;
  doc["tool"] = "acdc";
  doc["command"] = command_;
  doc["args"] = args_;
  doc["config"] = config_;
  doc["seeds"] = nlohmann::json::object();
  for (const auto& [k, v] : seeds_) doc["seeds"][k] = v;
  doc["artifacts"] = nlohmann::json::object();
  for (const auto& [k, v] : artifacts_) doc["artifacts"][k] = {{"fnv1a64", v}};
  return doc;
}

void RunManifest::write(const fs::path& dir) const {
  fs::create_directories(dir);
  const auto path = dir / "run_manifest.json";
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json().dump(2) << '\n';
}

}  // namespace acdc::cli
