#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace acdc::cli {

// run_manifest.json: command line, resolved configuration, seeds and the
// FNV-1a digest of every file the run wrote (sorted by relative path).
class RunManifest {
 public:
  RunManifest(std::string command, std::vector<std::string> args);

  // Artifact keys are relative to this directory (where the manifest goes).
  void set_base(const std::filesystem::path& dir) { base_ = dir; }
  const std::filesystem::path& base() const noexcept { return base_; }

  void set(const std::string& key, nlohmann::json value) { config_[key] = std::move(value); }
  void seed(const std::string& name, std::uint64_t value) { seeds_[name] = value; }
  void artifact(const std::filesystem::path& path);
  // Every regular file below dir except the manifest itself.
  void artifacts_in(const std::filesystem::path& dir);

  nlohmann::json to_json() const;
  void write(const std::filesystem::path& dir) const;

 private:
  std::string command_;
  std::vector<std::string> args_;
  nlohmann::json config_ = nlohmann::json::object();
  std::map<std::string, std::uint64_t> seeds_;
  std::map<std::string, std::string> artifacts_;
  std::filesystem::path base_;
};

}  // namespace acdc::cli
