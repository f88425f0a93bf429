#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>
#include <vector>

namespace patent_rent::cli {

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

/// Collects the files written by one command and emits `manifest.json` last.
/// Outputs never leave `dir`.
class RunManifest {
 public:
  RunManifest(std::filesystem::path dir, std::string command);

  /// Canonical arguments that reproduce the run when given a fresh --out.
  void set_args(std::vector<std::string> args) { args_ = std::move(args); }

  void add_input(const std::string& role, const std::filesystem::path& path, std::string_view bytes);
  void set_config(nlohmann::json config) { config_ = std::move(config); }
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void write_output(const std::string& name, std::string_view bytes);

  /// Writes manifest.json; call once after every output.
  void finish();

 private:
  std::filesystem::path dir_;
  std::string command_;
  std::vector<std::string> args_;
  std::map<std::string, nlohmann::json> inputs_;
  std::map<std::string, std::string> outputs_;
  nlohmann::json config_ = nlohmann::json::object();
  std::optional<std::uint64_t> seed_;
  std::string started_at_;
};

inline constexpr std::string_view kManifestName = "manifest.json";

}  // namespace patent_rent::cli
