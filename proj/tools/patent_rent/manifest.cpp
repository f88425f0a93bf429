#include "manifest.hpp"

#include <chrono>
#include <fmt/format.h>
#include <fstream>
#include <openssl/evp.h>
#include <sstream>

#include "patent_rent/errors.hpp"
#include "patent_rent/serialization.hpp"

namespace patent_rent::cli {

namespace fs = std::filesystem;

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot read '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunManifest::RunManifest(fs::path dir, std::string command)
    : dir_(std::move(dir)), command_(std::move(command)), started_at_(utc_now()) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec || !fs::is_directory(dir_))
    throw InputError(fmt::format("cannot create output directory '{}'", dir_.string()));
}

void RunManifest::add_input(const std::string& role, const fs::path& path, std::string_view bytes) {
  inputs_[role] = {{"path", fs::absolute(path).lexically_normal().string()}, {"sha256", sha256_hex(bytes)}};
}

void RunManifest::write_output(const std::string& name, std::string_view bytes) {
  const fs::path target = dir_ / name;
  std::ofstream out(target, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(fmt::format("cannot write '{}'", target.string()));
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError(fmt::format("cannot write '{}'", target.string()));
  outputs_[name] = sha256_hex(bytes);
}

void RunManifest::finish() {
  nlohmann::json inputs = nlohmann::json::object();
  for (const auto& [role, entry] : inputs_) inputs[role] = entry;
  nlohmann::json outputs = nlohmann::json::object();
  for (const auto& [name, digest] : outputs_) outputs[name] = digest;
  nlohmann::json j{{"command", command_},
                   {"args", args_},
                   {"inputs", inputs},
                   {"outputs", outputs},
                   {"config", config_},
                   {"tool", "patent-rent"},
                   {"version", PATENT_RENT_VERSION},
                   {"started_at", started_at_},
                   {"finished_at", utc_now()}};
  j["seed"] = seed_ ? nlohmann::json(*seed_) : nlohmann::json(nullptr);
  const std::string text = dump(j);
  std::ofstream out(dir_ / std::string(kManifestName), std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw InputError(fmt::format("cannot write manifest in '{}'", dir_.string()));
}

}  // namespace patent_rent::cli
