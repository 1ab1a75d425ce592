#include "psgd/harness/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <memory>

#include "psgd/rng.hpp"

namespace psgd::harness {

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string config_hash(const ExperimentConfig& cfg) {
  // nlohmann::json objects keep keys sorted, so dump() is canonical.
  return sha256_hex(cfg.to_json().dump());
}

nlohmann::json make_manifest(const ExperimentConfig& cfg) {
  return {{"name", cfg.name},
          {"kind", to_string(cfg.kind)},
          {"config_hash", config_hash(cfg)},
          {"seeds", cfg.seed_list()},
          {"library_version", kLibraryVersion},
          {"rng_algorithm", RngStream::kAlgorithm}};
}

nlohmann::json read_manifest(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw std::runtime_error("no manifest.json in " + dir.string());
  return nlohmann::json::parse(in);
}

void write_manifest(const std::filesystem::path& dir, const ExperimentConfig& cfg) {
  const auto manifest = make_manifest(cfg);
  const auto path = dir / "manifest.json";
  if (std::filesystem::exists(path)) {
    const auto existing = read_manifest(dir);
    if (existing.value("config_hash", std::string()) != manifest.at("config_hash")) {
      throw ManifestConflict("refusing to overwrite " + path.string() +
                             ": it was written for a different config");
    }
    return;
  }
  std::filesystem::create_directories(dir);
  std::ofstream out(path);
  out << manifest.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace psgd::harness
