#ifndef PSGD_HARNESS_MANIFEST_HPP
#define PSGD_HARNESS_MANIFEST_HPP

#include <nlohmann/json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "psgd/harness/config.hpp"

namespace psgd::harness {

inline constexpr std::string_view kLibraryVersion = "0.1.0";

/// Raised when an output directory already holds a manifest for a different config.
class ManifestConflict : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string sha256_hex(std::string_view data);

/// Hash of the canonical (sorted-key, compact) JSON form of the config.
std::string config_hash(const ExperimentConfig& cfg);

nlohmann::json make_manifest(const ExperimentConfig& cfg);

/// Writes dir/manifest.json. An existing manifest with the same hash is left as
/// is; one with a different hash raises ManifestConflict.
void write_manifest(const std::filesystem::path& dir, const ExperimentConfig& cfg);

nlohmann::json read_manifest(const std::filesystem::path& dir);

}  // namespace psgd::harness

#endif
