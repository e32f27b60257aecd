#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vortexlab/empirical_measure.hpp"
#include "vortexlab/particle_system.hpp"
#include "vortexlab/pde_reference.hpp"

namespace vlab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingKeyError : public ConfigError {
 public:
  explicit MissingKeyError(const std::string& key)
      : ConfigError("missing required config key: " + key), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Parsed key = value text with [section] headers. Keys are stored as
/// "section.key"; values are trimmed and stripped of surrounding quotes.
struct ConfigText {
  std::string raw;
  std::map<std::string, std::string> entries;

  static ConfigText parse(const std::string& text);
  static ConfigText load(const std::string& path);
};

std::uint64_t fnv1a64(std::string_view bytes);
/// Sorted "key=value" lines.
std::string canonical_text(const std::map<std::string, std::string>& entries);
/// 16 lowercase hex digits of fnv1a64(canonical_text(entries)).
std::string fingerprint(const std::map<std::string, std::string>& entries);

/// Fully resolved configuration for every subcommand.
struct HarnessConfig {
  ConfigText source;
  std::map<std::string, std::string> resolved;  // every known key, defaults filled in
  SimConfig sim;
  PdeConfig pde;
  bool auto_speed_bound = true;  // model.M = auto
  std::vector<int> n_list;
  int seed_count = 10;
  std::vector<NormSpec> norms;
  std::vector<std::uint64_t> fail_seeds;
  bool dump_particles = false;
  int pde_grid = 128;

  std::string fingerprint() const;
  /// Fingerprint over the keys that determine the reference solution only.
  std::string pde_fingerprint() const;
  /// seed, seed + 1, ..., seed + seed_count - 1.
  std::vector<std::uint64_t> seeds() const;
};

/// Validates keys, fills defaults and builds the typed configs. A seed
/// override replaces particles.seed before fingerprinting.
HarnessConfig resolve_config(const ConfigText& text,
                             std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace vlab
