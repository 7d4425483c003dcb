#pragma once

// Flat key=value experiment configuration: parsing ('#' comments, TOML-style
// assignments), documented defaults, strict unknown-key rejection, override
// application, and the canonical resolved form used for content-addressed
// output directories and manifests. A previously written manifest JSON is
// accepted wherever a config file is (sniffed by a leading '{'), which makes
// reruns byte-reproducible from the manifest alone.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "drfed/simulator.hpp"

namespace drfed {

/// Error carrying the offending key, so the CLI can exit 2 and name it.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error("config key '" + key + "': " + message),
        key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Experiment config plus run-harness settings resolved together.
struct RunSettings {
  ExperimentConfig experiment;
  int runs = 50;
};

/// Key -> raw string value. Later assignments win within one source.
using KeyValues = std::map<std::string, std::string>;

/// Parses flat `key = value` text ('#' starts a comment, blank lines
/// ignored). Throws ConfigError on malformed lines.
KeyValues parse_config_text(const std::string& text);

/// Reads a config file; if the content starts with '{' it is parsed as a run
/// manifest JSON and the embedded resolved config is extracted instead.
KeyValues load_config_file(const std::string& path);

/// Applies --set style overrides (KEY=VALUE strings) on top.
void apply_overrides(KeyValues& kv, const std::vector<std::string>& sets);

/// Materializes defaults, converts and validates every key. Unknown keys,
/// missing required keys (M, K, T), bad types, and range violations all
/// throw ConfigError naming the key.
RunSettings resolve_config(const KeyValues& kv);

/// The fully-resolved flat form (every key present, canonical value
/// formatting, sorted keys) — what manifests echo and the content hash runs
/// over.
std::map<std::string, std::string> canonical_config(const RunSettings& settings);

/// FNV-1a-64 hex digest of the canonical form, used as the output directory
/// name so identical configs land in identical paths.
std::string config_hash(const RunSettings& settings);

}  // namespace drfed
