#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "culturefms/dissemination.hpp"
#include "culturefms/lattice.hpp"
#include "culturefms/routing.hpp"

namespace culturefms {

enum class Placement { Center, Random, Explicit };

std::string_view to_string(Placement p) noexcept;

/// Full experiment parameterization. Defaults reproduce the 10x10 grid with
/// three features, three traits and threshold 0.5.
struct SimConfig {
  int width = 10;
  int height = 10;
  int features = 3;
  int traits = 3;
  DisseminationRule rule;
  Topology topology;
  std::uint64_t seed = 1;
  std::size_t max_iterations = 50000;
  std::size_t sample_every = 100;
  std::vector<double> snapshot_triggers{0.5, 0.25, 0.10};
  int products = 5;
  Placement placement = Placement::Center;
  std::vector<Position> positions;   // Explicit placement only
  std::vector<TaskSequence> tasks;   // empty: drawn at random
  DistanceMetric distance = DistanceMetric::Manhattan;
  std::size_t replications = 1;
  std::string output = "out";

  RunOptions run_options() const;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

/// Source line of each key that came from a file; used in error messages.
using KeyLines = std::map<std::string, std::size_t, std::less<>>;

/// Recognized keys, in serialization order.
const std::vector<std::string>& config_keys();

/// Parses and stores one `key: value` setting. Performs per-key checks
/// (type, range) and throws ConfigError naming the key and line.
void apply_setting(SimConfig& config, std::string_view key, std::string_view value,
                   std::size_t line = 0);

/// Cross-key checks (explicit product lists vs dimensions, trigger order).
void validate(const SimConfig& config, const KeyLines& lines = {});

/// Reads `key: value` lines into `config` without the final validate().
/// Blank lines and `#` comments are skipped; unknown or repeated keys are errors.
KeyLines merge_config_text(SimConfig& config, std::string_view text);

/// Parses text on top of the defaults and validates.
SimConfig load_config_text(std::string_view text);
SimConfig load_config(const std::filesystem::path& path);

/// Text that load_config_text turns back into an equal SimConfig.
std::string serialize_config(const SimConfig& config);

/// Serialized value of one key.
std::string config_value(const SimConfig& config, std::string_view key);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace culturefms
