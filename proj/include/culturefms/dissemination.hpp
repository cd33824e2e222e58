#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "culturefms/lattice.hpp"
#include "culturefms/metrics.hpp"
#include "culturefms/rng.hpp"

namespace culturefms {

enum class RuleMode { Classic, Extended };
enum class ProbabilityMode { SimilarityCoupled, Constant };

std::string_view to_string(RuleMode m) noexcept;
std::string_view to_string(ProbabilityMode m) noexcept;

/// Interaction rule. Classic copies one differing trait from a neighbor with
/// probability p whenever the pair is not identical. Extended additionally
/// requires the pair's similarity to be strictly below `threshold`.
struct DisseminationRule {
  RuleMode mode = RuleMode::Classic;
  double threshold = 0.5;  // Extended only
  ProbabilityMode probability = ProbabilityMode::SimilarityCoupled;
  double constant_probability = 1.0;  // Constant only

  static DisseminationRule classic() { return {}; }
  static DisseminationRule extended(double threshold = 0.5) {
    return {RuleMode::Extended, threshold, ProbabilityMode::SimilarityCoupled, 1.0};
  }

  /// Throws ConfigError when threshold or constant_probability is outside (0, 1].
  void validate() const;

  /// p for a pair with the given similarity.
  double copy_probability(double similarity) const noexcept;

  /// True when a pair with `matching` of `features` equal traits may copy at all
  /// (not identical, passes the threshold gate, and p > 0).
  bool pair_can_change(std::size_t matching, std::size_t features) const noexcept;

  friend bool operator==(const DisseminationRule&, const DisseminationRule&) = default;
};

struct StepOutcome {
  Position active;
  Position partner;
  double similarity_before = 0.0;
  bool changed = false;
  std::optional<int> feature_copied;
  /// Trait the active cell held at feature_copied before the copy.
  std::optional<int> previous_trait;
};

/// One interaction between a chosen active cell and partner, given the
/// probability draw u in [0, 1). A copy happens when the pair is not
/// identical, the rule's gate is open, and u < p. The differing feature to
/// copy is then drawn uniformly from rng.
StepOutcome interact(Lattice& lattice, Position active, Position partner,
                     const DisseminationRule& rule, double probability_draw, RandomStream& rng);

/// One interaction attempt. Draw order: active cell, neighbor, probability
/// draw (always consumed, even when nothing can change), then the feature
/// pick (only when a copy happens). A cell without neighbors consumes only
/// the cell draw and reports partner == active.
StepOutcome step(Lattice& lattice, const DisseminationRule& rule, RandomStream& rng);

/// step() restricted to rule.mode == Classic (ContractError otherwise).
StepOutcome classic_step(Lattice& lattice, const DisseminationRule& rule, RandomStream& rng);

/// step() restricted to rule.mode == Extended (ContractError otherwise).
StepOutcome extended_step(Lattice& lattice, const DisseminationRule& rule, RandomStream& rng);

/// True when no neighbor pair can ever change under `rule`.
bool is_absorbing(const Lattice& lattice, const DisseminationRule& rule);

struct RunOptions {
  std::size_t max_iterations = 50000;
  std::size_t sample_every = 100;
  /// Strictly decreasing diversity levels at which to capture a snapshot.
  std::vector<double> snapshot_triggers{0.5, 0.25, 0.10};
  std::size_t absorb_check_every = 1000;

  friend bool operator==(const RunOptions&, const RunOptions&) = default;
};

/// Lattice captured the first time diversity fell from above `trigger` to at
/// or below it. Later re-crossings are ignored.
struct Snapshot {
  double trigger = 0.0;
  std::size_t iteration = 0;
  double diversity_index = 0.0;
  Lattice lattice;
};

struct Trajectory {
  DisseminationRule rule;
  RunOptions options;
  std::uint64_t seed = 0;
  std::vector<MetricsSample> samples;
  std::vector<Snapshot> snapshots;
  Lattice final_lattice;
  std::size_t iterations_run = 0;
  bool absorbed = false;
};

/// Runs up to options.max_iterations interaction attempts.
///
/// Samples are taken at iteration 0, every sample_every iterations, and at
/// the last iteration run. Absorption is checked at iteration 0, every
/// absorb_check_every iterations and at max_iterations; the run stops at the
/// first check that finds an absorbing state.
Trajectory run(Lattice lattice, const DisseminationRule& rule, const RunOptions& options,
               RandomStream& rng);

}  // namespace culturefms
