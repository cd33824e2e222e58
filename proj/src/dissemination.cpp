#include "culturefms/dissemination.hpp"

#include <algorithm>
#include <string>

#include "culturefms/errors.hpp"

namespace culturefms {

std::string_view to_string(RuleMode m) noexcept {
  return m == RuleMode::Classic ? "classic" : "extended";
}

std::string_view to_string(ProbabilityMode m) noexcept {
  return m == ProbabilityMode::SimilarityCoupled ? "similarity" : "constant";
}

void DisseminationRule::validate() const {
  if (mode == RuleMode::Extended && !(threshold > 0.0 && threshold <= 1.0)) {
    throw ConfigError("threshold", 0, "must be in (0, 1], got " + std::to_string(threshold));
  }
  if (probability == ProbabilityMode::Constant &&
      !(constant_probability > 0.0 && constant_probability <= 1.0)) {
    throw ConfigError("constant_probability", 0,
                      "must be in (0, 1], got " + std::to_string(constant_probability));
  }
}

double DisseminationRule::copy_probability(double similarity) const noexcept {
  return probability == ProbabilityMode::SimilarityCoupled ? similarity : constant_probability;
}

bool DisseminationRule::pair_can_change(std::size_t matching, std::size_t features) const noexcept {
  if (matching == features) return false;
  const double s = static_cast<double>(matching) / static_cast<double>(features);
  if (mode == RuleMode::Extended && !(s < threshold)) return false;
  return copy_probability(s) > 0.0;
}

StepOutcome interact(Lattice& lattice, Position active, Position partner,
                     const DisseminationRule& rule, double probability_draw, RandomStream& rng) {
  const std::size_t a = lattice.index_of(active);
  const std::size_t b = lattice.index_of(partner);
  const auto features = static_cast<std::size_t>(lattice.features());
  const std::size_t matching = matching_features(lattice[a], lattice[b]);

  StepOutcome out{active, partner, static_cast<double>(matching) / static_cast<double>(features),
                  false, std::nullopt, std::nullopt};
  if (matching == features) return out;
  if (rule.mode == RuleMode::Extended && !(out.similarity_before < rule.threshold)) return out;
  if (!(probability_draw < rule.copy_probability(out.similarity_before))) return out;

  const auto pick = rng.uniform_int(features - matching);
  std::size_t seen = 0;
  for (std::size_t f = 0; f < features; ++f) {
    if (lattice[a][f] == lattice[b][f]) continue;
    if (seen++ == pick) {
      out.previous_trait = lattice[a][f];
      lattice.set_trait(a, static_cast<int>(f), lattice[b][f]);
      out.changed = true;
      out.feature_copied = static_cast<int>(f);
      break;
    }
  }
  return out;
}

StepOutcome step(Lattice& lattice, const DisseminationRule& rule, RandomStream& rng) {
  const std::size_t a = rng.uniform_int(lattice.size());
  const Position active = lattice.position_of(a);
  const auto around = lattice.neighbor_indices(a);
  if (around.empty()) return {active, active, 1.0, false, std::nullopt, std::nullopt};
  const Position partner = lattice.position_of(around[rng.uniform_int(around.size())]);
  const double u = rng.uniform_real();
  return interact(lattice, active, partner, rule, u, rng);
}

StepOutcome classic_step(Lattice& lattice, const DisseminationRule& rule, RandomStream& rng) {
  if (rule.mode != RuleMode::Classic) throw ContractError("classic_step: rule is not Classic");
  return step(lattice, rule, rng);
}

StepOutcome extended_step(Lattice& lattice, const DisseminationRule& rule, RandomStream& rng) {
  if (rule.mode != RuleMode::Extended) throw ContractError("extended_step: rule is not Extended");
  return step(lattice, rule, rng);
}

bool is_absorbing(const Lattice& lattice, const DisseminationRule& rule) {
  const auto features = static_cast<std::size_t>(lattice.features());
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    for (std::size_t j : lattice.neighbor_indices(i)) {
      if (j < i) continue;
      if (rule.pair_can_change(matching_features(lattice[i], lattice[j]), features)) return false;
    }
  }
  return true;
}

Trajectory run(Lattice lattice, const DisseminationRule& rule, const RunOptions& options,
               RandomStream& rng) {
  rule.validate();
  if (options.max_iterations < 1) throw ContractError("run: max_iterations must be >= 1");
  if (options.sample_every < 1) throw ContractError("run: sample_every must be >= 1");
  if (options.absorb_check_every < 1) throw ContractError("run: absorb_check_every must be >= 1");
  for (std::size_t k = 1; k < options.snapshot_triggers.size(); ++k) {
    if (!(options.snapshot_triggers[k] < options.snapshot_triggers[k - 1])) {
      throw ContractError("run: snapshot triggers must be strictly decreasing");
    }
  }

  Trajectory traj{rule, options, rng.seed(), {}, {}, lattice, 0, false};
  DiversityTracker tracker(lattice);
  std::vector<bool> fired(options.snapshot_triggers.size(), false);

  auto sample = [&](std::size_t iteration) {
    MetricsSample s = measure(lattice, iteration);
    s.diversity_index = tracker.value();
    traj.samples.push_back(s);
  };

  sample(0);
  if (is_absorbing(lattice, rule)) {
    traj.absorbed = true;
    traj.final_lattice = std::move(lattice);
    return traj;
  }

  std::size_t it = 1;
  for (; it <= options.max_iterations; ++it) {
    const StepOutcome outcome = step(lattice, rule, rng);
    if (outcome.changed) {
      const double before = tracker.value();
      tracker.on_trait_changed(lattice, lattice.index_of(outcome.active), *outcome.feature_copied,
                               *outcome.previous_trait);
      const double after = tracker.value();
      for (std::size_t k = 0; k < fired.size(); ++k) {
        const double trigger = options.snapshot_triggers[k];
        if (!fired[k] && before > trigger && after <= trigger) {
          fired[k] = true;
          traj.snapshots.push_back({trigger, it, after, lattice});
        }
      }
    }
    if (it % options.sample_every == 0) sample(it);
    if (it % options.absorb_check_every == 0 || it == options.max_iterations) {
      if (is_absorbing(lattice, rule)) {
        traj.absorbed = true;
        break;
      }
    }
  }
  traj.iterations_run = std::min(it, options.max_iterations);
  if (traj.samples.back().iteration != traj.iterations_run) sample(traj.iterations_run);
  traj.final_lattice = std::move(lattice);
  return traj;
}

}  // namespace culturefms
