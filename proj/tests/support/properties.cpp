#include "properties.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "culturefms/config.hpp"
#include "culturefms/dissemination.hpp"
#include "culturefms/lattice_io.hpp"
#include "culturefms/metrics.hpp"
#include "culturefms/routing.hpp"
#include "oracles.hpp"

using namespace culturefms;

namespace props {

namespace {

// Seeds for the generators are fixed so failures reproduce.
constexpr std::uint64_t kGenSeed = 20240917;

const std::string kSkip = "<skip>";

int pick(RandomStream& g, int lo, int hi) {
  return lo + static_cast<int>(g.uniform_int(static_cast<std::uint64_t>(hi - lo + 1)));
}

Topology any_topology(RandomStream& g) {
  return {g.uniform_int(2) ? Neighborhood::Moore8 : Neighborhood::VonNeumann4,
          g.uniform_int(2) ? Boundary::Torus : Boundary::Bounded};
}

Lattice any_lattice(RandomStream& g, int max_side = 8, int max_f = 4, int max_t = 4) {
  return random_lattice(pick(g, 1, max_side), pick(g, 1, max_side), pick(g, 1, max_f),
                        pick(g, 1, max_t), g, any_topology(g));
}

DisseminationRule any_rule(RandomStream& g) {
  DisseminationRule rule;
  rule.mode = g.uniform_int(2) ? RuleMode::Extended : RuleMode::Classic;
  rule.threshold = 0.05 + 0.95 * g.uniform_real();
  rule.probability = g.uniform_int(2) ? ProbabilityMode::Constant : ProbabilityMode::SimilarityCoupled;
  rule.constant_probability = 0.05 + 0.95 * g.uniform_real();
  return rule;
}

std::string describe(const Lattice& l) {
  std::ostringstream out;
  out << to_string(l.topology().neighborhood) << '/' << to_string(l.topology().boundary) << '\n'
      << format_lattice(l);
  return out.str();
}

template <typename Body>
Result check(std::string name, std::size_t cases, Body body) {
  Result r{std::move(name), cases, 0, true, {}};
  RandomStream g(kGenSeed ^ std::hash<std::string>{}(r.name));
  for (std::size_t i = 0; i < cases && r.ok; ++i) {
    std::string why = body(g);
    if (why == kSkip) {
      ++r.skipped;
    } else if (!why.empty()) {
      r.ok = false;
      r.failure = "case " + std::to_string(i) + ": " + why;
    }
  }
  return r;
}

Result similarity_laws(std::size_t n) {
  return check("similarity symmetric, reflexive, in {k/F}", n, [](RandomStream& g) -> std::string {
    const int f = pick(g, 1, 6), t = pick(g, 1, 4);
    std::vector<int> a(f), b(f);
    for (auto& x : a) x = pick(g, 0, t - 1);
    for (auto& x : b) x = pick(g, 0, t - 1);
    const CultureVector va(a), vb(b);
    const double s = similarity(va, vb);
    if (s != similarity(vb, va)) return "not symmetric";
    if (similarity(va, va) != 1.0) return "not reflexive";
    const double k = s * f;
    if (s < 0.0 || s > 1.0 || std::abs(k - std::round(k)) > 1e-12) return "value off the k/F grid";
    return {};
  });
}

Result neighbor_symmetry(std::size_t n) {
  return check("neighbor relation symmetric", n, [](RandomStream& g) -> std::string {
    const Lattice l = any_lattice(g, 6, 1, 1);
    for (std::size_t i = 0; i < l.size(); ++i) {
      for (std::size_t j : l.neighbor_indices(i)) {
        const auto back = l.neighbor_indices(j);
        if (j == i || std::find(back.begin(), back.end(), i) == back.end()) {
          return "asymmetric pair in\n" + describe(l);
        }
      }
    }
    if (l.topology() == Topology{}) {
      for (std::size_t i = 0; i < l.size(); ++i) {
        if (neighbors(l, l.position_of(i)) != oracle::von_neumann_bounded(l, l.position_of(i))) {
          return "von Neumann order differs from N,E,S,W";
        }
      }
    }
    return {};
  });
}

Result trait_uniformity(std::size_t n) {
  // 6 sigma per count keeps the family-wise false alarm rate negligible at 10^3 cases.
  return check("random_lattice traits within 6 sigma of uniform", n,
               [](RandomStream& g) -> std::string {
                 const int t = pick(g, 2, 5);
                 RandomStream rng(g.next_u64());
                 const Lattice l = random_lattice(20, 20, 3, t, rng);
                 for (int f = 0; f < 3; ++f) {
                   std::vector<double> counts(static_cast<std::size_t>(t), 0.0);
                   for (const auto& c : l.cells()) counts[static_cast<std::size_t>(c[f])] += 1.0;
                   const double cells = static_cast<double>(l.size());
                   const double p = 1.0 / t;
                   const double sigma = std::sqrt(cells * p * (1 - p));
                   for (double c : counts) {
                     if (std::abs(c - cells * p) > 6 * sigma) {
                       return "feature " + std::to_string(f) + " count " + std::to_string(c);
                     }
                   }
                 }
                 return {};
               });
}

Result single_feature_mutation(std::size_t n) {
  return check("step changes at most one trait, to the partner's value", n,
               [](RandomStream& g) -> std::string {
                 Lattice l = any_lattice(g, 5, 4, 3);
                 const DisseminationRule rule = any_rule(g);
                 RandomStream rng(g.next_u64());
                 for (int s = 0; s < 50; ++s) {
                   const Lattice before = l;
                   const StepOutcome out = step(l, rule, rng);
                   std::size_t diffs = 0;
                   for (std::size_t i = 0; i < l.size(); ++i) {
                     for (int f = 0; f < l.features(); ++f) diffs += before[i][f] != l[i][f];
                   }
                   if (diffs != (out.changed ? 1u : 0u)) return "changed " + std::to_string(diffs) + " traits";
                   if (!out.changed) continue;
                   const int f = *out.feature_copied;
                   if (l.at(out.active)[f] != l.at(out.partner)[f]) return "copied value differs from partner";
                   const double gain = similarity(l.at(out.active), l.at(out.partner)) -
                                       similarity(before.at(out.active), before.at(out.partner));
                   if (std::abs(gain - 1.0 / l.features()) > 1e-12) return "similarity gain is not 1/F";
                 }
                 return {};
               });
}

Result gate_soundness(std::size_t n) {
  return check("extended gate never copies at s >= th or s == 1", n,
               [](RandomStream& g) -> std::string {
                 Lattice l = any_lattice(g, 6, 5, 3);
                 DisseminationRule rule = any_rule(g);
                 rule.mode = RuleMode::Extended;
                 RandomStream rng(g.next_u64());
                 for (int s = 0; s < 200; ++s) {
                   const StepOutcome out = step(l, rule, rng);
                   if (out.changed &&
                       (out.similarity_before >= rule.threshold || out.similarity_before == 1.0)) {
                     return "copy at s=" + std::to_string(out.similarity_before) +
                            " th=" + std::to_string(rule.threshold);
                   }
                 }
                 return {};
               });
}

Result absorbing_soundness(std::size_t n) {
  return check("absorbing state admits no change in 1e5 further steps", n,
               [](RandomStream& g) -> std::string {
                 const DisseminationRule rule = any_rule(g);
                 RandomStream rng(g.next_u64());
                 Lattice l = random_lattice(pick(g, 1, 4), pick(g, 1, 4), pick(g, 1, 3),
                                            pick(g, 1, 3), rng, any_topology(g));
                 RunOptions opts;
                 opts.max_iterations = 200000;
                 opts.absorb_check_every = 50;
                 opts.snapshot_triggers.clear();
                 Trajectory t = run(l, rule, opts, rng);
                 if (!t.absorbed) return kSkip;
                 if (!is_absorbing(t.final_lattice, rule)) return "absorbed flag without absorbing state";
                 Lattice frozen = t.final_lattice;
                 for (int s = 0; s < 100000; ++s) {
                   if (step(frozen, rule, rng).changed) return "change after absorption";
                 }
                 return {};
               });
}

Result permutation_invariance(std::size_t n) {
  return check("diversity invariant under per-feature trait relabeling", n,
               [](RandomStream& g) -> std::string {
                 const Lattice l = any_lattice(g);
                 std::vector<std::vector<int>> perm(static_cast<std::size_t>(l.features()));
                 for (auto& p : perm) {
                   p.resize(static_cast<std::size_t>(l.traits()));
                   for (int i = 0; i < l.traits(); ++i) p[static_cast<std::size_t>(i)] = i;
                   for (std::size_t i = p.size(); i > 1; --i) std::swap(p[i - 1], p[g.uniform_int(i)]);
                 }
                 std::vector<CultureVector> cells;
                 for (const auto& c : l.cells()) {
                   std::vector<int> v(c.traits().begin(), c.traits().end());
                   for (std::size_t f = 0; f < v.size(); ++f) v[f] = perm[f][static_cast<std::size_t>(v[f])];
                   cells.emplace_back(std::move(v));
                 }
                 const Lattice relabeled(l.width(), l.height(), l.features(), l.traits(),
                                         std::move(cells), l.topology());
                 if (diversity_index(l) != diversity_index(relabeled)) return "diversity changed";
                 if (culture_count(l) != culture_count(relabeled)) return "culture count changed";
                 if (region_count(l) != region_count(relabeled)) return "region count changed";
                 return {};
               });
}

Result incremental_matches_full(std::size_t n) {
  return check("incremental diversity equals recomputation within 1e-12", n,
               [](RandomStream& g) -> std::string {
                 Lattice l = any_lattice(g, 7, 4, 4);
                 const DisseminationRule rule = any_rule(g);
                 RandomStream rng(g.next_u64());
                 DiversityTracker tracker(l);
                 for (int s = 0; s < 100; ++s) {
                   const StepOutcome out = step(l, rule, rng);
                   if (out.changed) {
                     tracker.on_trait_changed(l, l.index_of(out.active), *out.feature_copied,
                                              *out.previous_trait);
                   }
                   if (std::abs(tracker.value() - diversity_index(l)) > 1e-12) return "tracker drifted";
                   if (std::abs(diversity_index(l) - oracle::diversity_by_pairs(l)) > 1e-12) {
                     return "diversity differs from pairwise mean";
                   }
                 }
                 return {};
               });
}

Result diversity_rational(std::size_t n) {
  return check("diversity is in [0,1] with denominator F * ordered pairs", n,
               [](RandomStream& g) -> std::string {
                 const Lattice l = any_lattice(g);
                 const double d = diversity_index(l);
                 if (d < 0.0 || d > 1.0) return "out of range";
                 const double scaled = d * l.features() * static_cast<double>(l.ordered_pair_count());
                 if (std::abs(scaled - std::round(scaled)) > 1e-9) return "not a multiple of 1/(F*pairs)";
                 return {};
               });
}

Result region_culture_relation(std::size_t n) {
  return check("region_count >= culture_count, both 1 together, matches flood fill", n,
               [](RandomStream& g) -> std::string {
                 RandomStream rng(g.next_u64());
                 const Lattice l = random_lattice(pick(g, 1, 7), pick(g, 1, 7), pick(g, 1, 2),
                                                  pick(g, 1, 2), rng, any_topology(g));
                 const auto regions = region_count(l), cultures = culture_count(l);
                 if (regions < cultures) return "fewer regions than cultures";
                 if ((regions == 1) != (cultures == 1)) return "single region/culture mismatch";
                 if ((diversity_index(l) == 0.0) != (cultures == 1)) return "zero diversity mismatch";
                 if (regions != oracle::regions_by_flood_fill(l)) return "differs from flood fill";
                 return {};
               });
}

Result nearest_matches_oracle(std::size_t n) {
  return check("find_nearest_resource equals exhaustive scan", n,
               [](RandomStream& g) -> std::string {
                 RandomStream rng(g.next_u64());
                 const int f = pick(g, 2, 4);
                 const Lattice l = random_lattice(pick(g, 1, 12), pick(g, 1, 12), f, pick(g, 1, 4), rng);
                 const Position from{pick(g, 0, l.height() - 1), pick(g, 0, l.width() - 1)};
                 std::vector<int> tasks(static_cast<std::size_t>(f));
                 for (auto& t : tasks) t = pick(g, 0, l.traits() - 1);
                 const auto task = static_cast<std::size_t>(pick(g, 0, f - 1));
                 const bool euclid = g.uniform_int(4) == 0;
                 const auto got = find_nearest_resource(
                     l, from, task, tasks, euclid ? DistanceMetric::Euclidean : DistanceMetric::Manhattan);
                 if (got != oracle::nearest(l, from, task, tasks, euclid)) return "mismatch\n" + describe(l);
                 return {};
               });
}

Result augmentation_monotone(std::size_t n) {
  return check("adding a matching resource never increases the chosen distance", n,
               [](RandomStream& g) -> std::string {
                 RandomStream rng(g.next_u64());
                 Lattice l = random_lattice(pick(g, 1, 10), pick(g, 1, 10), 3, 3, rng);
                 const Position from{pick(g, 0, l.height() - 1), pick(g, 0, l.width() - 1)};
                 const std::vector<int> tasks{pick(g, 0, 2), pick(g, 0, 2), pick(g, 0, 2)};
                 const auto task = static_cast<std::size_t>(pick(g, 0, 2));
                 auto dist = [&](const std::optional<Position>& p) {
                   return p ? std::abs(p->row - from.row) + std::abs(p->col - from.col) : 1 << 30;
                 };
                 const int before = dist(find_nearest_resource(l, from, task, tasks));
                 const Position where{pick(g, 0, l.height() - 1), pick(g, 0, l.width() - 1)};
                 CultureVector added = l.at(where);
                 added[0] = task <= 1 ? tasks[0] : added[0];
                 added[1] = task == 1 ? tasks[1] : added[1];
                 added[2] = task == 2 ? tasks[2] : added[2];
                 l.set(where, added);
                 // `where` matches after the overwrite, so the old best (possibly `where`
                 // itself) is still a candidate.
                 if (!match_predicate(task, tasks, l.at(where))) return "augmentation failed";
                 const int after = dist(find_nearest_resource(l, from, task, tasks));
                 if (after > before) return "distance grew";
                 return {};
               });
}

Result traversal_laws(std::size_t n) {
  return check("traverse deterministic, relocations <= F, mobility in [0,2]", n,
               [](RandomStream& g) -> std::string {
                 RandomStream rng(g.next_u64());
                 const Lattice l = random_lattice(pick(g, 1, 10), pick(g, 1, 10), 3, pick(g, 1, 4), rng);
                 std::vector<Product> products;
                 for (int i = 0; i < pick(g, 1, 8); ++i) {
                   products.emplace_back(i, Position{pick(g, 0, l.height() - 1), pick(g, 0, l.width() - 1)},
                                         TaskSequence{pick(g, 0, l.traits() - 1), pick(g, 0, l.traits() - 1),
                                                      pick(g, 0, l.traits() - 1)});
                 }
                 const auto a = traverse(l, products);
                 const auto b = traverse(l, products);
                 if (a.products != b.products || a.records != b.records) return "not deterministic";
                 if (a.mobility_index < 0.0 || a.mobility_index > 2.0) return "mobility out of range";
                 for (std::size_t i = 0; i < a.products.size(); ++i) {
                   const auto& p = a.products[i];
                   if (a.records[i].relocations > l.features()) return "too many relocations";
                   if ((p.status == ProductStatus::Completed) != (p.next_task == l.features())) {
                     return "completed flag inconsistent";
                   }
                   if (p.status == ProductStatus::Blocked &&
                       p.visit_log.size() >= static_cast<std::size_t>(l.features())) {
                     return "blocked product with a full visit log";
                   }
                 }
                 return {};
               });
}

Result config_round_trip(std::size_t n) {
  return check("load(serialize(config)) == config", n, [](RandomStream& g) -> std::string {
    SimConfig c;
    c.width = pick(g, 1, 30);
    c.height = pick(g, 1, 30);
    c.features = pick(g, 1, 5);
    c.traits = pick(g, 1, 6);
    c.rule = any_rule(g);
    c.topology = any_topology(g);
    c.seed = g.next_u64();
    c.max_iterations = static_cast<std::size_t>(pick(g, 1, 1000000));
    c.sample_every = static_cast<std::size_t>(pick(g, 1, 1000));
    c.snapshot_triggers.clear();
    double level = 1.0;
    for (int k = pick(g, 0, 4); k > 0; --k) {
      level *= g.uniform_real();
      if (c.snapshot_triggers.empty() || level < c.snapshot_triggers.back()) c.snapshot_triggers.push_back(level);
    }
    c.products = pick(g, 1, 6);
    c.placement = static_cast<Placement>(pick(g, 0, 2));
    if (c.placement == Placement::Explicit) {
      for (int i = 0; i < c.products; ++i) c.positions.push_back({pick(g, 0, c.height - 1), pick(g, 0, c.width - 1)});
    }
    if (g.uniform_int(2)) {
      for (int i = 0; i < c.products; ++i) {
        TaskSequence t(static_cast<std::size_t>(c.features));
        for (auto& v : t) v = pick(g, 0, c.traits - 1);
        c.tasks.push_back(t);
      }
    }
    c.distance = g.uniform_int(2) ? DistanceMetric::Euclidean : DistanceMetric::Manhattan;
    c.replications = static_cast<std::size_t>(pick(g, 1, 50));
    c.output = "out/run_" + std::to_string(pick(g, 0, 99));
    const std::string text = serialize_config(c);
    if (load_config_text(text) != c) return "round trip differs:\n" + text;
    return {};
  });
}

Result lattice_text_round_trip(std::size_t n) {
  return check("parse_lattice(format_lattice(l)) == l", n, [](RandomStream& g) -> std::string {
    const Lattice l = any_lattice(g, 8, 5, 14);
    const std::string text = format_lattice(l);
    if (parse_lattice(text, l.topology()) != l) return "round trip differs";
    if (format_lattice(parse_lattice(text)) != text) return "text not reproduced";
    return {};
  });
}

Result replay(std::size_t n) {
  return check("same lattice, rule and seed replay identically", std::max<std::size_t>(n / 10, 10),
               [](RandomStream& g) -> std::string {
                 const Lattice l = any_lattice(g, 6, 3, 3);
                 const DisseminationRule rule = any_rule(g);
                 const std::uint64_t seed = g.next_u64();
                 RunOptions opts;
                 opts.max_iterations = 5000;
                 opts.sample_every = 37;
                 RandomStream r1(seed), r2(seed);
                 const Trajectory a = run(l, rule, opts, r1);
                 const Trajectory b = run(l, rule, opts, r2);
                 if (a.samples != b.samples || !(a.final_lattice == b.final_lattice) ||
                     a.iterations_run != b.iterations_run || a.snapshots.size() != b.snapshots.size()) {
                   return "trajectories differ";
                 }
                 for (std::size_t i = 1; i < a.samples.size(); ++i) {
                   if (a.samples[i].iteration <= a.samples[i - 1].iteration) return "samples not increasing";
                 }
                 return {};
               });
}

}  // namespace

const std::vector<Property>& all() {
  static const std::vector<Property> list{
      {"similarity", similarity_laws},
      {"neighbors", neighbor_symmetry},
      {"trait_uniformity", trait_uniformity},
      {"single_feature_mutation", single_feature_mutation},
      {"gate_soundness", gate_soundness},
      {"absorbing_soundness", absorbing_soundness},
      {"permutation_invariance", permutation_invariance},
      {"incremental_diversity", incremental_matches_full},
      {"diversity_rational", diversity_rational},
      {"regions", region_culture_relation},
      {"nearest_oracle", nearest_matches_oracle},
      {"augmentation", augmentation_monotone},
      {"traversal", traversal_laws},
      {"config_round_trip", config_round_trip},
      {"lattice_round_trip", lattice_text_round_trip},
      {"replay", replay},
  };
  return list;
}

}  // namespace props
