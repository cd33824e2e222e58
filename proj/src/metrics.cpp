#include "culturefms/metrics.hpp"

#include <numeric>
#include <set>
#include <vector>

namespace culturefms {

namespace {

std::uint64_t count_differing(const Lattice& lattice) {
  std::uint64_t differing = 0;
  const auto features = static_cast<std::uint64_t>(lattice.features());
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    for (std::size_t j : lattice.neighbor_indices(i)) {
      differing += features - matching_features(lattice[i], lattice[j]);
    }
  }
  return differing;
}

double ratio(std::uint64_t differing, std::uint64_t denominator) {
  if (denominator == 0) return 0.0;
  return static_cast<double>(differing) / static_cast<double>(denominator);
}

// Union-find with path halving.
std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

double diversity_index(const Lattice& lattice) {
  return ratio(count_differing(lattice),
               static_cast<std::uint64_t>(lattice.features()) * lattice.ordered_pair_count());
}

std::size_t culture_count(const Lattice& lattice) {
  std::set<CultureVector> seen(lattice.cells().begin(), lattice.cells().end());
  return seen.size();
}

std::size_t region_count(const Lattice& lattice) {
  std::vector<std::size_t> parent(lattice.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  std::size_t regions = lattice.size();
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    for (std::size_t j : lattice.neighbor_indices(i)) {
      if (j < i || lattice[i] != lattice[j]) continue;
      const std::size_t a = find_root(parent, i);
      const std::size_t b = find_root(parent, j);
      if (a != b) {
        parent[b] = a;
        --regions;
      }
    }
  }
  return regions;
}

MetricsSample measure(const Lattice& lattice, std::size_t iteration) {
  return {iteration, diversity_index(lattice), culture_count(lattice), region_count(lattice)};
}

DiversityTracker::DiversityTracker(const Lattice& lattice)
    : differing_(count_differing(lattice)),
      denominator_(static_cast<std::uint64_t>(lattice.features()) * lattice.ordered_pair_count()) {}

void DiversityTracker::on_trait_changed(const Lattice& lattice, std::size_t index, int feature,
                                        int previous_trait) {
  const auto f = static_cast<std::size_t>(feature);
  const int current = lattice[index][f];
  for (std::size_t j : lattice.neighbor_indices(index)) {
    const int other = lattice[j][f];
    // Both (index, j) and (j, index) are ordered pairs.
    if (other != previous_trait) differing_ -= 2;
    if (other != current) differing_ += 2;
  }
}

double DiversityTracker::value() const noexcept { return ratio(differing_, denominator_); }

}  // namespace culturefms
