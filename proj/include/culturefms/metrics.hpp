#pragma once

#include <cstddef>
#include <cstdint>

#include "culturefms/lattice.hpp"

namespace culturefms {

struct MetricsSample {
  std::size_t iteration = 0;
  double diversity_index = 0.0;
  std::size_t culture_count = 0;
  std::size_t region_count = 0;

  friend bool operator==(const MetricsSample&, const MetricsSample&) = default;
};

/// Mean of (1 - similarity) over all ordered (cell, neighbor) pairs.
///
/// Computed as (total differing features over all ordered pairs) divided by
/// (features * ordered pairs), which is the same mean with a single rounding.
/// A lattice without any neighbor pair has diversity 0.
double diversity_index(const Lattice& lattice);

/// Number of distinct culture vectors present.
std::size_t culture_count(const Lattice& lattice);

/// Connected components of identical vectors under the lattice's neighborhood.
std::size_t region_count(const Lattice& lattice);

MetricsSample measure(const Lattice& lattice, std::size_t iteration);

/// Running diversity index that is updated in O(neighbors) when one trait
/// of one cell changes. Keeps an exact integer count of differing
/// (ordered pair, feature) entries, so value() equals diversity_index()
/// of the same lattice bit for bit.
class DiversityTracker {
 public:
  explicit DiversityTracker(const Lattice& lattice);

  /// Call after lattice[index][feature] changed from previous_trait.
  void on_trait_changed(const Lattice& lattice, std::size_t index, int feature, int previous_trait);

  double value() const noexcept;
  std::uint64_t differing_entries() const noexcept { return differing_; }

 private:
  std::uint64_t differing_ = 0;
  std::uint64_t denominator_ = 0;
};

}  // namespace culturefms
