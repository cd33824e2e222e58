#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

#include "culturefms/rng.hpp"

namespace culturefms {

/// Grid coordinate. Ordering is row-major (row first, then column).
struct Position {
  int row = 0;
  int col = 0;

  friend auto operator<=>(const Position&, const Position&) = default;
};

/// Capability tuple of one resource: entry i is the precision level the
/// resource offers for task i.
class CultureVector {
 public:
  CultureVector() = default;
  explicit CultureVector(std::vector<int> traits) : traits_(std::move(traits)) {}
  CultureVector(std::initializer_list<int> traits) : traits_(traits) {}

  std::size_t size() const noexcept { return traits_.size(); }
  int operator[](std::size_t feature) const { return traits_[feature]; }
  int& operator[](std::size_t feature) { return traits_[feature]; }
  std::span<const int> traits() const noexcept { return traits_; }

  friend auto operator<=>(const CultureVector&, const CultureVector&) = default;

 private:
  std::vector<int> traits_;
};

/// Number of features on which a and b agree. Throws ContractError on a
/// length mismatch.
std::size_t matching_features(const CultureVector& a, const CultureVector& b);

/// Fraction of features on which a and b agree, in [0, 1].
double similarity(const CultureVector& a, const CultureVector& b);

enum class Neighborhood { VonNeumann4, Moore8 };
enum class Boundary { Bounded, Torus };

std::string_view to_string(Neighborhood n) noexcept;
std::string_view to_string(Boundary b) noexcept;

struct Topology {
  Neighborhood neighborhood = Neighborhood::VonNeumann4;
  Boundary boundary = Boundary::Bounded;

  friend bool operator==(const Topology&, const Topology&) = default;
};

/// Rectangular grid of resources, stored row-major.
///
/// Neighbor lists are built once at construction. Order is N, E, S, W for
/// the von Neumann neighborhood and clockwise from N (N, NE, E, SE, S, SW,
/// W, NW) for Moore. Off-grid cells are dropped under Bounded; under Torus
/// coordinates wrap, and on grids too narrow to hold distinct neighbors the
/// duplicates and the cell itself are dropped, keeping first occurrence.
class Lattice {
 public:
  /// Validates dimensions (ConfigError) and that every cell has exactly
  /// `features` traits in [0, traits) (ContractError).
  Lattice(int width, int height, int features, int traits, std::vector<CultureVector> cells,
          Topology topology = {});

  static Lattice uniform(int width, int height, int traits, const CultureVector& value,
                         Topology topology = {});

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int features() const noexcept { return features_; }
  int traits() const noexcept { return traits_; }
  const Topology& topology() const noexcept { return topology_; }
  std::size_t size() const noexcept { return cells_.size(); }

  bool contains(Position p) const noexcept {
    return p.row >= 0 && p.row < height_ && p.col >= 0 && p.col < width_;
  }
  std::size_t index_of(Position p) const;
  Position position_of(std::size_t index) const;

  const CultureVector& at(Position p) const { return cells_[index_of(p)]; }
  const CultureVector& operator[](std::size_t index) const { return cells_[index]; }
  std::span<const CultureVector> cells() const noexcept { return cells_; }

  void set(Position p, CultureVector value);
  void set_trait(std::size_t index, int feature, int value);

  std::span<const std::size_t> neighbor_indices(std::size_t index) const noexcept {
    return {neighbors_.data() + offsets_[index], neighbors_.data() + offsets_[index + 1]};
  }

  /// Total number of ordered (cell, neighbor) pairs.
  std::size_t ordered_pair_count() const noexcept { return neighbors_.size(); }

  /// Same cells under a different neighborhood/boundary.
  Lattice with_topology(Topology topology) const;

  friend bool operator==(const Lattice& a, const Lattice& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.features_ == b.features_ &&
           a.traits_ == b.traits_ && a.topology_ == b.topology_ && a.cells_ == b.cells_;
  }

 private:
  void check_vector(const CultureVector& v) const;
  void build_adjacency();

  int width_;
  int height_;
  int features_;
  int traits_;
  Topology topology_;
  std::vector<CultureVector> cells_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> neighbors_;
};

/// Neighbors of p in documented order. Throws ContractError when p is off-grid.
std::vector<Position> neighbors(const Lattice& lattice, Position p);

/// Every trait drawn uniformly from [0, traits), cells in row-major order,
/// features in order within a cell.
Lattice random_lattice(int width, int height, int features, int traits, RandomStream& rng,
                       Topology topology = {});

}  // namespace culturefms
