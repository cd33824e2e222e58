#include "culturefms/lattice.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <utility>

#include "culturefms/errors.hpp"

namespace culturefms {

namespace {

struct Offset {
  int drow;
  int dcol;
};

constexpr std::array<Offset, 4> kVonNeumann{{{-1, 0}, {0, 1}, {1, 0}, {0, -1}}};
constexpr std::array<Offset, 8> kMoore{
    {{-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1}}};

int wrap(int v, int n) { return ((v % n) + n) % n; }

void check_dimension(const char* key, int value) {
  if (value < 1) {
    throw ConfigError(key, 0, "must be >= 1, got " + std::to_string(value));
  }
}

}  // namespace

std::size_t matching_features(const CultureVector& a, const CultureVector& b) {
  if (a.size() != b.size()) {
    throw ContractError("similarity: vectors of length " + std::to_string(a.size()) + " and " +
                        std::to_string(b.size()));
  }
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i) same += (a[i] == b[i]);
  return same;
}

double similarity(const CultureVector& a, const CultureVector& b) {
  const std::size_t same = matching_features(a, b);
  if (a.size() == 0) return 1.0;
  return static_cast<double>(same) / static_cast<double>(a.size());
}

std::string_view to_string(Neighborhood n) noexcept {
  return n == Neighborhood::VonNeumann4 ? "von_neumann" : "moore";
}

std::string_view to_string(Boundary b) noexcept {
  return b == Boundary::Bounded ? "bounded" : "torus";
}

Lattice::Lattice(int width, int height, int features, int traits, std::vector<CultureVector> cells,
                 Topology topology)
    : width_(width),
      height_(height),
      features_(features),
      traits_(traits),
      topology_(topology),
      cells_(std::move(cells)) {
  check_dimension("width", width);
  check_dimension("height", height);
  check_dimension("features", features);
  check_dimension("traits", traits);
  const auto expected = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (cells_.size() != expected) {
    throw ContractError("lattice: expected " + std::to_string(expected) + " cells, got " +
                        std::to_string(cells_.size()));
  }
  for (const auto& c : cells_) check_vector(c);
  build_adjacency();
}

Lattice Lattice::uniform(int width, int height, int traits, const CultureVector& value,
                         Topology topology) {
  check_dimension("width", width);
  check_dimension("height", height);
  return Lattice(width, height, static_cast<int>(value.size()), traits,
                 std::vector<CultureVector>(static_cast<std::size_t>(width) * height, value),
                 topology);
}

void Lattice::check_vector(const CultureVector& v) const {
  if (v.size() != static_cast<std::size_t>(features_)) {
    throw ContractError("lattice: culture vector has " + std::to_string(v.size()) +
                        " features, expected " + std::to_string(features_));
  }
  for (int t : v.traits()) {
    if (t < 0 || t >= traits_) {
      throw ContractError("lattice: trait " + std::to_string(t) + " outside [0, " +
                          std::to_string(traits_) + ")");
    }
  }
}

void Lattice::build_adjacency() {
  std::span<const Offset> offsets = topology_.neighborhood == Neighborhood::VonNeumann4
                                        ? std::span<const Offset>(kVonNeumann)
                                        : std::span<const Offset>(kMoore);
  offsets_.assign(1, 0);
  neighbors_.clear();
  neighbors_.reserve(cells_.size() * offsets.size());
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const Position p = position_of(i);
    const std::size_t begin = neighbors_.size();
    for (const auto& o : offsets) {
      Position q{p.row + o.drow, p.col + o.dcol};
      if (topology_.boundary == Boundary::Torus) {
        q = {wrap(q.row, height_), wrap(q.col, width_)};
      } else if (!contains(q)) {
        continue;
      }
      const std::size_t j = index_of(q);
      if (j == i) continue;
      if (std::find(neighbors_.begin() + static_cast<std::ptrdiff_t>(begin), neighbors_.end(), j) !=
          neighbors_.end()) {
        continue;
      }
      neighbors_.push_back(j);
    }
    offsets_.push_back(neighbors_.size());
  }
}

std::size_t Lattice::index_of(Position p) const {
  if (!contains(p)) {
    throw ContractError("position (" + std::to_string(p.row) + "," + std::to_string(p.col) +
                        ") outside " + std::to_string(height_) + "x" + std::to_string(width_) +
                        " lattice");
  }
  return static_cast<std::size_t>(p.row) * static_cast<std::size_t>(width_) +
         static_cast<std::size_t>(p.col);
}

Position Lattice::position_of(std::size_t index) const {
  return {static_cast<int>(index / static_cast<std::size_t>(width_)),
          static_cast<int>(index % static_cast<std::size_t>(width_))};
}

void Lattice::set(Position p, CultureVector value) {
  check_vector(value);
  cells_[index_of(p)] = std::move(value);
}

void Lattice::set_trait(std::size_t index, int feature, int value) {
  if (index >= cells_.size() || feature < 0 || feature >= features_ || value < 0 ||
      value >= traits_) {
    throw ContractError("set_trait: argument out of range");
  }
  cells_[index][static_cast<std::size_t>(feature)] = value;
}

Lattice Lattice::with_topology(Topology topology) const {
  return Lattice(width_, height_, features_, traits_, cells_, topology);
}

std::vector<Position> neighbors(const Lattice& lattice, Position p) {
  std::vector<Position> out;
  for (std::size_t j : lattice.neighbor_indices(lattice.index_of(p))) {
    out.push_back(lattice.position_of(j));
  }
  return out;
}

Lattice random_lattice(int width, int height, int features, int traits, RandomStream& rng,
                       Topology topology) {
  check_dimension("width", width);
  check_dimension("height", height);
  check_dimension("features", features);
  check_dimension("traits", traits);
  std::vector<CultureVector> cells;
  cells.reserve(static_cast<std::size_t>(width) * height);
  for (int i = 0; i < width * height; ++i) {
    std::vector<int> traits_of_cell(static_cast<std::size_t>(features));
    for (auto& t : traits_of_cell) {
      t = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(traits)));
    }
    cells.emplace_back(std::move(traits_of_cell));
  }
  return Lattice(width, height, features, traits, std::move(cells), topology);
}

}  // namespace culturefms
