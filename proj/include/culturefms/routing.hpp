#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "culturefms/lattice.hpp"
#include "culturefms/rng.hpp"

namespace culturefms {

/// Required precision level per task, in task order.
using TaskSequence = std::vector<int>;

enum class ProductStatus { Active, Completed, Blocked };
enum class DistanceMetric { Manhattan, Euclidean };

std::string_view to_string(ProductStatus s) noexcept;
std::string_view to_string(DistanceMetric m) noexcept;

struct Visit {
  int task = 0;
  Position position;
  bool moved = false;

  friend bool operator==(const Visit&, const Visit&) = default;
};

struct Product {
  int id = 0;
  Position position;
  TaskSequence tasks;
  int next_task = 0;
  ProductStatus status = ProductStatus::Active;
  std::vector<Visit> visit_log;

  Product() = default;
  Product(int id_, Position start, TaskSequence tasks_)
      : id(id_), position(start), tasks(std::move(tasks_)) {}

  friend bool operator==(const Product&, const Product&) = default;
};

/// Whether `resource` can perform task `task_index` of `tasks`.
///
/// Task 0 needs resource[0] == tasks[0]. Task 1 is chained to task 0 and
/// needs both resource[0] == tasks[0] and resource[1] == tasks[1]. Every
/// later task is independent: resource[i] == tasks[i] only.
bool match_predicate(std::size_t task_index, std::span<const int> tasks,
                     const CultureVector& resource);

/// Nearest cell satisfying match_predicate. Ties go to the smallest row,
/// then the smallest column. The start cell itself is eligible. Distances
/// are planar grid distances regardless of the lattice boundary.
std::optional<Position> find_nearest_resource(const Lattice& lattice, Position from,
                                              std::size_t task_index, std::span<const int> tasks,
                                              DistanceMetric metric = DistanceMetric::Manhattan);

struct ProductRecord {
  int id = 0;
  int completed_first_two = 0;
  int completed_total = 0;
  int relocations = 0;
  bool blocked = false;

  friend bool operator==(const ProductRecord&, const ProductRecord&) = default;
};

struct TraversalReport {
  std::vector<Product> products;
  std::vector<ProductRecord> records;
  double mobility_index = 0.0;
  double completion_rate = 0.0;
};

/// Walks every product through its task list against a fixed lattice.
/// Products are independent: they neither occupy nor reserve resources.
TraversalReport traverse(const Lattice& lattice, std::vector<Product> products,
                         DistanceMetric metric = DistanceMetric::Manhattan);

/// Mean over products of tasks completed among the first two, in [0, 2].
/// Throws ContractError on an empty report.
double mobility_index(std::span<const ProductRecord> records);
double mobility_index(const TraversalReport& report);

/// Center cell (height / 2, width / 2).
Position center_of(const Lattice& lattice);

}  // namespace culturefms
