#include "culturefms/routing.hpp"

#include <cstdint>
#include <limits>
#include <string>

#include "culturefms/errors.hpp"

namespace culturefms {

std::string_view to_string(ProductStatus s) noexcept {
  switch (s) {
    case ProductStatus::Active: return "active";
    case ProductStatus::Completed: return "completed";
    case ProductStatus::Blocked: return "blocked";
  }
  return "unknown";
}

std::string_view to_string(DistanceMetric m) noexcept {
  return m == DistanceMetric::Manhattan ? "manhattan" : "euclidean";
}

bool match_predicate(std::size_t task_index, std::span<const int> tasks,
                     const CultureVector& resource) {
  if (task_index >= tasks.size() || task_index >= resource.size()) {
    throw ContractError("match_predicate: task index " + std::to_string(task_index) +
                        " out of range");
  }
  if (task_index == 1) return resource[0] == tasks[0] && resource[1] == tasks[1];
  return resource[task_index] == tasks[task_index];
}

std::optional<Position> find_nearest_resource(const Lattice& lattice, Position from,
                                              std::size_t task_index, std::span<const int> tasks,
                                              DistanceMetric metric) {
  if (!lattice.contains(from)) throw ContractError("find_nearest_resource: start off-grid");
  std::optional<Position> best;
  auto best_distance = std::numeric_limits<std::int64_t>::max();
  // Row-major scan with strict improvement keeps the first cell among ties.
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    if (!match_predicate(task_index, tasks, lattice[i])) continue;
    const Position p = lattice.position_of(i);
    const std::int64_t dr = p.row - from.row;
    const std::int64_t dc = p.col - from.col;
    const std::int64_t d = metric == DistanceMetric::Manhattan
                               ? (dr < 0 ? -dr : dr) + (dc < 0 ? -dc : dc)
                               : dr * dr + dc * dc;
    if (d < best_distance) {
      best_distance = d;
      best = p;
    }
  }
  return best;
}

TraversalReport traverse(const Lattice& lattice, std::vector<Product> products,
                         DistanceMetric metric) {
  TraversalReport report;
  report.records.reserve(products.size());
  std::size_t completed = 0;
  for (auto& product : products) {
    if (!lattice.contains(product.position)) {
      throw ContractError("traverse: product " + std::to_string(product.id) + " starts off-grid");
    }
    if (product.tasks.size() != static_cast<std::size_t>(lattice.features())) {
      throw ContractError("traverse: product " + std::to_string(product.id) + " has " +
                          std::to_string(product.tasks.size()) + " tasks, lattice has " +
                          std::to_string(lattice.features()) + " features");
    }
    ProductRecord rec{product.id, 0, 0, 0, false};
    const auto task_count = static_cast<int>(product.tasks.size());
    while (product.next_task < task_count) {
      const auto task = static_cast<std::size_t>(product.next_task);
      const auto found =
          find_nearest_resource(lattice, product.position, task, product.tasks, metric);
      if (!found) {
        product.status = ProductStatus::Blocked;
        break;
      }
      const bool moved = *found != product.position;
      product.position = *found;
      product.visit_log.push_back({product.next_task, *found, moved});
      rec.relocations += moved;
      ++rec.completed_total;
      if (product.next_task < 2) ++rec.completed_first_two;
      ++product.next_task;
    }
    if (product.next_task == task_count) {
      product.status = ProductStatus::Completed;
      ++completed;
    }
    rec.blocked = product.status == ProductStatus::Blocked;
    report.records.push_back(rec);
  }
  report.products = std::move(products);
  if (!report.records.empty()) {
    report.mobility_index = mobility_index(report.records);
    report.completion_rate =
        static_cast<double>(completed) / static_cast<double>(report.records.size());
  }
  return report;
}

double mobility_index(std::span<const ProductRecord> records) {
  if (records.empty()) throw ContractError("mobility_index: empty report");
  long total = 0;
  for (const auto& r : records) total += r.completed_first_two;
  return static_cast<double>(total) / static_cast<double>(records.size());
}

double mobility_index(const TraversalReport& report) { return mobility_index(report.records); }

Position center_of(const Lattice& lattice) { return {lattice.height() / 2, lattice.width() / 2}; }

}  // namespace culturefms
