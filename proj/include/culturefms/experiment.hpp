#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "culturefms/config.hpp"
#include "culturefms/dissemination.hpp"
#include "culturefms/routing.hpp"

namespace culturefms {

/// Products are drawn from their own stream so the product set does not
/// depend on how long the lattice evolves.
inline constexpr std::uint64_t kProductStreamSalt = 0x9e3779b97f4a7c15ULL;

/// Traversal of the run's product set over one lattice (a snapshot or the
/// final state).
struct TraversalRecord {
  std::string label;              // "snapshot" or "final"
  std::optional<double> trigger;  // snapshots only
  std::size_t iteration = 0;
  double diversity_index = 0.0;
  std::size_t culture_count = 0;
  std::size_t region_count = 0;
  double mobility_index = 0.0;
  double completion_rate = 0.0;
  std::vector<ProductRecord> products;

  friend bool operator==(const TraversalRecord&, const TraversalRecord&) = default;
};

struct RunRecord {
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  bool absorbed = false;
  double diversity_index = 0.0;
  std::size_t culture_count = 0;
  std::size_t region_count = 0;
  double mobility_index = 0.0;
  double completion_rate = 0.0;
  std::vector<TraversalRecord> traversals;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct Aggregate {
  std::string name;
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation, 0 when count < 2

  friend bool operator==(const Aggregate&, const Aggregate&) = default;
};

struct ExperimentSummary {
  SimConfig config;
  std::vector<Product> products;  // initial product set of the first run
  std::vector<RunRecord> runs;
  std::vector<Aggregate> aggregates;
};

/// Everything one seeded run produces, before anything is written.
struct RunResult {
  Trajectory trajectory;
  std::vector<Product> products;
  std::vector<TraversalReport> snapshot_reports;  // parallel to trajectory.snapshots
  TraversalReport final_report;
  RunRecord record;
};

/// Initial products for a config; draws positions (random placement) and
/// task sequences (when not listed) per product, in product order.
std::vector<Product> make_products(const SimConfig& config, RandomStream& rng);

/// Randomizes the lattice and evolves it with RandomStream(seed), then
/// traverses every snapshot and the final lattice with the same products.
RunResult run_once(const SimConfig& config, std::uint64_t seed);

/// Fold over runs in order: iterations, absorbed, final metrics, and the
/// mobility index at each snapshot trigger over the runs that reached it.
std::vector<Aggregate> compute_aggregates(const SimConfig& config,
                                          const std::vector<RunRecord>& runs);

/// Runs config.replications seeds (seed, seed + 1, ...) and writes, under
/// config.output:
///   summary.json
///   seed_<s>/timeseries.csv, final.lattice, final.txt, final.ppm,
///   seed_<s>/snapshot_<trigger>.lattice / .ppm for each fired trigger.
/// Renders are skipped (with a note in summary.json) when F is too large.
ExperimentSummary run_experiment(const SimConfig& config, int jobs = 1);

std::string timeseries_csv(const Trajectory& trajectory);
std::string summary_json(const ExperimentSummary& summary);

/// Parses summary_json output and checks that the stored aggregates equal a
/// recomputation from the per-run records. Throws std::runtime_error if not.
ExperimentSummary parse_summary(std::string_view json);

/// One sweep axis: a config key and the values it takes.
using SweepAxis = std::pair<std::string, std::vector<std::string>>;

struct SweepRow {
  std::size_t cell = 0;
  std::vector<std::string> values;  // one per axis
  std::size_t replication = 0;
  RunRecord record;
};

struct SweepResult {
  std::vector<std::string> axes;
  std::vector<SweepRow> rows;
  std::vector<std::vector<Aggregate>> cell_aggregates;  // per cell
  std::vector<std::vector<std::string>> cell_values;
};

/// Cartesian product of axis values (last axis varies fastest) times
/// replications. Replication i uses seed base.seed + i in every cell.
SweepResult sweep(const SimConfig& base, const std::vector<SweepAxis>& grid,
                  std::size_t replications, int jobs = 1);

/// Header: kind,cell,<axes...>,replication,seed,iterations,absorbed,
/// then diversity_index, culture_count, region_count, mobility_index,
/// completion_rate, each followed by an _sd column. Run rows come first
/// (kind=run, _sd empty), then one kind=aggregate row per cell.
std::string sweep_csv(const SweepResult& result);

}  // namespace culturefms
