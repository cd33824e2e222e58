#include "culturefms/experiment.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "culturefms/errors.hpp"
#include "culturefms/lattice_io.hpp"
#include "culturefms/metrics.hpp"
#include "culturefms/render.hpp"
#include "format.hpp"

namespace culturefms {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using detail::format_double;

namespace {

// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception
// is rethrown after all workers stop.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

Aggregate aggregate(std::string name, const std::vector<double>& values) {
  Aggregate a{std::move(name), values.size(), 0.0, 0.0};
  if (values.empty()) return a;
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - a.mean) * (v - a.mean);
    a.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return a;
}

TraversalRecord record_traversal(std::string label, std::optional<double> trigger,
                                 std::size_t iteration, const Lattice& lattice,
                                 const TraversalReport& report) {
  const MetricsSample m = measure(lattice, iteration);
  return {std::move(label),    trigger,          iteration,
          m.diversity_index,   m.culture_count,  m.region_count,
          report.mobility_index, report.completion_rate, report.records};
}

std::string trigger_label(double trigger) { return format_double(trigger); }

json product_json(const Product& p) {
  return json{{"id", p.id}, {"row", p.position.row}, {"col", p.position.col}, {"tasks", p.tasks}};
}

json record_json(const ProductRecord& r) {
  return json{{"id", r.id},
              {"completed_first_two", r.completed_first_two},
              {"completed_total", r.completed_total},
              {"relocations", r.relocations},
              {"blocked", r.blocked}};
}

json traversal_json(const TraversalRecord& t) {
  json products = json::array();
  for (const auto& r : t.products) products.push_back(record_json(r));
  return json{{"label", t.label},
              {"trigger", t.trigger ? json(*t.trigger) : json(nullptr)},
              {"iteration", t.iteration},
              {"diversity_index", t.diversity_index},
              {"culture_count", t.culture_count},
              {"region_count", t.region_count},
              {"mobility_index", t.mobility_index},
              {"completion_rate", t.completion_rate},
              {"products", std::move(products)}};
}

json run_json(const RunRecord& r) {
  json traversals = json::array();
  for (const auto& t : r.traversals) traversals.push_back(traversal_json(t));
  return json{{"seed", r.seed},
              {"iterations", r.iterations},
              {"absorbed", r.absorbed},
              {"diversity_index", r.diversity_index},
              {"culture_count", r.culture_count},
              {"region_count", r.region_count},
              {"mobility_index", r.mobility_index},
              {"completion_rate", r.completion_rate},
              {"traversals", std::move(traversals)}};
}

}  // namespace

std::vector<Product> make_products(const SimConfig& config, RandomStream& rng) {
  std::vector<Product> products;
  const Position center{config.height / 2, config.width / 2};
  for (int i = 0; i < config.products; ++i) {
    Position start = center;
    if (config.placement == Placement::Random) {
      start.row = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(config.height)));
      start.col = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(config.width)));
    } else if (config.placement == Placement::Explicit) {
      start = config.positions.at(static_cast<std::size_t>(i));
    }
    TaskSequence tasks;
    if (config.tasks.empty()) {
      tasks.resize(static_cast<std::size_t>(config.features));
      for (auto& t : tasks) {
        t = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(config.traits)));
      }
    } else {
      tasks = config.tasks.at(static_cast<std::size_t>(i));
    }
    products.emplace_back(i, start, std::move(tasks));
  }
  return products;
}

RunResult run_once(const SimConfig& config, std::uint64_t seed) {
  validate(config);
  RandomStream rng(seed);
  Lattice initial =
      random_lattice(config.width, config.height, config.features, config.traits, rng, config.topology);
  RandomStream product_rng(seed ^ kProductStreamSalt);
  std::vector<Product> products = make_products(config, product_rng);

  RunResult result{run(std::move(initial), config.rule, config.run_options(), rng), products,
                   {}, {}, {}};
  const Trajectory& traj = result.trajectory;

  RunRecord& rec = result.record;
  rec.seed = seed;
  rec.iterations = traj.iterations_run;
  rec.absorbed = traj.absorbed;
  const MetricsSample& last = traj.samples.back();
  rec.diversity_index = last.diversity_index;
  rec.culture_count = last.culture_count;
  rec.region_count = last.region_count;

  for (const auto& snap : traj.snapshots) {
    result.snapshot_reports.push_back(traverse(snap.lattice, products, config.distance));
    rec.traversals.push_back(record_traversal("snapshot", snap.trigger, snap.iteration,
                                              snap.lattice, result.snapshot_reports.back()));
  }
  result.final_report = traverse(traj.final_lattice, products, config.distance);
  rec.traversals.push_back(record_traversal("final", std::nullopt, traj.iterations_run,
                                            traj.final_lattice, result.final_report));
  rec.mobility_index = result.final_report.mobility_index;
  rec.completion_rate = result.final_report.completion_rate;
  return result;
}

std::vector<Aggregate> compute_aggregates(const SimConfig& config,
                                          const std::vector<RunRecord>& runs) {
  std::vector<double> iterations, absorbed, diversity, cultures, regions, mobility, completion;
  for (const auto& r : runs) {
    iterations.push_back(static_cast<double>(r.iterations));
    absorbed.push_back(r.absorbed ? 1.0 : 0.0);
    diversity.push_back(r.diversity_index);
    cultures.push_back(static_cast<double>(r.culture_count));
    regions.push_back(static_cast<double>(r.region_count));
    mobility.push_back(r.mobility_index);
    completion.push_back(r.completion_rate);
  }
  std::vector<Aggregate> out{
      aggregate("iterations", iterations),         aggregate("absorbed", absorbed),
      aggregate("diversity_index", diversity),     aggregate("culture_count", cultures),
      aggregate("region_count", regions),          aggregate("mobility_index", mobility),
      aggregate("completion_rate", completion)};
  for (double trigger : config.snapshot_triggers) {
    std::vector<double> at_trigger;
    for (const auto& r : runs) {
      for (const auto& t : r.traversals) {
        if (t.trigger && *t.trigger == trigger) at_trigger.push_back(t.mobility_index);
      }
    }
    out.push_back(aggregate("mobility_at_" + trigger_label(trigger), at_trigger));
  }
  return out;
}

std::string timeseries_csv(const Trajectory& trajectory) {
  std::string out = "iteration,diversity_index,culture_count,region_count\n";
  for (const auto& s : trajectory.samples) {
    out += std::to_string(s.iteration) + "," + format_double(s.diversity_index) + "," +
           std::to_string(s.culture_count) + "," + std::to_string(s.region_count) + "\n";
  }
  return out;
}

std::string summary_json(const ExperimentSummary& summary) {
  json config = json::object();
  for (const auto& key : config_keys()) config[key] = config_value(summary.config, key);
  json products = json::array();
  for (const auto& p : summary.products) products.push_back(product_json(p));
  json runs = json::array();
  for (const auto& r : summary.runs) runs.push_back(run_json(r));
  json aggregates = json::array();
  for (const auto& a : summary.aggregates) {
    aggregates.push_back({{"name", a.name}, {"count", a.count}, {"mean", a.mean}, {"sd", a.sd}});
  }
  json doc{{"config", std::move(config)},
           {"products", std::move(products)},
           {"runs", std::move(runs)},
           {"aggregates", std::move(aggregates)}};
  return doc.dump(2) + "\n";
}

ExperimentSummary parse_summary(std::string_view text) {
  const json doc = json::parse(text);
  ExperimentSummary s;
  for (const auto& [key, value] : doc.at("config").items()) {
    apply_setting(s.config, key, value.get<std::string>());
  }
  for (const auto& p : doc.at("products")) {
    s.products.emplace_back(p.at("id").get<int>(),
                            Position{p.at("row").get<int>(), p.at("col").get<int>()},
                            p.at("tasks").get<TaskSequence>());
  }
  for (const auto& r : doc.at("runs")) {
    RunRecord rec;
    rec.seed = r.at("seed").get<std::uint64_t>();
    rec.iterations = r.at("iterations").get<std::size_t>();
    rec.absorbed = r.at("absorbed").get<bool>();
    rec.diversity_index = r.at("diversity_index").get<double>();
    rec.culture_count = r.at("culture_count").get<std::size_t>();
    rec.region_count = r.at("region_count").get<std::size_t>();
    rec.mobility_index = r.at("mobility_index").get<double>();
    rec.completion_rate = r.at("completion_rate").get<double>();
    for (const auto& t : r.at("traversals")) {
      TraversalRecord tr;
      tr.label = t.at("label").get<std::string>();
      if (!t.at("trigger").is_null()) tr.trigger = t.at("trigger").get<double>();
      tr.iteration = t.at("iteration").get<std::size_t>();
      tr.diversity_index = t.at("diversity_index").get<double>();
      tr.culture_count = t.at("culture_count").get<std::size_t>();
      tr.region_count = t.at("region_count").get<std::size_t>();
      tr.mobility_index = t.at("mobility_index").get<double>();
      tr.completion_rate = t.at("completion_rate").get<double>();
      for (const auto& p : t.at("products")) {
        tr.products.push_back({p.at("id").get<int>(), p.at("completed_first_two").get<int>(),
                               p.at("completed_total").get<int>(), p.at("relocations").get<int>(),
                               p.at("blocked").get<bool>()});
      }
      rec.traversals.push_back(std::move(tr));
    }
    s.runs.push_back(std::move(rec));
  }
  for (const auto& a : doc.at("aggregates")) {
    s.aggregates.push_back({a.at("name").get<std::string>(), a.at("count").get<std::size_t>(),
                            a.at("mean").get<double>(), a.at("sd").get<double>()});
  }
  if (compute_aggregates(s.config, s.runs) != s.aggregates) {
    throw std::runtime_error("summary: aggregates do not match the per-run records");
  }
  return s;
}

ExperimentSummary run_experiment(const SimConfig& config, int jobs) {
  validate(config);
  const fs::path root(config.output);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec || !fs::is_directory(root)) {
    throw std::runtime_error("cannot create output directory " + root.string());
  }

  std::vector<std::optional<RunResult>> results(config.replications);
  parallel_for(config.replications, jobs, [&](std::size_t i) {
    const std::uint64_t seed = config.seed + i;
    try {
      results[i].emplace(run_once(config, seed));
    } catch (const std::exception& e) {
      throw std::runtime_error("run with seed " + std::to_string(seed) + ": " + e.what());
    }
  });

  const bool renderable = config.features <= kMaxRenderFeatures;
  ExperimentSummary summary{config, results.front()->products, {}, {}};
  for (const auto& slot : results) {
    const RunResult& result = *slot;
    const Trajectory& traj = result.trajectory;
    const fs::path dir = root / ("seed_" + std::to_string(result.record.seed));
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir.string());
    write_file(dir / "timeseries.csv", timeseries_csv(traj));
    save_lattice(traj.final_lattice, dir / "final.lattice");
    if (renderable) {
      write_file(dir / "final.txt", render_text(traj.final_lattice));
      write_file(dir / "final.ppm", render_ppm(traj.final_lattice, result.final_report.products));
    }
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
      const auto& snap = traj.snapshots[k];
      const std::string stem = "snapshot_" + trigger_label(snap.trigger);
      save_lattice(snap.lattice, dir / (stem + ".lattice"));
      if (renderable) {
        write_file(dir / (stem + ".ppm"),
                   render_ppm(snap.lattice, result.snapshot_reports[k].products));
      }
    }
    summary.runs.push_back(result.record);
  }
  summary.aggregates = compute_aggregates(config, summary.runs);
  write_file(root / "summary.json", summary_json(summary));
  return summary;
}

SweepResult sweep(const SimConfig& base, const std::vector<SweepAxis>& grid,
                  std::size_t replications, int jobs) {
  if (replications < 1) throw ConfigError("replications", 0, "must be >= 1");
  SweepResult result;
  std::size_t cells = 1;
  for (const auto& [key, values] : grid) {
    if (values.empty()) throw ConfigError(key, 0, "sweep axis has no values");
    result.axes.push_back(key);
    cells *= values.size();
  }

  std::vector<SimConfig> configs;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    SimConfig config = base;
    std::vector<std::string> values(grid.size());
    std::size_t rest = cell;
    for (std::size_t a = grid.size(); a-- > 0;) {
      const auto& axis_values = grid[a].second;
      values[a] = axis_values[rest % axis_values.size()];
      rest /= axis_values.size();
    }
    for (std::size_t a = 0; a < grid.size(); ++a) apply_setting(config, grid[a].first, values[a]);
    validate(config);
    configs.push_back(std::move(config));
    result.cell_values.push_back(std::move(values));
  }

  result.rows.resize(cells * replications);
  parallel_for(result.rows.size(), jobs, [&](std::size_t i) {
    const std::size_t cell = i / replications;
    const std::size_t rep = i % replications;
    SweepRow& row = result.rows[i];
    row.cell = cell;
    row.values = result.cell_values[cell];
    row.replication = rep;
    row.record = run_once(configs[cell], base.seed + rep).record;
  });

  for (std::size_t cell = 0; cell < cells; ++cell) {
    std::vector<RunRecord> runs;
    for (std::size_t rep = 0; rep < replications; ++rep) {
      runs.push_back(result.rows[cell * replications + rep].record);
    }
    result.cell_aggregates.push_back(compute_aggregates(configs[cell], runs));
  }
  return result;
}

std::string sweep_csv(const SweepResult& result) {
  static const char* kMetrics[] = {"diversity_index", "culture_count", "region_count",
                                   "mobility_index", "completion_rate"};
  std::ostringstream out;
  out << "kind,cell";
  for (const auto& axis : result.axes) out << ',' << axis;
  out << ",replication,seed,iterations,absorbed";
  for (const char* m : kMetrics) out << ',' << m << ',' << m << "_sd";
  out << '\n';

  auto values = [&](const std::vector<std::string>& v) {
    for (const auto& s : v) out << ',' << s;
  };
  for (const auto& row : result.rows) {
    const RunRecord& r = row.record;
    out << "run," << row.cell;
    values(row.values);
    out << ',' << row.replication << ',' << r.seed << ',' << r.iterations << ','
        << (r.absorbed ? 1 : 0) << ',' << format_double(r.diversity_index) << ",," << r.culture_count
        << ",," << r.region_count << ",," << format_double(r.mobility_index) << ",,"
        << format_double(r.completion_rate) << ",\n";
  }
  for (std::size_t cell = 0; cell < result.cell_aggregates.size(); ++cell) {
    const auto& aggs = result.cell_aggregates[cell];
    auto find = [&](std::string_view name) -> const Aggregate& {
      for (const auto& a : aggs) {
        if (a.name == name) return a;
      }
      throw std::logic_error("missing aggregate");
    };
    out << "aggregate," << cell;
    values(result.cell_values[cell]);
    out << ",,," << format_double(find("iterations").mean) << ','
        << format_double(find("absorbed").mean);
    for (const char* m : kMetrics) {
      const Aggregate& a = find(m);
      out << ',' << format_double(a.mean) << ',' << format_double(a.sd);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace culturefms
