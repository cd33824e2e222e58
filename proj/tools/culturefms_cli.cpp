// culturefms: evolve resource lattices and route products over them.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "culturefms/config.hpp"
#include "culturefms/errors.hpp"
#include "culturefms/experiment.hpp"
#include "culturefms/lattice_io.hpp"
#include "culturefms/metrics.hpp"
#include "culturefms/render.hpp"

namespace fs = std::filesystem;
using namespace culturefms;

namespace {

struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Config file (key: value lines)");
    for (const auto& key : config_keys()) {
      cmd->add_option("--" + key, values[key], "Override `" + key + "`");
    }
  }

  SimConfig resolve(const CLI::App* cmd) const {
    SimConfig config;
    KeyLines lines;
    if (!config_path.empty()) lines = merge_config_text(config, read_text_file(config_path));
    for (const auto& key : config_keys()) {
      if (cmd->count("--" + key) > 0) {
        apply_setting(config, key, values.at(key));
        lines.erase(key);
      }
    }
    validate(config, lines);
    return config;
  }
};

std::vector<SweepAxis> parse_grid(const std::vector<std::string>& specs) {
  std::vector<SweepAxis> grid;
  for (const auto& spec : specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("", 0, "grid axis '" + spec + "' is not key=v1,v2,...");
    }
    SweepAxis axis{spec.substr(0, eq), {}};
    std::string rest = spec.substr(eq + 1);
    std::size_t start = 0;
    for (;;) {
      const auto comma = rest.find(',', start);
      axis.second.push_back(rest.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    grid.push_back(std::move(axis));
  }
  return grid;
}

nlohmann::ordered_json report_json(const TraversalReport& report) {
  nlohmann::ordered_json products = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < report.products.size(); ++i) {
    const Product& p = report.products[i];
    const ProductRecord& r = report.records[i];
    nlohmann::ordered_json visits = nlohmann::ordered_json::array();
    for (const auto& v : p.visit_log) {
      visits.push_back({{"task", v.task}, {"row", v.position.row}, {"col", v.position.col},
                        {"moved", v.moved}});
    }
    products.push_back({{"id", p.id},
                        {"tasks", p.tasks},
                        {"status", std::string(to_string(p.status))},
                        {"row", p.position.row},
                        {"col", p.position.col},
                        {"completed_first_two", r.completed_first_two},
                        {"completed_total", r.completed_total},
                        {"relocations", r.relocations},
                        {"visits", std::move(visits)}});
  }
  return {{"mobility_index", report.mobility_index},
          {"completion_rate", report.completion_rate},
          {"products", std::move(products)}};
}

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_file(path, text);
  }
}

int cmd_evolve(const SimConfig& config) {
  RandomStream rng(config.seed);
  Lattice lattice = random_lattice(config.width, config.height, config.features, config.traits,
                                   rng, config.topology);
  const Trajectory traj = run(std::move(lattice), config.rule, config.run_options(), rng);
  const fs::path out(config.output);
  fs::create_directories(out);
  write_file(out / "timeseries.csv", timeseries_csv(traj));
  save_lattice(traj.final_lattice, out / "final.lattice");
  for (const auto& snap : traj.snapshots) {
    char name[64];
    std::snprintf(name, sizeof name, "snapshot_%g.lattice", snap.trigger);
    save_lattice(snap.lattice, out / name);
  }
  const MetricsSample& last = traj.samples.back();
  std::cout << "iterations " << traj.iterations_run << " absorbed " << (traj.absorbed ? 1 : 0)
            << " diversity_index " << last.diversity_index << " culture_count "
            << last.culture_count << " region_count " << last.region_count << " snapshots "
            << traj.snapshots.size() << "\n";
  return 0;
}

int cmd_traverse(const SimConfig& config, const std::string& lattice_path,
                 const std::string& json_path, const std::string& ppm_path) {
  const Lattice lattice = load_lattice(lattice_path, config.topology);
  SimConfig sized = config;
  sized.width = lattice.width();
  sized.height = lattice.height();
  sized.features = lattice.features();
  sized.traits = lattice.traits();
  validate(sized);
  RandomStream product_rng(config.seed ^ kProductStreamSalt);
  const TraversalReport report =
      traverse(lattice, make_products(sized, product_rng), config.distance);
  write_or_print(json_path, report_json(report).dump(2) + "\n");
  if (!ppm_path.empty()) write_file(ppm_path, render_ppm(lattice, report.products));
  return 0;
}

int cmd_render(const SimConfig& config, const std::string& lattice_path,
               const std::string& ppm_path, bool with_products, int cell_px) {
  const Lattice lattice = load_lattice(lattice_path, config.topology);
  std::cout << render_text(lattice);
  if (!ppm_path.empty()) {
    std::vector<Product> products;
    if (with_products) {
      SimConfig sized = config;
      sized.width = lattice.width();
      sized.height = lattice.height();
      sized.features = lattice.features();
      sized.traits = lattice.traits();
      validate(sized);
      RandomStream product_rng(config.seed ^ kProductStreamSalt);
      products = traverse(lattice, make_products(sized, product_rng), config.distance).products;
    }
    write_file(ppm_path, render_ppm(lattice, products, cell_px));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cultural dissemination on a resource lattice with product routing"};
  app.require_subcommand(1);

  ConfigFlags evolve_flags, traverse_flags, experiment_flags, sweep_flags, render_flags;
  int jobs = 1;

  auto* evolve = app.add_subcommand("evolve", "Evolve a random lattice and write its time series");
  evolve_flags.attach(evolve);

  std::string lattice_path, json_path, ppm_path;
  auto* trav = app.add_subcommand("traverse", "Route products over a saved lattice");
  traverse_flags.attach(trav);
  trav->add_option("--lattice", lattice_path, "Lattice file")->required();
  trav->add_option("--json", json_path, "Write the report here instead of stdout");
  trav->add_option("--ppm", ppm_path, "Also render the lattice with products");

  auto* experiment = app.add_subcommand("experiment", "Evolve, snapshot, traverse and summarize");
  experiment_flags.attach(experiment);
  experiment->add_option("--jobs", jobs, "Parallel replications")->check(CLI::PositiveNumber);

  std::vector<std::string> grid_specs;
  std::string sweep_out;
  auto* sw = app.add_subcommand("sweep", "Cartesian parameter sweep with replications");
  sweep_flags.attach(sw);
  sw->add_option("--grid", grid_specs, "Axis as key=v1,v2,... (repeatable)");
  sw->add_option("--out", sweep_out, "CSV path (default <output>/sweep.csv)");
  sw->add_option("--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);

  bool with_products = false;
  int cell_px = 12;
  auto* rend = app.add_subcommand("render", "Print a saved lattice and optionally write a P6 pixmap");
  render_flags.attach(rend);
  rend->add_option("--lattice", lattice_path, "Lattice file")->required();
  rend->add_option("--ppm", ppm_path, "Pixmap output path");
  rend->add_flag("--overlay", with_products, "Route products and draw them on the pixmap");
  rend->add_option("--cell-px", cell_px, "Pixels per cell")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (evolve->parsed()) return cmd_evolve(evolve_flags.resolve(evolve));
    if (trav->parsed()) {
      return cmd_traverse(traverse_flags.resolve(trav), lattice_path, json_path, ppm_path);
    }
    if (experiment->parsed()) {
      const SimConfig config = experiment_flags.resolve(experiment);
      const ExperimentSummary summary = run_experiment(config, jobs);
      for (const auto& a : summary.aggregates) {
        std::cout << a.name << " mean " << a.mean << " sd " << a.sd << " n " << a.count << "\n";
      }
      return 0;
    }
    if (sw->parsed()) {
      const SimConfig config = sweep_flags.resolve(sw);
      const SweepResult result = sweep(config, parse_grid(grid_specs), config.replications, jobs);
      const fs::path out = sweep_out.empty() ? fs::path(config.output) / "sweep.csv" : fs::path(sweep_out);
      if (out.has_parent_path()) fs::create_directories(out.parent_path());
      write_file(out, sweep_csv(result));
      std::cout << "wrote " << result.rows.size() << " runs to " << out.string() << "\n";
      return 0;
    }
    if (rend->parsed()) {
      return cmd_render(render_flags.resolve(rend), lattice_path, ppm_path, with_products, cell_px);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
