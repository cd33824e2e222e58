#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "culturefms/config.hpp"
#include "culturefms/dissemination.hpp"
#include "culturefms/errors.hpp"
#include "culturefms/experiment.hpp"
#include "culturefms/lattice.hpp"
#include "culturefms/lattice_io.hpp"
#include "culturefms/metrics.hpp"
#include "culturefms/render.hpp"
#include "culturefms/rng.hpp"
#include "culturefms/routing.hpp"

namespace py = pybind11;
namespace cf = culturefms;

// Positions cross the boundary as (row, col) tuples and culture vectors as
// lists of ints, so Python callers never handle wrapper objects for either.
namespace pybind11::detail {

template <>
struct type_caster<cf::Position> {
  PYBIND11_TYPE_CASTER(cf::Position, const_name("tuple[int, int]"));

  bool load(handle src, bool convert) {
    if (!isinstance<sequence>(src) || isinstance<str>(src)) return false;
    auto seq = reinterpret_borrow<sequence>(src);
    if (seq.size() != 2) return false;
    make_caster<int> row, col;
    if (!row.load(seq[0], convert) || !col.load(seq[1], convert)) return false;
    value = {cast_op<int>(row), cast_op<int>(col)};
    return true;
  }

  static handle cast(const cf::Position& p, return_value_policy, handle) {
    return make_tuple(p.row, p.col).release();
  }
};

template <>
struct type_caster<cf::CultureVector> {
  PYBIND11_TYPE_CASTER(cf::CultureVector, const_name("list[int]"));

  bool load(handle src, bool convert) {
    make_caster<std::vector<int>> traits;
    if (!traits.load(src, convert)) return false;
    value = cf::CultureVector(cast_op<std::vector<int>&&>(std::move(traits)));
    return true;
  }

  static handle cast(const cf::CultureVector& v, return_value_policy, handle) {
    list out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
    return out.release();
  }
};

}  // namespace pybind11::detail

namespace {

cf::Topology topology(cf::Neighborhood n, cf::Boundary b) { return {n, b}; }

std::vector<cf::CultureVector> cells_of(const cf::Lattice& lattice) {
  auto cells = lattice.cells();
  return {cells.begin(), cells.end()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cultural dissemination on a resource lattice with product routing";

  py::register_exception<cf::ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<cf::RenderError>(m, "RenderError", PyExc_RuntimeError);
  py::exception<cf::ConfigError>(m, "ConfigError", PyExc_ValueError);
  // Registered last so it runs first; attaches .key and .line to the instance.
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const cf::ConfigError& e) {
      py::object cls = py::module_::import("culturefms._core").attr("ConfigError");
      py::object inst = cls(e.what());
      inst.attr("key") = e.key();
      inst.attr("line") = e.line();
      PyErr_SetObject(cls.ptr(), inst.ptr());
    }
  });

  m.attr("PRODUCT_STREAM_SALT") = cf::kProductStreamSalt;
  m.attr("MAX_RENDER_FEATURES") = cf::kMaxRenderFeatures;

  // rng
  py::class_<cf::RandomStream>(m, "RandomStream")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def_property_readonly("seed", &cf::RandomStream::seed)
      .def("next_u64", &cf::RandomStream::next_u64)
      .def("uniform_int", &cf::RandomStream::uniform_int, py::arg("n"))
      .def("uniform_real", &cf::RandomStream::uniform_real)
      .def("__eq__", [](const cf::RandomStream& a, const cf::RandomStream& b) { return a == b; });

  // lattice
  py::enum_<cf::Neighborhood>(m, "Neighborhood")
      .value("VON_NEUMANN", cf::Neighborhood::VonNeumann4)
      .value("MOORE", cf::Neighborhood::Moore8);
  py::enum_<cf::Boundary>(m, "Boundary")
      .value("BOUNDED", cf::Boundary::Bounded)
      .value("TORUS", cf::Boundary::Torus);

  m.def("similarity", &cf::similarity, py::arg("a"), py::arg("b"));
  m.def("matching_features", &cf::matching_features, py::arg("a"), py::arg("b"));

  const auto vn = cf::Neighborhood::VonNeumann4;
  const auto bounded = cf::Boundary::Bounded;

  py::class_<cf::Lattice>(m, "Lattice")
      .def(py::init([](int w, int h, int f, int t, std::vector<cf::CultureVector> cells,
                       cf::Neighborhood n, cf::Boundary b) {
             return cf::Lattice(w, h, f, t, std::move(cells), topology(n, b));
           }),
           py::arg("width"), py::arg("height"), py::arg("features"), py::arg("traits"),
           py::arg("cells"), py::arg("neighborhood") = vn, py::arg("boundary") = bounded)
      .def_static(
          "uniform",
          [](int w, int h, int t, const cf::CultureVector& v, cf::Neighborhood n, cf::Boundary b) {
            return cf::Lattice::uniform(w, h, t, v, topology(n, b));
          },
          py::arg("width"), py::arg("height"), py::arg("traits"), py::arg("value"),
          py::arg("neighborhood") = vn, py::arg("boundary") = bounded)
      .def_static(
          "random",
          [](int w, int h, int f, int t, cf::RandomStream& rng, cf::Neighborhood n,
             cf::Boundary b) { return cf::random_lattice(w, h, f, t, rng, topology(n, b)); },
          py::arg("width"), py::arg("height"), py::arg("features"), py::arg("traits"),
          py::arg("rng"), py::arg("neighborhood") = vn, py::arg("boundary") = bounded)
      .def_static(
          "parse",
          [](const std::string& text, cf::Neighborhood n, cf::Boundary b) {
            return cf::parse_lattice(text, topology(n, b));
          },
          py::arg("text"), py::arg("neighborhood") = vn, py::arg("boundary") = bounded)
      .def("format", &cf::format_lattice)
      .def_property_readonly("width", &cf::Lattice::width)
      .def_property_readonly("height", &cf::Lattice::height)
      .def_property_readonly("features", &cf::Lattice::features)
      .def_property_readonly("traits", &cf::Lattice::traits)
      .def_property_readonly("neighborhood",
                             [](const cf::Lattice& l) { return l.topology().neighborhood; })
      .def_property_readonly("boundary", [](const cf::Lattice& l) { return l.topology().boundary; })
      .def_property_readonly("ordered_pair_count", &cf::Lattice::ordered_pair_count)
      .def("__len__", &cf::Lattice::size)
      .def("contains", &cf::Lattice::contains, py::arg("position"))
      .def("index_of", &cf::Lattice::index_of, py::arg("position"))
      .def("position_of", &cf::Lattice::position_of, py::arg("index"))
      .def("__getitem__", [](const cf::Lattice& l, cf::Position p) { return l.at(p); })
      .def("__setitem__", &cf::Lattice::set)
      .def("cells", &cells_of)
      .def("neighbors", &cf::neighbors, py::arg("position"))
      .def(
          "with_topology",
          [](const cf::Lattice& l, cf::Neighborhood n, cf::Boundary b) {
            return l.with_topology(topology(n, b));
          },
          py::arg("neighborhood") = vn, py::arg("boundary") = bounded)
      .def("copy", [](const cf::Lattice& l) { return cf::Lattice(l); })
      .def("__eq__", [](const cf::Lattice& a, const cf::Lattice& b) { return a == b; })
      .def("__repr__", [](const cf::Lattice& l) {
        return "<Lattice " + std::to_string(l.width()) + "x" + std::to_string(l.height()) +
               " F=" + std::to_string(l.features()) + " T=" + std::to_string(l.traits()) + ">";
      });

  m.def("neighbors", &cf::neighbors, py::arg("lattice"), py::arg("position"));

  // metrics
  py::class_<cf::MetricsSample>(m, "MetricsSample")
      .def_readonly("iteration", &cf::MetricsSample::iteration)
      .def_readonly("diversity_index", &cf::MetricsSample::diversity_index)
      .def_readonly("culture_count", &cf::MetricsSample::culture_count)
      .def_readonly("region_count", &cf::MetricsSample::region_count);

  m.def("diversity_index", &cf::diversity_index, py::arg("lattice"));
  m.def("culture_count", &cf::culture_count, py::arg("lattice"));
  m.def("region_count", &cf::region_count, py::arg("lattice"));
  m.def("measure", &cf::measure, py::arg("lattice"), py::arg("iteration") = 0);

  // dissemination
  py::enum_<cf::RuleMode>(m, "RuleMode")
      .value("CLASSIC", cf::RuleMode::Classic)
      .value("EXTENDED", cf::RuleMode::Extended);
  py::enum_<cf::ProbabilityMode>(m, "ProbabilityMode")
      .value("SIMILARITY", cf::ProbabilityMode::SimilarityCoupled)
      .value("CONSTANT", cf::ProbabilityMode::Constant);

  py::class_<cf::DisseminationRule>(m, "DisseminationRule")
      .def(py::init<>())
      .def_static("classic", &cf::DisseminationRule::classic)
      .def_static("extended", &cf::DisseminationRule::extended, py::arg("threshold") = 0.5)
      .def_readwrite("mode", &cf::DisseminationRule::mode)
      .def_readwrite("threshold", &cf::DisseminationRule::threshold)
      .def_readwrite("probability", &cf::DisseminationRule::probability)
      .def_readwrite("constant_probability", &cf::DisseminationRule::constant_probability)
      .def("validate", &cf::DisseminationRule::validate)
      .def("copy_probability", &cf::DisseminationRule::copy_probability, py::arg("similarity"))
      .def("__eq__",
           [](const cf::DisseminationRule& a, const cf::DisseminationRule& b) { return a == b; });

  py::class_<cf::StepOutcome>(m, "StepOutcome")
      .def_readonly("active", &cf::StepOutcome::active)
      .def_readonly("partner", &cf::StepOutcome::partner)
      .def_readonly("similarity_before", &cf::StepOutcome::similarity_before)
      .def_readonly("changed", &cf::StepOutcome::changed)
      .def_readonly("feature_copied", &cf::StepOutcome::feature_copied)
      .def_readonly("previous_trait", &cf::StepOutcome::previous_trait);

  m.def("interact", &cf::interact, py::arg("lattice"), py::arg("active"), py::arg("partner"),
        py::arg("rule"), py::arg("probability_draw"), py::arg("rng"));
  m.def("step", &cf::step, py::arg("lattice"), py::arg("rule"), py::arg("rng"));
  m.def("classic_step", &cf::classic_step, py::arg("lattice"), py::arg("rule"), py::arg("rng"));
  m.def("extended_step", &cf::extended_step, py::arg("lattice"), py::arg("rule"), py::arg("rng"));
  m.def("is_absorbing", &cf::is_absorbing, py::arg("lattice"), py::arg("rule"));

  py::class_<cf::RunOptions>(m, "RunOptions")
      .def(py::init<>())
      .def_readwrite("max_iterations", &cf::RunOptions::max_iterations)
      .def_readwrite("sample_every", &cf::RunOptions::sample_every)
      .def_readwrite("snapshot_triggers", &cf::RunOptions::snapshot_triggers)
      .def_readwrite("absorb_check_every", &cf::RunOptions::absorb_check_every);

  py::class_<cf::Snapshot>(m, "Snapshot")
      .def_readonly("trigger", &cf::Snapshot::trigger)
      .def_readonly("iteration", &cf::Snapshot::iteration)
      .def_readonly("diversity_index", &cf::Snapshot::diversity_index)
      .def_readonly("lattice", &cf::Snapshot::lattice);

  py::class_<cf::Trajectory>(m, "Trajectory")
      .def_readonly("rule", &cf::Trajectory::rule)
      .def_readonly("options", &cf::Trajectory::options)
      .def_readonly("seed", &cf::Trajectory::seed)
      .def_readonly("samples", &cf::Trajectory::samples)
      .def_readonly("snapshots", &cf::Trajectory::snapshots)
      .def_readonly("final_lattice", &cf::Trajectory::final_lattice)
      .def_readonly("iterations_run", &cf::Trajectory::iterations_run)
      .def_readonly("absorbed", &cf::Trajectory::absorbed)
      .def("timeseries_csv", &cf::timeseries_csv);

  m.def("run", &cf::run, py::arg("lattice"), py::arg("rule"), py::arg("options"), py::arg("rng"),
        py::call_guard<py::gil_scoped_release>());

  // routing
  py::enum_<cf::ProductStatus>(m, "ProductStatus")
      .value("ACTIVE", cf::ProductStatus::Active)
      .value("COMPLETED", cf::ProductStatus::Completed)
      .value("BLOCKED", cf::ProductStatus::Blocked);
  py::enum_<cf::DistanceMetric>(m, "DistanceMetric")
      .value("MANHATTAN", cf::DistanceMetric::Manhattan)
      .value("EUCLIDEAN", cf::DistanceMetric::Euclidean);

  py::class_<cf::Visit>(m, "Visit")
      .def_readonly("task", &cf::Visit::task)
      .def_readonly("position", &cf::Visit::position)
      .def_readonly("moved", &cf::Visit::moved);

  py::class_<cf::Product>(m, "Product")
      .def(py::init<int, cf::Position, cf::TaskSequence>(), py::arg("id"), py::arg("position"),
           py::arg("tasks"))
      .def_readwrite("id", &cf::Product::id)
      .def_readwrite("position", &cf::Product::position)
      .def_readwrite("tasks", &cf::Product::tasks)
      .def_readwrite("next_task", &cf::Product::next_task)
      .def_readwrite("status", &cf::Product::status)
      .def_readonly("visit_log", &cf::Product::visit_log)
      .def("__eq__", [](const cf::Product& a, const cf::Product& b) { return a == b; });

  py::class_<cf::ProductRecord>(m, "ProductRecord")
      .def_readonly("id", &cf::ProductRecord::id)
      .def_readonly("completed_first_two", &cf::ProductRecord::completed_first_two)
      .def_readonly("completed_total", &cf::ProductRecord::completed_total)
      .def_readonly("relocations", &cf::ProductRecord::relocations)
      .def_readonly("blocked", &cf::ProductRecord::blocked);

  py::class_<cf::TraversalReport>(m, "TraversalReport")
      .def_readonly("products", &cf::TraversalReport::products)
      .def_readonly("records", &cf::TraversalReport::records)
      .def_readonly("mobility_index", &cf::TraversalReport::mobility_index)
      .def_readonly("completion_rate", &cf::TraversalReport::completion_rate);

  m.def(
      "match_predicate",
      [](std::size_t task, const std::vector<int>& tasks, const cf::CultureVector& resource) {
        return cf::match_predicate(task, tasks, resource);
      },
      py::arg("task_index"), py::arg("tasks"), py::arg("resource"));
  m.def(
      "find_nearest_resource",
      [](const cf::Lattice& l, cf::Position from, std::size_t task, const std::vector<int>& tasks,
         cf::DistanceMetric metric) { return cf::find_nearest_resource(l, from, task, tasks, metric); },
      py::arg("lattice"), py::arg("start"), py::arg("task_index"), py::arg("tasks"),
      py::arg("metric") = cf::DistanceMetric::Manhattan);
  m.def("traverse", &cf::traverse, py::arg("lattice"), py::arg("products"),
        py::arg("metric") = cf::DistanceMetric::Manhattan);
  m.def(
      "mobility_index",
      [](const std::vector<cf::ProductRecord>& records) { return cf::mobility_index(records); },
      py::arg("records"));
  m.def("center_of", &cf::center_of, py::arg("lattice"));

  // rendering
  m.def("render_text", &cf::render_text, py::arg("lattice"));
  m.def(
      "render_ppm",
      [](const cf::Lattice& l, const std::vector<cf::Product>& products, int cell_px) {
        return py::bytes(cf::render_ppm(l, products, cell_px));
      },
      py::arg("lattice"), py::arg("products") = std::vector<cf::Product>{},
      py::arg("cell_px") = 12);

  // configuration and experiments
  py::enum_<cf::Placement>(m, "Placement")
      .value("CENTER", cf::Placement::Center)
      .value("RANDOM", cf::Placement::Random)
      .value("EXPLICIT", cf::Placement::Explicit);

  py::class_<cf::SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_static("from_text", [](const std::string& text) { return cf::load_config_text(text); },
                  py::arg("text"))
      .def_static("load", [](const std::string& path) { return cf::load_config(path); },
                  py::arg("path"))
      .def_static("keys", &cf::config_keys)
      .def("to_text", &cf::serialize_config)
      .def("get", [](const cf::SimConfig& c, const std::string& key) { return cf::config_value(c, key); },
           py::arg("key"))
      .def("set",
           [](cf::SimConfig& c, const std::string& key, const std::string& value) {
             cf::apply_setting(c, key, value);
           },
           py::arg("key"), py::arg("value"))
      .def("validate", [](const cf::SimConfig& c) { cf::validate(c); })
      .def("run_options", &cf::SimConfig::run_options)
      .def_readwrite("width", &cf::SimConfig::width)
      .def_readwrite("height", &cf::SimConfig::height)
      .def_readwrite("features", &cf::SimConfig::features)
      .def_readwrite("traits", &cf::SimConfig::traits)
      .def_readwrite("rule", &cf::SimConfig::rule)
      .def_readwrite("seed", &cf::SimConfig::seed)
      .def_readwrite("products", &cf::SimConfig::products)
      .def_readwrite("replications", &cf::SimConfig::replications)
      .def_readwrite("output", &cf::SimConfig::output)
      .def("__eq__", [](const cf::SimConfig& a, const cf::SimConfig& b) { return a == b; });

  m.def("make_products", &cf::make_products, py::arg("config"), py::arg("rng"));

  py::class_<cf::TraversalRecord>(m, "TraversalRecord")
      .def_readonly("label", &cf::TraversalRecord::label)
      .def_readonly("trigger", &cf::TraversalRecord::trigger)
      .def_readonly("iteration", &cf::TraversalRecord::iteration)
      .def_readonly("diversity_index", &cf::TraversalRecord::diversity_index)
      .def_readonly("culture_count", &cf::TraversalRecord::culture_count)
      .def_readonly("region_count", &cf::TraversalRecord::region_count)
      .def_readonly("mobility_index", &cf::TraversalRecord::mobility_index)
      .def_readonly("completion_rate", &cf::TraversalRecord::completion_rate)
      .def_readonly("products", &cf::TraversalRecord::products);

  py::class_<cf::RunRecord>(m, "RunRecord")
      .def_readonly("seed", &cf::RunRecord::seed)
      .def_readonly("iterations", &cf::RunRecord::iterations)
      .def_readonly("absorbed", &cf::RunRecord::absorbed)
      .def_readonly("diversity_index", &cf::RunRecord::diversity_index)
      .def_readonly("culture_count", &cf::RunRecord::culture_count)
      .def_readonly("region_count", &cf::RunRecord::region_count)
      .def_readonly("mobility_index", &cf::RunRecord::mobility_index)
      .def_readonly("completion_rate", &cf::RunRecord::completion_rate)
      .def_readonly("traversals", &cf::RunRecord::traversals);

  py::class_<cf::Aggregate>(m, "Aggregate")
      .def_readonly("name", &cf::Aggregate::name)
      .def_readonly("count", &cf::Aggregate::count)
      .def_readonly("mean", &cf::Aggregate::mean)
      .def_readonly("sd", &cf::Aggregate::sd);

  py::class_<cf::RunResult>(m, "RunResult")
      .def_readonly("trajectory", &cf::RunResult::trajectory)
      .def_readonly("products", &cf::RunResult::products)
      .def_readonly("snapshot_reports", &cf::RunResult::snapshot_reports)
      .def_readonly("final_report", &cf::RunResult::final_report)
      .def_readonly("record", &cf::RunResult::record);

  py::class_<cf::ExperimentSummary>(m, "ExperimentSummary")
      .def_readonly("config", &cf::ExperimentSummary::config)
      .def_readonly("products", &cf::ExperimentSummary::products)
      .def_readonly("runs", &cf::ExperimentSummary::runs)
      .def_readonly("aggregates", &cf::ExperimentSummary::aggregates)
      .def("to_json", &cf::summary_json)
      .def_static("parse", [](const std::string& json) { return cf::parse_summary(json); },
                  py::arg("json"));

  py::class_<cf::SweepResult>(m, "SweepResult")
      .def_readonly("axes", &cf::SweepResult::axes)
      .def_readonly("cell_values", &cf::SweepResult::cell_values)
      .def_readonly("cell_aggregates", &cf::SweepResult::cell_aggregates)
      .def("to_csv", &cf::sweep_csv);

  m.def("run_once", &cf::run_once, py::arg("config"), py::arg("seed"),
        py::call_guard<py::gil_scoped_release>());
  m.def("run_experiment", &cf::run_experiment, py::arg("config"), py::arg("jobs") = 1,
        py::call_guard<py::gil_scoped_release>());
  m.def("sweep", &cf::sweep, py::arg("config"), py::arg("grid"), py::arg("replications"),
        py::arg("jobs") = 1, py::call_guard<py::gil_scoped_release>());
}
