#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "rangewalk/cut_structure.hpp"
#include "rangewalk/pipeline.hpp"
#include "rangewalk/range_walker.hpp"
#include "rangewalk/resistance_metrics.hpp"
#include "rangewalk/scaling_lab.hpp"

namespace py = pybind11;
using namespace rangewalk;

namespace {

Trajectory fixed_path(const std::vector<std::vector<std::int64_t>>& points) {
  std::vector<LatticePoint> v;
  v.reserve(points.size());
  for (const auto& p : points) v.push_back({p});
  return load_fixed_path(v);
}

py::array_t<std::int64_t> trajectory_points(const Trajectory& t) {
  py::array_t<std::int64_t> out({static_cast<py::ssize_t>(t.horizon() + 1), static_cast<py::ssize_t>(t.dimension())});
  auto a = out.mutable_unchecked<2>();
  t.for_each_point([&](Time k, std::span<const std::int64_t> x) {
    for (int i = 0; i < t.dimension(); ++i) a(k, i) = x[i];
  });
  return out;
}

py::dict profile_dict(const MetricProfile& p) {
  py::dict d;
  d["grid"] = p.grid;
  d["resistance"] = p.resistance;
  d["distance"] = p.distance;
  d["past_max_resistance"] = p.past_max_resistance;
  d["past_max_distance"] = p.past_max_distance;
  d["provisional"] = p.provisional;
  return d;
}

py::dict estimate_dict(const ScalarEstimate& e) {
  py::dict d;
  d["value"] = e.value;
  d["standard_error"] = e.standard_error;
  d["lower"] = e.lower;
  d["upper"] = e.upper;
  d["samples"] = e.samples;
  return d;
}

SolverOptions solver(const std::string& name) {
  SolverOptions o;
  o.method = parse_solver_method(name);
  return o;
}

ExperimentConfig config_from(const std::string& text) {
  std::istringstream in(text);
  return ExperimentConfig::parse(in);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Random walk on the range of a random walk: core bindings.";
  m.attr("__version__") = RANGEWALK_VERSION;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<CacheError>(m, "CacheError", PyExc_RuntimeError);
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);

  py::class_<Trajectory>(m, "Trajectory")
      .def_property_readonly("dimension", &Trajectory::dimension)
      .def_property_readonly("horizon", &Trajectory::horizon)
      .def_property_readonly("seed", &Trajectory::seed)
      .def("points", &trajectory_points)
      .def("save", [](const Trajectory& t, const std::string& path) { save_trajectory(t, path); })
      .def("__eq__", [](const Trajectory& a, const Trajectory& b) { return a == b; });

  m.def("generate_trajectory", &generate_trajectory, py::arg("dimension"), py::arg("steps"), py::arg("seed"));
  m.def("load_fixed_path", &fixed_path, py::arg("points"));
  m.def("load_trajectory", [](const std::string& path) { return load_trajectory(path); });

  py::class_<RangeGraph>(m, "RangeGraph")
      .def_property_readonly("num_vertices", &RangeGraph::num_vertices)
      .def_property_readonly("num_edges", &RangeGraph::num_edges)
      .def("degree", &RangeGraph::degree)
      .def("vertex_at", &RangeGraph::vertex_at)
      .def("neighbors", [](const RangeGraph& g, VertexId v) {
        const auto nb = g.neighbors(v);
        return std::vector<VertexId>(nb.begin(), nb.end());
      })
      .def("canonical_hash", &RangeGraph::canonical_hash);

  m.def("build_range_graph", &build_range_graph, py::arg("trajectory"));
  m.def("mu_measure_prefix", &mu_measure_prefix, py::arg("graph"), py::arg("n"));

  py::class_<CutTimeSet>(m, "CutTimeSet")
      .def_readonly("horizon", &CutTimeSet::horizon)
      .def_readonly("buffer", &CutTimeSet::buffer)
      .def_readonly("times", &CutTimeSet::times)
      .def("provisional", &CutTimeSet::provisional)
      .def("__len__", &CutTimeSet::size);

  m.def("find_cut_times", py::overload_cast<const RangeGraph&>(&find_cut_times), py::arg("graph"));
  m.def("brute_force_cut_times", &brute_force_cut_times, py::arg("trajectory"));

  m.def(
      "metric_profile",
      [](const RangeGraph& g, const CutTimeSet& c, std::vector<Time> grid, const std::string& method) {
        if (grid.empty()) grid = full_grid(g.end_time());
        return profile_dict(metric_profile(g, c, grid, solver(method)));
      },
      py::arg("graph"), py::arg("cuts"), py::arg("grid") = std::vector<Time>{}, py::arg("solver") = "auto");
  m.def(
      "oracle_resistance",
      [](const RangeGraph& g, VertexId u, VertexId v) { return oracle_resistance(g, u, v); }, py::arg("graph"),
      py::arg("u"), py::arg("v"));
  m.def(
      "covering_number",
      [](const RangeGraph& g, const CutTimeSet& c, double r) { return covering_number(g, c, r); }, py::arg("graph"),
      py::arg("cuts"), py::arg("radius"));

  m.def(
      "simulate_walk",
      [](const RangeGraph& g, VertexId start, Time steps, std::uint64_t seed) {
        return simulate_walk(g, start, steps, seed).steps;
      },
      py::arg("graph"), py::arg("start"), py::arg("steps"), py::arg("seed"));
  m.def(
      "heat_kernel_estimate",
      [](const RangeGraph& g, Time n, const std::vector<VertexId>& targets, std::size_t replicas,
         std::uint64_t seed) {
        const auto e = heat_kernel_estimate(g, n, targets, replicas, seed);
        return py::make_tuple(e.values, e.standard_error);
      },
      py::arg("graph"), py::arg("n"), py::arg("targets"), py::arg("replicas"), py::arg("seed"));
  m.def("exact_smoothed_kernel", &exact_smoothed_kernel, py::arg("graph"), py::arg("n"), py::arg("start") = 0);
  m.def(
      "exit_times",
      [](const RangeGraph& g, const std::vector<double>& radii, std::uint64_t seed) {
        std::vector<py::tuple> out;
        for (const auto& s : exit_times(g, graph_distance_field(g, 0), radii, seed))
          out.push_back(py::make_tuple(s.r, s.tau, s.censored));
        return out;
      },
      py::arg("graph"), py::arg("radii"), py::arg("seed"));

  m.def("two_sided_y", &two_sided_y, py::arg("s1"), py::arg("s2"), py::arg("m"));
  m.def(
      "estimate_lambda",
      [](int dimension, std::vector<Time> grid, std::size_t seeds, std::uint64_t master_seed, std::size_t min_replicas) {
        EnsembleConfig c;
        c.dimension = dimension;
        c.n_grid = std::move(grid);
        c.seeds = seeds;
        c.master_seed = master_seed;
        c.metrics = false;
        EstimatorOptions o;
        o.min_replicas = min_replicas;
        return estimate_dict(estimate_lambda_prefix(run_ensemble(c), o));
      },
      py::arg("dimension"), py::arg("grid"), py::arg("seeds"), py::arg("master_seed") = 1,
      py::arg("min_replicas") = 30);
  m.def(
      "estimate_slowly_varying",
      [](int dimension, std::vector<Time> grid, std::size_t seeds, std::uint64_t master_seed, std::size_t min_replicas) {
        EnsembleConfig c;
        c.dimension = dimension;
        c.n_grid = std::move(grid);
        c.seeds = seeds;
        c.master_seed = master_seed;
        EstimatorOptions o;
        o.min_replicas = min_replicas;
        const auto e = estimate_slowly_varying(run_ensemble(c), o);
        py::dict d;
        auto means = [](const std::vector<TableEntry>& t) {
          std::vector<double> v;
          for (const auto& r : t) v.push_back(r.mean);
          return v;
        };
        d["n"] = c.n_grid;
        d["psi_tilde"] = means(e.psi_tilde);
        d["phi"] = means(e.phi);
        d["cut_density"] = means(e.cut_density);
        d["psi_slope"] = e.psi_fit.slope;
        d["phi_slope"] = e.phi_fit.slope;
        d["cut_slope"] = e.cut_fit.slope;
        return d;
      },
      py::arg("dimension"), py::arg("grid"), py::arg("seeds"), py::arg("master_seed") = 1,
      py::arg("min_replicas") = 30);

  m.def(
      "run_pipeline_json",
      [](const std::string& config_text, const std::string& output_dir, const std::string& cache_dir) {
        ExperimentConfig c = config_from(config_text);
        c.output_dir = output_dir;
        PipelineOptions o;
        if (!cache_dir.empty()) o.cache_dir = cache_dir;
        return run_pipeline(c, o).to_json().dump();
      },
      py::arg("config_text"), py::arg("output_dir"), py::arg("cache_dir") = "");
  m.def(
      "verify_json", [](const std::string& config_text) { return verify_report(config_from(config_text)).dump(); },
      py::arg("config_text") = "");
}
