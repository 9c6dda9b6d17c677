#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "rangewalk/cut_structure.hpp"
#include "rangewalk/pipeline.hpp"
#include "rangewalk/range_graph.hpp"
#include "rangewalk/range_walker.hpp"
#include "rangewalk/resistance_metrics.hpp"

namespace fs = std::filesystem;
using namespace rangewalk;

namespace {

constexpr int kStageFailure = 1;
constexpr int kConfigError = 2;

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

struct Global {
  std::string config;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::string out;
  std::string stage;
  std::vector<std::string> overrides;
};

ExperimentConfig load_config(const Global& g) {
  ExperimentConfig c;
  if (!g.config.empty()) c = ExperimentConfig::from_file(g.config);
  for (const auto& kv : g.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    c.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (g.seed) c.master_seed = *g.seed;
  if (!g.out.empty()) c.output_dir = g.out;
  c.validate();
  return c;
}

int run_pipeline_command(const Global& g, const std::string& default_stage) {
  const ExperimentConfig c = load_config(g);
  PipelineOptions options;
  options.threads = g.threads;
  options.stop_after = g.stage.empty() ? default_stage : g.stage;
  const RunManifest m = run_pipeline(c, options);
  for (const auto& s : m.stages) {
    std::cerr << s.name << ": " << s.status << (s.message.empty() ? "" : " (" + s.message + ")") << '\n';
  }
  std::cout << (fs::path(c.output_dir) / "manifest.json").string() << '\n';
  return m.ok() ? 0 : kStageFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rangewalk: random walk on the range of a random walk"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(RANGEWALK_VERSION));

  Global g;
  app.add_option("--config", g.config, "flat key = value config file");
  app.add_option("--seed", g.seed, "master seed override");
  app.add_option("--threads", g.threads, "worker cap")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "output directory or file");
  app.add_option("--stage", g.stage, "last pipeline stage to run");
  app.add_option("--set", g.overrides, "config override key=value (repeatable)");

  int dimension = 4;
  Time steps = 1 << 16;
  std::string in_path;
  Time buffer = -1;
  std::vector<Time> grid;
  std::string solver = "auto";
  VertexId start = 0;

  auto* generate = app.add_subcommand("generate", "sample a trajectory into the binary cache format");
  generate->add_option("--dimension,-d", dimension)->check(CLI::Range(1, 32));
  generate->add_option("--steps,-n", steps)->required();

  auto* graph = app.add_subcommand("graph", "range graph edge list and vertex table");
  graph->add_option("--in", in_path)->required()->check(CLI::ExistingFile);

  auto* cuts = app.add_subcommand("cuts", "horizon cut times as CSV");
  cuts->add_option("--in", in_path)->required()->check(CLI::ExistingFile);
  cuts->add_option("--buffer", buffer, "provisional buffer (default ceil(N/(log N)^6))");

  auto* metrics = app.add_subcommand("metrics", "R_G(0,S_k) and d_G(0,S_k) profile as CSV");
  metrics->add_option("--in", in_path)->required()->check(CLI::ExistingFile);
  metrics->add_option("--grid", grid, "times k (default: every step)");
  metrics->add_option("--solver", solver)->check(CLI::IsMember({"auto", "dense", "sparse", "cg"}));

  auto* walk = app.add_subcommand("walk", "simple random walk on the range graph as CSV");
  walk->add_option("--in", in_path)->required()->check(CLI::ExistingFile);
  walk->add_option("--steps,-n", steps)->required();
  walk->add_option("--start", start);

  app.add_subcommand("estimate", "pipeline through the estimate stage");
  app.add_subcommand("verify", "oracle and invariant checks as JSON");
  app.add_subcommand("report", "full pipeline with report.json and manifest.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    const std::uint64_t seed = g.seed.value_or(1);
    if (generate->parsed()) {
      if (g.out.empty()) throw ConfigError("generate needs --out FILE");
      save_trajectory(generate_trajectory(dimension, steps, seed), g.out);
    } else if (graph->parsed()) {
      if (g.out.empty()) throw ConfigError("graph needs --out DIR");
      const RangeGraph rg = build_range_graph(load_trajectory(in_path));
      fs::create_directories(g.out);
      auto edges = open_out(fs::path(g.out) / "edges.txt");
      write_edge_list(rg, edges);
      auto vertices = open_out(fs::path(g.out) / "vertices.txt");
      write_vertex_table(rg, vertices);
    } else if (cuts->parsed()) {
      const RangeGraph rg = build_range_graph(load_trajectory(in_path));
      const CutTimeSet c = buffer < 0 ? find_cut_times(rg) : find_cut_times(rg, buffer);
      if (g.out.empty()) {
        write_cut_csv(c, std::cout);
      } else {
        auto out = open_out(g.out);
        write_cut_csv(c, out);
      }
    } else if (metrics->parsed()) {
      const RangeGraph rg = build_range_graph(load_trajectory(in_path));
      const CutTimeSet c = find_cut_times(rg);
      SolverOptions options;
      options.method = parse_solver_method(solver);
      const MetricProfile p = metric_profile(rg, c, grid.empty() ? full_grid(rg.end_time()) : grid, options);
      if (g.out.empty()) {
        write_profile_csv(p, std::cout);
      } else {
        auto out = open_out(g.out);
        write_profile_csv(p, out);
      }
    } else if (walk->parsed()) {
      const RangeGraph rg = build_range_graph(load_trajectory(in_path));
      const auto trace = simulate_walk(rg, start, steps, seed);
      if (g.out.empty()) {
        write_walk_csv(trace, std::cout);
      } else {
        auto out = open_out(g.out);
        write_walk_csv(trace, out);
      }
    } else if (app.got_subcommand("verify")) {
      const auto report = verify_report(load_config(g));
      if (g.out.empty()) {
        std::cout << report.dump(2) << '\n';
      } else {
        open_out(g.out) << report.dump(2) << '\n';
      }
    } else if (app.got_subcommand("estimate")) {
      return run_pipeline_command(g, "estimate");
    } else if (app.got_subcommand("report")) {
      return run_pipeline_command(g, "report");
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kStageFailure;
  }
  return 0;
}
