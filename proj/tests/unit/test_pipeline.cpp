#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "rangewalk/pipeline.hpp"

using namespace rangewalk;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rangewalk_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig smoke(const fs::path& dir) {
  std::istringstream in("# smoke\nn_grid = 2^10\nseeds = 3\nbootstrap_resamples = 50\n");
  ExperimentConfig c = ExperimentConfig::parse(in);
  c.output_dir = (dir / "out").string();
  return c;
}

}  // namespace

TEST_CASE("config parsing") {
  std::istringstream in("dimension = 5\nn_grid = 2^4, 64,2^8  # trailing comment\nt_grid = 0.5,1\nsolver = cg\n");
  const ExperimentConfig c = ExperimentConfig::parse(in);
  CHECK(c.dimension == 5);
  CHECK(c.n_grid == std::vector<Time>{16, 64, 256});
  CHECK(c.t_grid == std::vector<double>{0.5, 1.0});
  CHECK(c.solver_options().method == SolverMethod::ConjugateGradient);
  CHECK(c.seeds == 30);

  std::istringstream empty("");
  const ExperimentConfig d = ExperimentConfig::parse(empty);
  CHECK(d.echo().size() == ExperimentConfig{}.echo().size());
  CHECK(d.hash() == ExperimentConfig{}.hash());
  CHECK(d.hash() != c.hash());

  auto bad = [](const std::string& text) {
    std::istringstream s(text);
    return ExperimentConfig::parse(s);
  };
  CHECK_THROWS_AS(bad("nope = 1\n"), ConfigError);
  CHECK_THROWS_AS(bad("seeds = many\n"), ConfigError);
  CHECK_THROWS_AS(bad("n_grid = 8, 4\n"), ConfigError);
  CHECK_THROWS_AS(bad("n_grid =\n"), ConfigError);
  CHECK_THROWS_AS(bad("seeds = 0\n"), ConfigError);
  CHECK_THROWS_AS(bad("solver_tolerance = 0\n"), ConfigError);
  CHECK_THROWS_AS(bad("solver = magic\n"), ConfigError);
  CHECK_THROWS_AS(bad("just words\n"), ConfigError);
}

TEST_CASE("output_dir does not change the config hash") {
  ExperimentConfig a, b;
  b.output_dir = "elsewhere";
  CHECK(a.hash() == b.hash());
}

TEST_CASE("pipeline smoke run, cache hits and byte-identical reports") {
  const fs::path dir = scratch("pipeline");
  const ExperimentConfig c = smoke(dir);
  PipelineOptions o;
  o.cache_dir = dir / "cache";
  const RunManifest first = run_pipeline(c, o);
  REQUIRE(first.ok());
  CHECK(first.cache_hits == 0);
  CHECK(first.files.size() >= 4);
  const std::string report = slurp(fs::path(c.output_dir) / "report.json");

  std::set<std::string> listed;
  for (const auto& f : first.files) listed.insert(f.name);
  for (const auto& e : fs::directory_iterator(c.output_dir)) {
    if (e.path().filename() != "manifest.json") CHECK(listed.count(e.path().filename().string()) == 1);
  }

  const RunManifest second = run_pipeline(c, o);
  REQUIRE(second.ok());
  CHECK(second.cache_hits == 6);
  CHECK(slurp(fs::path(c.output_dir) / "report.json") == report);
  // insufficient replicas are reported, not fatal
  CHECK(report.find("insufficient replicas") != std::string::npos);
}

TEST_CASE("corrupted cache file is named in the failure") {
  const fs::path dir = scratch("corrupt");
  const ExperimentConfig c = smoke(dir);
  PipelineOptions o;
  o.cache_dir = dir / "cache";
  REQUIRE(run_pipeline(c, o).ok());
  const fs::path victim = dir / "cache" / c.hash() / "trajectory_0.rwr";
  REQUIRE(fs::exists(victim));
  {
    std::fstream f(victim, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(40);
    f.put('\x7f');
  }
  const RunManifest m = run_pipeline(c, o);
  CHECK_FALSE(m.ok());
  REQUIRE(m.stages.front().status == "failed");
  CHECK(m.stages.front().message.find("trajectory_0.rwr") != std::string::npos);
  CHECK(m.stages.back().status == "skipped");
}

TEST_CASE("stop after a stage") {
  const fs::path dir = scratch("stage");
  const ExperimentConfig c = smoke(dir);
  PipelineOptions o;
  o.cache_dir = dir / "cache";
  o.stop_after = "cuts";
  const RunManifest m = run_pipeline(c, o);
  CHECK(m.ok());
  CHECK(m.stages[2].status == "ok");
  CHECK(m.stages[3].status == "skipped");
  CHECK_FALSE(fs::exists(fs::path(c.output_dir) / "report.json"));
  o.stop_after = "bogus";
  CHECK_THROWS_AS(run_pipeline(c, o), ConfigError);
}

TEST_CASE("verify suite passes by default and exposes a loose solver") {
  ExperimentConfig c;
  c.verify_seeds = 2;
  c.verify_horizon = 800;
  const auto good = verify_report(c);
  CHECK(good["pass"].get<bool>());
  c.solver = "cg";
  c.solver_tolerance = 1e-2;
  const auto loose = verify_report(c);
  CHECK_FALSE(loose["pass"].get<bool>());
  const auto& r = loose["checks"][1];
  CHECK(r["name"] == "resistance_oracle");
  CHECK(r["measured"]["max_relative_gap"].get<double>() > 1e-8);
}
