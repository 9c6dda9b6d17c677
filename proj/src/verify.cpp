#include "rangewalk/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rangewalk/cut_structure.hpp"
#include "rangewalk/random.hpp"
#include "rangewalk/range_graph.hpp"

namespace rangewalk {

namespace {

LatticePoint along(int axis, std::int64_t k, int d = 4) {
  LatticePoint p = LatticePoint::origin(d);
  p.coords[axis] = k;
  return p;
}

std::uint64_t seed_of(const VerifyOptions& o, std::size_t i) { return make_stream(o.master_seed, 7000 + i)(); }

struct Sample {
  Trajectory trajectory;
  RangeGraph graph;
  CutTimeSet cuts;
  Sample(int d, Time n, std::uint64_t seed)
      : trajectory(generate_trajectory(d, n, seed)), graph(build_range_graph(trajectory)), cuts(find_cut_times(graph)) {}
};

double relative_gap(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1.0); }

}  // namespace

std::vector<Trajectory> hand_fixtures() {
  std::vector<LatticePoint> line, cycle;
  for (int k = 0; k <= 10; ++k) line.push_back(along(0, k));
  LatticePoint a = along(0, 1), b = along(0, 1);
  b.coords[1] = 1;
  cycle = {LatticePoint::origin(4), a, b, along(1, 1), LatticePoint::origin(4)};
  return {load_fixed_path(line), load_fixed_path({LatticePoint::origin(4), along(0, 1), LatticePoint::origin(4)}),
          load_fixed_path(cycle)};
}

CheckResult check_cut_oracle(const VerifyOptions& o) {
  CheckResult r{"cut_oracle", true, {}};
  std::size_t mismatches = 0, cuts_seen = 0;
  auto compare = [&](const Trajectory& t) {
    const CutTimeSet fast = find_cut_times(build_range_graph(t));
    const CutTimeSet slow = brute_force_cut_times(t);
    cuts_seen += fast.size();
    if (fast.times != slow.times) ++mismatches;
  };
  for (const auto& t : hand_fixtures()) compare(t);
  for (std::size_t i = 0; i < o.seeds; ++i) compare(generate_trajectory(o.dimension, o.horizon, seed_of(o, i)));
  r.pass = mismatches == 0;
  r.measured = {{"trajectories", o.seeds + 3}, {"mismatched_trajectories", mismatches}, {"cut_times", cuts_seen}};
  return r;
}

CheckResult check_resistance_oracle(const VerifyOptions& o) {
  CheckResult r{"resistance_oracle", true, {}};
  double worst = 0.0;
  for (std::size_t i = 0; i < o.seeds; ++i) {
    const Sample s(o.dimension, o.horizon, seed_of(o, i));
    const MetricProfile p = resistance_profile(s.graph, s.cuts, full_grid(o.horizon), o.solver);
    const auto oracle = oracle_resistance_from(s.graph, 0, o.oracle);
    for (std::size_t k = 0; k < p.grid.size(); ++k)
      worst = std::max(worst, relative_gap(p.resistance[k], oracle[s.graph.vertex_at(p.grid[k])]));
  }
  const auto fixtures = hand_fixtures();
  const LocalGraph line = to_local_graph(build_range_graph(fixtures[0]));
  const LocalGraph cycle = to_local_graph(build_range_graph(fixtures[2]));
  const Rational path_r = exact_resistance(line, 0, 10);
  const Rational cycle_r = exact_resistance(cycle, 0, 1);
  const bool exact_ok = path_r == Rational(10) && cycle_r == Rational(3, 4);
  r.pass = worst <= o.tolerance && exact_ok;
  r.measured = {{"max_relative_gap", worst},
                {"tolerance", o.tolerance},
                {"solver", to_string(o.solver.method)},
                {"solver_tolerance", o.solver.tolerance},
                {"path_resistance", path_r.str()},
                {"cycle_adjacent_resistance", cycle_r.str()}};
  return r;
}

CheckResult check_volume_identity(const VerifyOptions& o) {
  CheckResult r{"volume_identity", true, {}};
  std::size_t failures = 0;
  for (std::size_t i = 0; i < o.seeds; ++i) {
    const Trajectory t = generate_trajectory(o.dimension, o.horizon, seed_of(o, i));
    const RangeGraph g = build_range_graph(t);
    for (Time n = 0; n <= o.horizon; ++n) {
      const auto y = last_exit_decomposition(g, t, n);
      const std::int64_t sum = std::accumulate(y.begin(), y.end(), std::int64_t{0});
      if (sum != mu_measure_prefix(g, n)) ++failures;
    }
  }
  r.pass = failures == 0;
  r.measured = {{"failures", failures}, {"checked", o.seeds * static_cast<std::size_t>(o.horizon + 1)}};
  return r;
}

CheckResult check_metric_invariants(const VerifyOptions& o) {
  CheckResult r{"metric_invariants", true, {}};
  std::size_t symmetry = 0, triangle = 0, domination = 0, cut_growth = 0;
  double worst_symmetry = 0.0;
  for (std::size_t i = 0; i < o.seeds; ++i) {
    const std::uint64_t seed = seed_of(o, i);
    // long walks: R <= d along the profile and growth across cut times
    const Sample s(o.dimension, o.horizon, seed);
    const MetricProfile p = metric_profile(s.graph, s.cuts, full_grid(o.horizon), o.solver);
    for (std::size_t k = 0; k < p.grid.size(); ++k) {
      if (p.resistance[k] > static_cast<double>(p.distance[k]) * (1 + o.tolerance)) ++domination;
    }
    for (std::size_t m = 1; m <= s.cuts.times.size(); ++m) {
      const Time t = s.cuts.times[m - 1];
      if (p.resistance[static_cast<std::size_t>(t)] < static_cast<double>(m - 1) - o.tolerance) ++cut_growth;
    }
    // short walks: all pairs
    const Sample small(o.dimension, o.invariant_horizon, seed);
    const LocalGraph g = to_local_graph(small.graph);
    const DenseResistanceTable table(g);
    const auto n = static_cast<std::uint32_t>(g.num_vertices());
    std::mt19937_64 rng = make_stream(seed, 77);
    std::uniform_int_distribution<std::uint32_t> pick(0, n - 1);
    for (std::size_t j = 0; j < o.triples; ++j) {
      const std::uint32_t a = pick(rng), b = pick(rng), c = pick(rng);
      const double ab = table.between(a, b), bc = table.between(b, c), ac = table.between(a, c);
      if (ac > (ab + bc) * (1 + o.tolerance) + o.tolerance) ++triangle;
    }
    SolverOptions dense;
    dense.method = SolverMethod::Dense;
    for (std::size_t j = 0; j < 8; ++j) {
      const std::uint32_t a = pick(rng), b = pick(rng);
      const double ab = GroundedLaplacian(g, a, dense).resistance_to(b);
      const double ba = GroundedLaplacian(g, b, dense).resistance_to(a);
      const double gap = relative_gap(ab, ba);
      worst_symmetry = std::max(worst_symmetry, gap);
      if (gap > o.tolerance) ++symmetry;
      const auto d = bfs_distances(g, a);
      if (ab > static_cast<double>(d[b]) * (1 + o.tolerance)) ++domination;
    }
  }
  r.pass = symmetry + triangle + domination + cut_growth == 0;
  r.measured = {{"symmetry_violations", symmetry},
                {"max_symmetry_gap", worst_symmetry},
                {"triangle_violations", triangle},
                {"domination_violations", domination},
                {"cut_growth_violations", cut_growth}};
  return r;
}

nlohmann::json to_json(const CheckResult& result) {
  return {{"name", result.name}, {"pass", result.pass}, {"measured", result.measured}};
}

nlohmann::json verify_suite(const VerifyOptions& options) {
  nlohmann::json checks = nlohmann::json::array();
  bool pass = true;
  for (auto check : {check_cut_oracle, check_resistance_oracle, check_volume_identity, check_metric_invariants}) {
    CheckResult r;
    try {
      r = check(options);
    } catch (const std::exception& e) {
      r.pass = false;
      r.measured = {{"error", e.what()}};
    }
    pass = pass && r.pass;
    checks.push_back(to_json(r));
  }
  return {{"pass", pass}, {"checks", checks}};
}

}  // namespace rangewalk
