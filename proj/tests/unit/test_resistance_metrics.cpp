#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "rangewalk/resistance_metrics.hpp"

using namespace rangewalk;

namespace {

struct Env {
  Trajectory traj;
  RangeGraph graph;
  CutTimeSet cuts;
  explicit Env(Trajectory t) : traj(std::move(t)), graph(build_range_graph(traj)), cuts(find_cut_times(graph)) {}
};

}  // namespace

TEST_CASE("block decomposition") {
  const Env line(fixtures::straight(3));
  const auto d = decompose_blocks(line.cuts);
  REQUIRE(d.blocks.size() == 3);
  CHECK(d.blocks[0] == SubtraceWindow{0, 1});
  CHECK(d.blocks[2] == SubtraceWindow{2, 3});

  const auto single = decompose_blocks(CutTimeSet{7, 0, {}});
  REQUIRE(single.blocks.size() == 1);
  CHECK(single.blocks[0] == SubtraceWindow{0, 7});

  const auto three = decompose_blocks(CutTimeSet{20, 0, {5, 12}});
  REQUIRE(three.blocks.size() == 3);
  CHECK(three.blocks[0] == SubtraceWindow{0, 5});
  CHECK(three.blocks[1] == SubtraceWindow{5, 12});
  CHECK(three.blocks[2] == SubtraceWindow{12, 20});
  CHECK(three.block_of(0) == 0);
  CHECK(three.block_of(5) == 0);
  CHECK(three.block_of(6) == 1);
  CHECK(three.block_of(20) == 2);
}

TEST_CASE("block graphs are the induced subtrace graphs") {
  const Env e(generate_trajectory(4, 3000, 5));
  for (const auto& w : decompose_blocks(e.cuts).blocks) {
    const BlockGraph b = block_graph(e.graph, w);
    const RangeGraph direct = subtrace_graph(e.traj, w);
    REQUIRE(b.graph.num_vertices() == direct.num_vertices());
    REQUIRE(b.graph.num_edges() == direct.num_edges());
    CHECK(b.to_global[b.start] == e.graph.vertex_at(w.m));
    CHECK(b.to_global[b.end] == e.graph.vertex_at(w.n));
  }
}

TEST_CASE("block laplacian resistance fixtures") {
  CHECK(block_laplacian_resistance(LocalGraph(2, {{0, 1}}), 0, {1})[0] == doctest::Approx(1));
  const LocalGraph c(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  CHECK(block_laplacian_resistance(c, 0, {1})[0] == doctest::Approx(0.75));
}

TEST_CASE("profiles on hand fixtures") {
  const Env line(fixtures::straight(6));
  const auto p = metric_profile(line.graph, line.cuts, full_grid(6));
  for (Time k = 0; k <= 6; ++k) {
    CHECK(p.resistance[k] == doctest::Approx(static_cast<double>(k)));
    CHECK(p.distance[k] == k);
  }
  const Env cyc(fixtures::four_cycle());
  const auto q = metric_profile(cyc.graph, cyc.cuts, {1, 2});
  CHECK(q.resistance[0] == doctest::Approx(0.75));
  CHECK(q.distance[1] == 2);
  CHECK(q.resistance[1] == doctest::Approx(1.0));

  const Env bf(fixtures::back_and_forth());
  CHECK(distance_profile(bf.graph, bf.cuts, {2}).distance[0] == 0);
  CHECK_THROWS(resistance_profile(bf.graph, bf.cuts, {3}));
}

TEST_CASE("blockwise profile equals the whole-graph oracle") {
  for (std::uint64_t s = 0; s < 3; ++s) {
    const Env e(generate_trajectory(4, 2000, 300 + s));
    const auto p = metric_profile(e.graph, e.cuts, full_grid(2000));
    const auto oracle = oracle_resistance_from(e.graph, 0);
    const auto dist = graph_distance_field(e.graph, 0);
    for (Time k = 0; k <= 2000; ++k) {
      const VertexId v = e.graph.vertex_at(k);
      REQUIRE(std::abs(p.resistance[k] - oracle[v]) <= 1e-8 * std::max(1.0, oracle[v]));
      REQUIRE(p.distance[k] == dist[v]);
      REQUIRE(p.resistance[k] <= p.distance[k] + 1e-9);
    }
  }
}

TEST_CASE("oracle cap") {
  const Env e(generate_trajectory(4, 2000, 1));
  OracleOptions tiny;
  tiny.cap = 10;
  CHECK_THROWS(oracle_resistance(e.graph, 0, 1, tiny));
  CHECK(oracle_resistance(build_range_graph(fixtures::four_cycle()), 0, 1) == doctest::Approx(0.75));
}

TEST_CASE("resistance at the m-th cut vertex is at least m - 1") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Env e(generate_trajectory(4, 20000, 40 + s));
    const auto p = resistance_profile(e.graph, e.cuts, e.cuts.times);
    for (std::size_t m = 1; m <= p.grid.size(); ++m) REQUIRE(p.resistance[m - 1] >= static_cast<double>(m) - 1 - 1e-9);
    for (std::size_t i = 1; i < p.grid.size(); ++i) REQUIRE(p.resistance[i] > p.resistance[i - 1]);
  }
}

TEST_CASE("past maximum deviation") {
  const Env line(fixtures::straight(8));
  CHECK(past_max_deviation(metric_profile(line.graph, line.cuts, full_grid(8))).resistance == 0.0);
  const Env bf(fixtures::path({{0}, {1}, {0}, {1}, {2}}));
  const auto p = metric_profile(bf.graph, bf.cuts, full_grid(4));
  CHECK(p.past_max_resistance[2] - p.resistance[2] >= 1.0);
  CHECK(past_max_deviation(p).distance >= 1);

  for (std::uint64_t s = 0; s < 10; ++s) {
    const Env e(generate_trajectory(4, 5000, 70 + s));
    if (e.cuts.empty()) continue;
    const auto dev = past_max_deviation(metric_profile(e.graph, e.cuts, full_grid(5000)));
    const auto gaps = gap_statistics(e.cuts, 5000);
    const Time bound = e.cuts.times.front() + gaps.max_gap + gaps.tail_gap;
    CHECK(dev.resistance <= static_cast<double>(bound));
    CHECK(dev.distance <= bound);
  }
}

TEST_CASE("resistance balls on fixtures") {
  const Env line(fixtures::straight(12));
  const auto b = resistance_ball(line.graph, line.cuts, 2.5);
  CHECK(b.members == std::vector<VertexId>{0, 1, 2});
  CHECK(b.cut_vertices_inside == 3);
  CHECK_FALSE(b.touches_horizon);
  CHECK(resistance_ball(line.graph, line.cuts, 0.5).members == std::vector<VertexId>{0});
  CHECK_THROWS(resistance_ball(line.graph, line.cuts, 0.0));

  CHECK(resistance_across_ball(line.graph, line.cuts, 3.0).resistance == doctest::Approx(3));
  CHECK(resistance_across_ball(line.graph, line.cuts, 2.5).resistance == doctest::Approx(3));
  CHECK_THROWS_AS(resistance_across_ball(line.graph, line.cuts, 100.0), std::domain_error);

  const Env cyc(fixtures::four_cycle());
  CHECK(resistance_across_ball(cyc.graph, cyc.cuts, 0.5).resistance == doctest::Approx(0.5));
}

TEST_CASE("a dead end at the origin undercuts the last interior cut vertex") {
  const Env e(fixtures::path({{0}, {0, -1}, {0, -2}, {0, -3}, {0, -2}, {0, -1}, {0}, {1}, {2}, {3}, {4}}));
  const auto r = resistance_across_ball(e.graph, e.cuts, 2.5);
  CHECK(r.resistance == doctest::Approx(1.5));
  CHECK(r.last_inside_cut_resistance == doctest::Approx(2.0));
}

TEST_CASE("ball cut count matches the profile at cut times") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Env e(generate_trajectory(4, 20000, 90 + s));
    const auto p = resistance_profile(e.graph, e.cuts, e.cuts.times);
    for (double r : {3.0, 10.0, 40.0}) {
      const auto ball = resistance_ball(e.graph, e.cuts, r);
      const auto direct = std::count_if(p.resistance.begin(), p.resistance.end(), [&](double x) { return x < r; });
      CHECK(ball.cut_vertices_inside == static_cast<std::size_t>(direct));
    }
  }
}

TEST_CASE("ball membership agrees with the oracle and nests") {
  const Env e(generate_trajectory(4, 2000, 123));
  const auto oracle = oracle_resistance_from(e.graph, 0);
  std::vector<VertexId> previous;
  double previous_across = 0.0;
  for (double r : {1.5, 4.3, 9.7, 20.1}) {
    const auto ball = resistance_ball(e.graph, e.cuts, r);
    std::vector<VertexId> expect;
    for (VertexId v = 0; v < e.graph.num_vertices(); ++v) {
      if (oracle[v] < r) expect.push_back(v);
    }
    CHECK(ball.members == expect);
    CHECK(std::includes(ball.members.begin(), ball.members.end(), previous.begin(), previous.end()));
    previous = ball.members;
    const double across = resistance_across_ball(e.graph, e.cuts, r).resistance;
    CHECK(across >= previous_across - 1e-9);
    previous_across = across;
  }
}

TEST_CASE("covering numbers") {
  const Env line(fixtures::straight(30));
  const auto c = covering_number(line.graph, line.cuts, 9.0);
  CHECK(c >= 2);
  CHECK(c <= 3);
  CHECK(covering_number(line.graph, line.cuts, 1.0) == 1);
  const Env e(generate_trajectory(4, 20000, 8));
  CHECK(covering_number(e.graph, e.cuts, 30.0) >= 1);
}

TEST_CASE("horizon vertices") {
  const Env line(fixtures::straight(5));
  const auto h = horizon_vertices(line.graph, line.cuts);
  CHECK(h == std::vector<bool>{false, false, false, false, false, true});
}

TEST_CASE("profile csv") {
  const Env line(fixtures::straight(1));
  std::ostringstream out;
  write_profile_csv(metric_profile(line.graph, line.cuts, {0, 1}), out);
  CHECK(out.str() == "k,resistance,distance,past_max_resistance,past_max_distance,provisional\n0,0,0,0,0,0\n1,1,1,1,1,1\n");
}
