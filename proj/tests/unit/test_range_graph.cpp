#include <doctest.h>

#include <numeric>
#include <sstream>

#include "fixtures.hpp"
#include "rangewalk/range_graph.hpp"

using namespace rangewalk;

namespace {

std::vector<int> degrees(const RangeGraph& g) {
  std::vector<int> d;
  for (VertexId v = 0; v < g.num_vertices(); ++v) d.push_back(g.degree(v));
  return d;
}

}  // namespace

TEST_CASE("hand fixtures") {
  const RangeGraph line = build_range_graph(fixtures::straight(2));
  CHECK(line.num_vertices() == 3);
  CHECK(line.num_edges() == 2);
  CHECK(degrees(line) == std::vector<int>{1, 2, 1});

  const RangeGraph bf = build_range_graph(fixtures::back_and_forth());
  CHECK(bf.num_vertices() == 2);
  CHECK(bf.num_edges() == 1);
  CHECK(degrees(bf) == std::vector<int>{1, 1});
  CHECK(bf.first_visit(0) == 0);
  CHECK(bf.last_visit(0) == 2);

  const RangeGraph cyc = build_range_graph(fixtures::four_cycle());
  CHECK(cyc.num_vertices() == 4);
  CHECK(cyc.num_edges() == 4);
  CHECK(degrees(cyc) == std::vector<int>{2, 2, 2, 2});
}

TEST_CASE("structural invariants on random walks") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Trajectory t = generate_trajectory(4, 20000, s);
    const RangeGraph g = build_range_graph(t);
    std::size_t sum = 0;
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
      const int d = g.degree(v);
      CHECK(d >= 1);
      CHECK(d <= 8);
      sum += d;
      for (VertexId w : g.neighbors(v)) {
        const auto nb = g.neighbors(w);
        REQUIRE(std::find(nb.begin(), nb.end(), v) != nb.end());
      }
    }
    CHECK(sum == 2 * g.num_edges());
    // consecutive trace entries are adjacent
    const auto tr = g.trace();
    for (std::size_t k = 0; k + 1 < tr.size(); ++k) {
      const auto nb = g.neighbors(tr[k]);
      REQUIRE(std::binary_search(nb.begin(), nb.end(), tr[k + 1]));
    }
    CHECK(g.find(t.point(12345)) == std::optional<VertexId>(g.vertex_at(12345)));
  }
}

TEST_CASE("vertex ids follow first visits") {
  const RangeGraph g = build_range_graph(generate_trajectory(4, 5000, 4));
  for (VertexId v = 1; v < g.num_vertices(); ++v) CHECK(g.first_visit(v - 1) < g.first_visit(v));
}

TEST_CASE("mu measure") {
  const RangeGraph line = build_range_graph(fixtures::straight(7));
  CHECK(mu_measure_prefix(line, 7) == 14);
  CHECK(mu_measure_prefix(build_range_graph(fixtures::four_cycle()), 4) == 8);
  const RangeGraph g = build_range_graph(generate_trajectory(4, 5000, 2));
  CHECK(mu_measure_prefix(g, 5000) == static_cast<std::int64_t>(2 * g.num_edges()));
  std::int64_t prev = 0;
  for (Time n = 0; n <= 5000; n += 37) {
    const auto m = mu_measure_prefix(g, n);
    CHECK(m >= prev);
    prev = m;
  }
  CHECK_THROWS(mu_measure_prefix(g, 5001));
}

TEST_CASE("last-exit decomposition") {
  const Trajectory line = fixtures::straight(6);
  const auto y = last_exit_decomposition(build_range_graph(line), line, 6);
  CHECK(y == std::vector<int>{1, 2, 2, 2, 2, 2, 1});

  const Trajectory bf = fixtures::back_and_forth();
  CHECK(last_exit_decomposition(build_range_graph(bf), bf, 2) == std::vector<int>{0, 1, 1});

  for (std::uint64_t s = 0; s < 5; ++s) {
    const Trajectory t = generate_trajectory(4, 3000, 50 + s);
    const RangeGraph g = build_range_graph(t);
    for (Time n : {0, 1, 10, 999, 3000}) {
      const auto y = last_exit_decomposition(g, t, n);
      CHECK(std::accumulate(y.begin(), y.end(), std::int64_t{0}) == mu_measure_prefix(g, n));
      for (int v : y) CHECK((v >= 0 && v <= 8));
    }
  }
}

TEST_CASE("subtrace graphs") {
  const Trajectory t = fixtures::straight(5);
  const RangeGraph w = subtrace_graph(t, {1, 3});
  CHECK(w.num_vertices() == 3);
  CHECK(w.num_edges() == 2);
  CHECK(w.first_visit(0) == 1);

  const RangeGraph c = subtrace_graph(fixtures::four_cycle(), {0, 3});
  CHECK(c.num_vertices() == 4);
  CHECK(c.num_edges() == 3);

  const Trajectory r = generate_trajectory(4, 4000, 21);
  CHECK(subtrace_graph(r, {0, 4000}).canonical_hash() == build_range_graph(r).canonical_hash());
  CHECK_THROWS(subtrace_graph(r, {3, 3}));
  CHECK_THROWS(subtrace_graph(r, {0, 4001}));
}

TEST_CASE("rebuilding from serialized bytes gives the same graph") {
  const Trajectory t = generate_trajectory(4, 8000, 77);
  std::stringstream buf;
  write_trajectory(t, buf);
  CHECK(build_range_graph(read_trajectory(buf)).canonical_hash() == build_range_graph(t).canonical_hash());
}

TEST_CASE("exports") {
  const RangeGraph g = build_range_graph(fixtures::back_and_forth());
  std::ostringstream edges, verts;
  write_edge_list(g, edges);
  write_vertex_table(g, verts);
  CHECK(edges.str() == "0 1\n");
  CHECK(verts.str() == "0 0 0 0 0 1 0 2\n1 1 0 0 0 1 1 1\n");
}
