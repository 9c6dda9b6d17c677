#include <doctest.h>

#include "rangewalk/laplacian.hpp"

using namespace rangewalk;

namespace {

LocalGraph path_graph(std::uint32_t n) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> e;
  for (std::uint32_t i = 0; i < n; ++i) e.emplace_back(i, i + 1);
  return LocalGraph(n + 1, e);
}

LocalGraph cycle4() { return LocalGraph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}); }

// K4 minus one edge, R between the two degree-2 vertices is 1
LocalGraph diamond() { return LocalGraph(4, {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}}); }

SolverOptions with(SolverMethod m) {
  SolverOptions o;
  o.method = m;
  return o;
}

}  // namespace

TEST_CASE("exact fixture resistances") {
  CHECK(exact_resistance(LocalGraph(2, {{0, 1}}), 0, 1) == Rational(1));
  CHECK(exact_resistance(path_graph(7), 0, 7) == Rational(7));
  CHECK(exact_resistance(cycle4(), 0, 1) == Rational(3, 4));
  CHECK(exact_resistance(cycle4(), 0, 2) == Rational(1));
  CHECK(exact_resistance(diamond(), 0, 3) == Rational(1));
  CHECK(exact_resistance(diamond(), 0, 1) == Rational(5, 8));
}

TEST_CASE("every solver matches the exact values") {
  for (auto m : {SolverMethod::Auto, SolverMethod::Dense, SolverMethod::SparseDirect, SolverMethod::ConjugateGradient}) {
    CAPTURE(to_string(m));
    CHECK(GroundedLaplacian(cycle4(), 0, with(m)).resistance_to(1) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(GroundedLaplacian(path_graph(12), 0, with(m)).resistance_to(12) == doctest::Approx(12).epsilon(1e-12));
    CHECK(GroundedLaplacian(diamond(), 3, with(m)).resistance_to(1) == doctest::Approx(5.0 / 8).epsilon(1e-12));
    const auto all = GroundedLaplacian(path_graph(5), 2, with(m)).resistances_from_ground();
    CHECK(all[0] == doctest::Approx(2));
    CHECK(all[5] == doctest::Approx(3));
  }
}

TEST_CASE("dense all-pairs table") {
  const DenseResistanceTable t(diamond(), 2);
  CHECK(t.between(0, 3) == doctest::Approx(1.0));
  CHECK(t.between(3, 0) == doctest::Approx(1.0));
  CHECK(t.between(1, 2) == doctest::Approx(0.5));
  CHECK(t.between(2, 2) == 0.0);
}

TEST_CASE("resistance to a grounded set") {
  std::vector<bool> g{false, true, true, true};
  CHECK(resistance_to_set(cycle4(), 0, g, {}) == doctest::Approx(0.5));
  std::vector<bool> far(13, false);
  far[12] = true;
  CHECK(resistance_to_set(path_graph(12), 0, far, {}) == doctest::Approx(12));
  CHECK_THROWS(resistance_to_set(cycle4(), 0, std::vector<bool>(4, false), {}));
}

TEST_CASE("graph helpers") {
  const LocalGraph g(3, {{0, 1}, {1, 0}, {1, 2}});
  CHECK(g.num_edges() == 2);
  CHECK(g.is_tree());
  CHECK_FALSE(cycle4().is_tree());
  CHECK(bfs_distances(cycle4(), 0) == std::vector<std::int64_t>{0, 1, 2, 1});
  CHECK_THROWS(LocalGraph(2, {{1, 1}}));
}

TEST_CASE("solver method names") {
  CHECK(parse_solver_method("cg") == SolverMethod::ConjugateGradient);
  CHECK(to_string(parse_solver_method("sparse")) == "sparse");
  CHECK_THROWS(parse_solver_method("lu"));
}

TEST_CASE("conjugate gradient reports non-convergence") {
  SolverOptions o = with(SolverMethod::ConjugateGradient);
  o.tolerance = 1e-14;
  o.max_iteration_factor = 0.01;
  CHECK_THROWS_AS(GroundedLaplacian(path_graph(400), 0, o).resistance_to(400), SolverError);
}
