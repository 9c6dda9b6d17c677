#include <doctest.h>

#include <array>
#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "rangewalk/lattice_walk.hpp"

using namespace rangewalk;

TEST_CASE("zero steps gives the origin only") {
  const Trajectory t = generate_trajectory(4, 0, 17);
  CHECK(t.horizon() == 0);
  CHECK(t.point(0) == LatticePoint::origin(4));
}

TEST_CASE("direction frequencies are uniform") {
  const Trajectory t = generate_trajectory(4, 1'000'000, 99);
  std::array<int, 8> counts{};
  for (auto c : t.steps()) ++counts[c];
  for (int c : counts) {
    const double f = c / 1e6;
    CHECK(f >= 0.12);
    CHECK(f <= 0.13);
  }
}

TEST_CASE("one-dimensional parity") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto x = generate_trajectory(1, 4, s).point(4).coords[0];
    CHECK((x == 0 || std::abs(x) == 2 || std::abs(x) == 4));
  }
}

TEST_CASE("every increment is a unit vector") {
  const Trajectory t = generate_trajectory(5, 5000, 3);
  const auto pts = t.points();
  for (std::size_t k = 1; k < pts.size(); ++k) {
    std::int64_t l1 = 0;
    for (int i = 0; i < 5; ++i) l1 += std::abs(pts[k].coords[i] - pts[k - 1].coords[i]);
    REQUIRE(l1 == 1);
  }
}

TEST_CASE("generation is deterministic per seed") {
  CHECK(generate_trajectory(4, 10000, 5) == generate_trajectory(4, 10000, 5));
  CHECK_FALSE(generate_trajectory(4, 10000, 5) == generate_trajectory(4, 10000, 6));
}

TEST_CASE("invalid generator arguments") {
  CHECK_THROWS_AS(generate_trajectory(0, 10, 1), TrajectoryError);
  CHECK_THROWS_AS(generate_trajectory(4, -1, 1), TrajectoryError);
}

TEST_CASE("endpoint components have variance 1/4 in d=4") {
  // pooled over 200 walks x 4 components, N = 10^4
  double sum = 0, sum2 = 0;
  int n = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto end = generate_trajectory(4, 10000, 1000 + s).point(10000);
    for (auto c : end.coords) {
      const double z = c / 100.0;
      sum += z;
      sum2 += z * z;
      ++n;
    }
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 5 * 0.5 / std::sqrt(n));
  CHECK(std::abs(var - 0.25) < 5 * 0.25 * std::sqrt(2.0 / n));
}

TEST_CASE("fixed paths") {
  const Trajectory t = fixtures::path({{0}, {1}, {2}});
  CHECK(t.horizon() == 2);
  CHECK(t.synthetic());
  CHECK_NOTHROW(fixtures::four_cycle());
  CHECK_THROWS_WITH_AS(fixtures::path({{0}, {1, 1}}), "non-unit increment at step 0", TrajectoryError);
  CHECK_THROWS_AS(fixtures::path({{1}, {2}}), TrajectoryError);
}

TEST_CASE("two-sided pairs") {
  const auto [a, b] = two_sided_trajectory(4, 0, 8);
  CHECK(a.horizon() == 0);
  CHECK(b.horizon() == 0);
  const auto p = two_sided_trajectory(4, 10000, 8);
  const auto q = two_sided_trajectory(4, 10000, 8);
  CHECK(p.first == q.first);
  CHECK(p.second == q.second);
  CHECK_FALSE(std::equal(p.first.steps().begin(), p.first.steps().end(), p.second.steps().begin()));
  CHECK_FALSE(p.first == generate_trajectory(4, 10000, 8));
}

TEST_CASE("binary round trip") {
  const Trajectory t = generate_trajectory(4, 3000, 11);
  std::stringstream buf;
  write_trajectory(t, buf);
  const std::string bytes = buf.str();
  CHECK(bytes.substr(0, 4) == "RWR4");
  CHECK(bytes.size() == 4 + 4 + 4 + 8 + 8 + 3000);
  CHECK(read_trajectory(buf) == t);

  std::stringstream bad("XXXX");
  CHECK_THROWS_AS(read_trajectory(bad), TrajectoryError);
}
