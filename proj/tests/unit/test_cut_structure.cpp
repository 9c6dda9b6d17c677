#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "rangewalk/cut_structure.hpp"

using namespace rangewalk;

namespace {

std::vector<Time> cuts_of(const Trajectory& t) { return find_cut_times(build_range_graph(t)).times; }

}  // namespace

TEST_CASE("hand fixtures") {
  CHECK(cuts_of(fixtures::straight(3)) == std::vector<Time>{0, 1, 2});
  CHECK(cuts_of(fixtures::back_and_forth()).empty());
  CHECK(cuts_of(fixtures::four_cycle()).empty());
  CHECK(brute_force_cut_times(fixtures::straight(3)).times == std::vector<Time>{0, 1, 2});
  CHECK(brute_force_cut_times(fixtures::back_and_forth()).times.empty());
}

TEST_CASE("linear detector agrees with brute force") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const Trajectory t = generate_trajectory(s % 2 ? 4 : 3, 1500, s);
    REQUIRE(cuts_of(t) == brute_force_cut_times(t).times);
  }
  CHECK_THROWS(brute_force_cut_times(generate_trajectory(4, 10001, 1)));
}

TEST_CASE("prefix cut times contain the full ones") {
  const Trajectory t = generate_trajectory(4, 6000, 9);
  const auto full = cuts_of(t);
  const auto prefix = find_cut_times(subtrace_graph(t, {0, 3000})).times;
  for (Time k : full) {
    if (k < 3000) CHECK(std::binary_search(prefix.begin(), prefix.end(), k));
  }
}

TEST_CASE("counting") {
  const auto cuts = find_cut_times(build_range_graph(fixtures::straight(5)));
  CHECK(count_cut_times(cuts, 3).count == 4);
  CHECK(count_cut_times(CutTimeSet{10, 0, {}}, 5).count == 0);
  const auto t = generate_trajectory(4, 20000, 3);
  const auto c = find_cut_times(build_range_graph(t));
  Time prev = 0;
  for (Time n = 0; n <= 20000; n += 101) {
    const auto k = count_cut_times(c, n).count;
    CHECK(k >= prev);
    prev = k;
    // T_{N_n} <= n < T_{N_n + 1}
    if (k > 0) CHECK(c.times[k - 1] <= n);
    if (k < static_cast<Time>(c.size())) CHECK(c.times[k] > n);
  }
}

TEST_CASE("provisional buffer") {
  CHECK(default_cut_buffer(2) == 0);
  CHECK(default_cut_buffer(1 << 20) == 1);
  const CutTimeSet c{100, 5, {94, 95, 96}};
  CHECK_FALSE(c.provisional(95));
  CHECK(c.provisional(96));
  CHECK(count_cut_times(c, 96).provisional);
}

TEST_CASE("windowed indicator") {
  const Trajectory line = fixtures::straight(10);
  for (Time k = 0; k < 10; ++k) CHECK(windowed_cut_indicator(line, k, {3}));
  const Trajectory t = fixtures::path({{0}, {1}, {0}, {1}, {2}, {3}});
  CHECK_FALSE(windowed_cut_indicator(t, 0, {2}));
  CHECK(windowed_cut_indicator(t, 3, {2}));

  const Trajectory r = generate_trajectory(4, 3000, 12);
  for (Time k : cuts_of(r)) {
    for (Time w : {1, 5, 50, 3000}) REQUIRE(windowed_cut_indicator(r, k, {w}));
  }
  CHECK_THROWS(windowed_cut_indicator(r, 3000, {1}));
  CHECK_THROWS(windowed_cut_indicator(r, 5, {0}));
}

TEST_CASE("window presets stay in range") {
  for (Time n : {1, 2, 3, 100, 1 << 20}) {
    const auto a = WindowedIndicatorConfig::log_power(n);
    const auto b = WindowedIndicatorConfig::log_log(n, 2.0);
    CHECK(a.window >= 1);
    CHECK(a.window <= std::max<Time>(n, 1));
    CHECK(b.window >= 1);
    CHECK(b.window <= std::max<Time>(n, 1));
  }
}

TEST_CASE("gap statistics") {
  const auto line = find_cut_times(build_range_graph(fixtures::straight(5)));
  const auto g = gap_statistics(line, 4);
  CHECK(g.max_gap == 1);
  CHECK(g.tail_gap == 0);
  const auto h = gap_statistics(CutTimeSet{20, 0, {0, 10, 11}}, 15);
  CHECK(h.max_gap == 10);
  CHECK(h.tail_gap == 4);
  CHECK_THROWS(gap_statistics(CutTimeSet{20, 0, {5}}, 4));
}

TEST_CASE("csv export") {
  std::ostringstream out;
  write_cut_csv(CutTimeSet{10, 2, {1, 9}}, out);
  CHECK(out.str() == "k,provisional\n1,0\n9,1\n");
}
