#include "rangewalk/cut_structure.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <stdexcept>

namespace rangewalk {

Time default_cut_buffer(Time horizon) {
  if (horizon < 3) return 0;
  const double log_n = std::log(static_cast<double>(horizon));
  return static_cast<Time>(std::ceil(static_cast<double>(horizon) / std::pow(log_n, 6.0)));
}

CutTimeSet find_cut_times(const RangeGraph& graph) {
  return find_cut_times(graph, default_cut_buffer(graph.end_time() - graph.start_time()));
}

CutTimeSet find_cut_times(const RangeGraph& graph, Time buffer) {
  const Time start = graph.start_time();
  const Time horizon = graph.end_time();
  CutTimeSet cuts{horizon, buffer, {}};
  const auto length = static_cast<std::size_t>(horizon - start);
  std::vector<std::int32_t> cover(length + 1, 0);
  for (VertexId v = 0; v < graph.num_vertices(); ++v) {
    const Time first = graph.first_visit(v);
    const Time last = graph.last_visit(v);
    if (first < last) {
      ++cover[static_cast<std::size_t>(first - start)];
      --cover[static_cast<std::size_t>(last - start)];
    }
  }
  std::int32_t running = 0;
  for (std::size_t i = 0; i < length; ++i) {
    running += cover[i];
    if (running == 0) cuts.times.push_back(start + static_cast<Time>(i));
  }
  return cuts;
}

CutTimeSet brute_force_cut_times(const Trajectory& trajectory) {
  const Time horizon = trajectory.horizon();
  if (horizon > kBruteForceCutLimit) throw std::invalid_argument("brute-force cut detection limited to N <= 10^4");
  const auto points = trajectory.points();
  CutTimeSet cuts{horizon, default_cut_buffer(horizon), {}};
  std::set<LatticePoint> past;
  for (Time k = 0; k < horizon; ++k) {
    past.insert(points[k]);
    bool disjoint = true;
    for (Time j = k + 1; j <= horizon && disjoint; ++j) disjoint = !past.contains(points[j]);
    if (disjoint) cuts.times.push_back(k);
  }
  return cuts;
}

CutCount count_cut_times(const CutTimeSet& cuts, Time n) {
  const auto it = std::upper_bound(cuts.times.begin(), cuts.times.end(), n);
  return {static_cast<Time>(it - cuts.times.begin()), n > cuts.horizon - cuts.buffer};
}

WindowedIndicatorConfig WindowedIndicatorConfig::log_power(Time n, double power) {
  const double raw = n > 1 ? static_cast<double>(n) * std::pow(std::log(static_cast<double>(n)), -power) : 1.0;
  return {std::clamp<Time>(static_cast<Time>(raw), 1, std::max<Time>(n, 1))};
}

WindowedIndicatorConfig WindowedIndicatorConfig::log_log(Time n, double r) {
  double raw = 1.0;
  if (n > 2) raw = std::floor(static_cast<double>(n) * std::pow(std::log(std::log(static_cast<double>(n))), r));
  return {std::clamp<Time>(static_cast<Time>(raw), 1, std::max<Time>(n, 1))};
}

bool windowed_cut_indicator(const Trajectory& trajectory, Time k, const WindowedIndicatorConfig& config) {
  const Time horizon = trajectory.horizon();
  if (config.window < 1) throw std::invalid_argument("window must be at least 1");
  if (k < 0 || k >= horizon) throw std::out_of_range("windowed indicator needs 0 <= k < N");
  const Time lo = std::max<Time>(0, k - config.window);
  const Time hi = std::min(horizon, k + config.window);
  std::set<std::vector<std::int64_t>> past;
  bool disjoint = true;
  trajectory.for_each_point(
      [&](Time j, std::span<const std::int64_t> x) {
        if (j <= k) {
          past.emplace(x.begin(), x.end());
        } else if (disjoint && past.contains(std::vector<std::int64_t>(x.begin(), x.end()))) {
          disjoint = false;
        }
      },
      lo, hi);
  return disjoint;
}

GapStats gap_statistics(const CutTimeSet& cuts, Time n) {
  const auto end = std::upper_bound(cuts.times.begin(), cuts.times.end(), n);
  if (end == cuts.times.begin()) throw std::domain_error("no cut times at or before n");
  GapStats stats;
  for (auto it = cuts.times.begin() + 1; it < end; ++it) stats.max_gap = std::max(stats.max_gap, *it - *(it - 1));
  stats.tail_gap = n - *(end - 1);
  return stats;
}

void write_cut_csv(const CutTimeSet& cuts, std::ostream& out) {
  out << "k,provisional\n";
  for (Time k : cuts.times) out << k << ',' << (cuts.provisional(k) ? 1 : 0) << '\n';
}

}  // namespace rangewalk
