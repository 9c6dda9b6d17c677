#pragma once

#include <iosfwd>
#include <vector>

#include "rangewalk/lattice_walk.hpp"
#include "rangewalk/range_graph.hpp"

namespace rangewalk {

/// Horizon cut times: k in [0, N-1] with S_[0,k] and S_[k+1,N] disjoint.
/// Times in (N - buffer, N) are provisional because the unseen future may
/// still revisit their past.
struct CutTimeSet {
  Time horizon = 0;
  Time buffer = 0;
  std::vector<Time> times;

  bool provisional(Time k) const { return k > horizon - buffer; }
  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
};

/// ceil(N / (log N)^6), the default provisional buffer (0 for N < 3).
Time default_cut_buffer(Time horizon);

/// Linear time: k is not a cut time iff k lies in [first(x), last(x) - 1] for
/// some vertex x, so the union of those intervals is marked with a difference
/// array over the graph's visit times.
CutTimeSet find_cut_times(const RangeGraph& graph);
CutTimeSet find_cut_times(const RangeGraph& graph, Time buffer);

/// Quadratic reference computed from explicit point sets.
inline constexpr Time kBruteForceCutLimit = 10'000;
CutTimeSet brute_force_cut_times(const Trajectory& trajectory);

struct CutCount {
  Time count = 0;
  bool provisional = false;
};

/// N_n = |{T_i <= n}|.
CutCount count_cut_times(const CutTimeSet& cuts, Time n);

struct WindowedIndicatorConfig {
  Time window = 1;

  /// b_n = n (log n)^-power, clamped to [1, n].
  static WindowedIndicatorConfig log_power(Time n, double power = 6.0);
  /// b_{n,r} = floor(n (log log n)^r), clamped to [1, n].
  static WindowedIndicatorConfig log_log(Time n, double r);
};

/// 1{S_[k-b, k] and S_[k+1, k+b] disjoint}, both windows clipped to [0, N].
bool windowed_cut_indicator(const Trajectory& trajectory, Time k, const WindowedIndicatorConfig& config);

struct GapStats {
  Time max_gap = 0;   ///< max over i >= 2 with T_i <= n of T_i - T_{i-1}
  Time tail_gap = 0;  ///< n - T_(n), T_(n) the last cut time <= n
};

GapStats gap_statistics(const CutTimeSet& cuts, Time n);

/// CSV with header "k,provisional".
void write_cut_csv(const CutTimeSet& cuts, std::ostream& out);

}  // namespace rangewalk
