#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "rangewalk/random.hpp"
#include "rangewalk/range_graph.hpp"

namespace rangewalk {

/// Discrete-time simple random walk X on a range graph, one uniform neighbour per step.
class RangeWalker {
 public:
  RangeWalker(const RangeGraph& graph, VertexId start, std::uint64_t seed, std::uint64_t stream = 0);

  VertexId position() const { return position_; }
  Time time() const { return time_; }
  VertexId step() {
    const auto nb = graph_->neighbors(position_);
    position_ = nb[draws_(static_cast<std::uint32_t>(nb.size()))];
    ++time_;
    return position_;
  }
  void reset(VertexId start) {
    position_ = start;
    time_ = 0;
  }

 private:
  const RangeGraph* graph_;
  BoundedDraws draws_;
  VertexId position_;
  Time time_ = 0;
};

struct WalkOnRangeTrace {
  std::uint64_t seed = 0;
  VertexId start = 0;
  std::vector<VertexId> steps;  ///< X_0, ..., X_n
};

WalkOnRangeTrace simulate_walk(const RangeGraph& graph, VertexId start, Time steps, std::uint64_t seed);

struct ExitTimeSample {
  double r = 0.0;
  Time tau = 0;
  bool censored = false;  ///< tau is not meaningful when set
};

struct ExitOptions {
  Time max_steps = Time{1} << 40;
  /// Entering a flagged vertex before the exit censors the sample.
  const std::vector<bool>* forbidden = nullptr;
};

/// tau_r = inf{n : d_G(0, X_n) >= r} for a walk from vertex 0, with the
/// distance field d_G(0, .) supplied by the caller.
ExitTimeSample exit_time(const RangeGraph& graph, const std::vector<std::int64_t>& distance_field, double r,
                         std::uint64_t seed, const ExitOptions& options = {});
/// One walk, all radii (ascending) at once; shares the path, so tau is monotone in r.
std::vector<ExitTimeSample> exit_times(const RangeGraph& graph, const std::vector<std::int64_t>& distance_field,
                                       const std::vector<double>& radii, std::uint64_t seed,
                                       const ExitOptions& options = {});

struct HeatKernelEstimate {
  Time n = 0;
  VertexId start = 0;
  std::vector<VertexId> targets;
  std::vector<double> values;  ///< smoothed kernel p_n(start, y)
  std::vector<double> standard_error;
  std::size_t replicas = 0;
};

/// Monte Carlo estimate of p_n(x, y) = [P_x(X_n = y) + P_x(X_{n+1} = y)] / (2 deg y).
HeatKernelEstimate heat_kernel_estimate(const RangeGraph& graph, Time n, const std::vector<VertexId>& targets,
                                        std::size_t replicas, std::uint64_t seed, VertexId start = 0);

inline constexpr std::size_t kExactKernelCap = 2000;

/// Exact law of X_n from x via the dense transition matrix (|V| <= 2000).
std::vector<double> exact_kernel_small(const RangeGraph& graph, Time n, VertexId x);

/// Exact law of X_n from x by sparse propagation along the adjacency lists; no size cap.
std::vector<double> propagate_distribution(const RangeGraph& graph, Time n, VertexId x);

/// Exact smoothed kernel p_n(x, y) for all y, by sparse propagation.
std::vector<double> exact_smoothed_kernel(const RangeGraph& graph, Time n, VertexId x);

/// CSV "step,vertex".
void write_walk_csv(const WalkOnRangeTrace& trace, std::ostream& out);
/// CSV "target,distance,resistance,estimate,stderr".
void write_heat_kernel_csv(const HeatKernelEstimate& estimate, const std::vector<std::int64_t>& distance,
                           const std::vector<double>& resistance, std::ostream& out);

}  // namespace rangewalk
