#include "rangewalk/range_walker.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace rangewalk {

RangeWalker::RangeWalker(const RangeGraph& graph, VertexId start, std::uint64_t seed, std::uint64_t stream)
    : graph_(&graph), draws_(make_stream(seed, stream)), position_(start) {
  if (start >= graph.num_vertices()) throw std::invalid_argument("start vertex not in the graph");
  if (graph.num_edges() == 0) throw std::invalid_argument("walk needs a graph with at least one edge");
}

WalkOnRangeTrace simulate_walk(const RangeGraph& graph, VertexId start, Time steps, std::uint64_t seed) {
  if (steps < 0) throw std::invalid_argument("number of steps must be nonnegative");
  RangeWalker walker(graph, start, seed);
  WalkOnRangeTrace trace{seed, start, {}};
  trace.steps.reserve(static_cast<std::size_t>(steps) + 1);
  trace.steps.push_back(start);
  for (Time k = 0; k < steps; ++k) trace.steps.push_back(walker.step());
  return trace;
}

std::vector<ExitTimeSample> exit_times(const RangeGraph& graph, const std::vector<std::int64_t>& distance_field,
                                       const std::vector<double>& radii, std::uint64_t seed,
                                       const ExitOptions& options) {
  if (distance_field.size() != graph.num_vertices()) throw std::invalid_argument("distance field size mismatch");
  if (!std::is_sorted(radii.begin(), radii.end())) throw std::invalid_argument("radii must be ascending");
  const std::int64_t reach = *std::max_element(distance_field.begin(), distance_field.end());
  std::vector<ExitTimeSample> out;
  for (double r : radii) {
    if (r < 0) throw std::invalid_argument("radius must be nonnegative");
    if (r > static_cast<double>(reach)) throw std::invalid_argument("radius exceeds every distance in the graph");
    out.push_back({r, 0, false});
  }
  std::size_t next = 0;
  auto settle = [&](VertexId v, Time t) {
    while (next < out.size() && static_cast<double>(distance_field[v]) >= out[next].r) out[next++].tau = t;
  };
  settle(0, 0);
  if (next == out.size()) return out;
  RangeWalker walker(graph, 0, seed);
  while (next < out.size()) {
    if (walker.time() >= options.max_steps) break;
    const VertexId v = walker.step();
    if (options.forbidden && (*options.forbidden)[v] && static_cast<double>(distance_field[v]) < out[next].r) break;
    settle(v, walker.time());
  }
  for (std::size_t i = next; i < out.size(); ++i) {
    out[i].censored = true;
    out[i].tau = walker.time();
  }
  return out;
}

ExitTimeSample exit_time(const RangeGraph& graph, const std::vector<std::int64_t>& distance_field, double r,
                         std::uint64_t seed, const ExitOptions& options) {
  return exit_times(graph, distance_field, {r}, seed, options).front();
}

HeatKernelEstimate heat_kernel_estimate(const RangeGraph& graph, Time n, const std::vector<VertexId>& targets,
                                        std::size_t replicas, std::uint64_t seed, VertexId start) {
  if (replicas < 1) throw std::invalid_argument("at least one replica is required");
  if (n < 0) throw std::invalid_argument("time must be nonnegative");
  std::vector<std::int32_t> slot(graph.num_vertices(), -1);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] >= graph.num_vertices()) throw std::invalid_argument("target vertex not in the graph");
    slot[targets[i]] = static_cast<std::int32_t>(i);
  }
  std::vector<double> sum(targets.size(), 0.0), sum2(targets.size(), 0.0);
  RangeWalker walker(graph, start, seed);
  for (std::size_t rep = 0; rep < replicas; ++rep) {
    walker.reset(start);
    VertexId v = start;
    for (Time k = 0; k < n; ++k) v = walker.step();
    const VertexId w = walker.step();
    // X_n != X_{n+1}, so each target scores at most once per replica
    for (VertexId hit : {v, w}) {
      const std::int32_t s = slot[hit];
      if (s < 0) continue;
      const double value = 1.0 / (2.0 * graph.degree(hit));
      sum[s] += value;
      sum2[s] += value * value;
    }
  }
  HeatKernelEstimate est{n, start, targets, {}, {}, replicas};
  const double count = static_cast<double>(replicas);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double mean = sum[i] / count;
    const double var = replicas > 1 ? std::max(0.0, (sum2[i] - count * mean * mean) / (count - 1)) : 0.0;
    est.values.push_back(mean);
    est.standard_error.push_back(std::sqrt(var / count));
  }
  return est;
}

std::vector<double> exact_kernel_small(const RangeGraph& graph, Time n, VertexId x) {
  const std::size_t size = graph.num_vertices();
  if (size > kExactKernelCap) throw std::invalid_argument("graph exceeds the exact kernel cap of 2000 vertices");
  if (x >= size) throw std::invalid_argument("start vertex not in the graph");
  if (n < 0) throw std::invalid_argument("time must be nonnegative");
  const auto m = static_cast<Eigen::Index>(size);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(m, m);
  for (VertexId v = 0; v < size; ++v) {
    for (VertexId w : graph.neighbors(v)) p(v, w) = 1.0 / graph.degree(v);
  }
  Eigen::RowVectorXd dist = Eigen::RowVectorXd::Zero(m);
  dist[x] = 1.0;
  for (Time k = 0; k < n; ++k) dist = dist * p;
  return {dist.data(), dist.data() + dist.size()};
}

std::vector<double> propagate_distribution(const RangeGraph& graph, Time n, VertexId x) {
  const std::size_t size = graph.num_vertices();
  if (x >= size) throw std::invalid_argument("start vertex not in the graph");
  if (n < 0) throw std::invalid_argument("time must be nonnegative");
  std::vector<double> cur(size, 0.0), nxt(size, 0.0);
  cur[x] = 1.0;
  // only vertices within k hops of x can carry mass after k steps
  std::vector<VertexId> frontier{x};
  std::vector<char> seen(size, 0);
  seen[x] = 1;
  std::size_t active = 1;
  for (Time k = 0; k < n; ++k) {
    const std::size_t reached = frontier.size();
    for (std::size_t i = 0; i < reached; ++i) {
      const VertexId v = frontier[i];
      const double share = cur[v] / graph.degree(v);
      if (share == 0.0) continue;
      for (VertexId w : graph.neighbors(v)) {
        nxt[w] += share;
        if (!seen[w]) {
          seen[w] = 1;
          frontier.push_back(w);
        }
      }
    }
    active = frontier.size();
    for (std::size_t i = 0; i < active; ++i) {
      const VertexId v = frontier[i];
      cur[v] = nxt[v];
      nxt[v] = 0.0;
    }
  }
  return cur;
}

std::vector<double> exact_smoothed_kernel(const RangeGraph& graph, Time n, VertexId x) {
  std::vector<double> a = propagate_distribution(graph, n, x);
  std::vector<double> b(a.size(), 0.0);
  for (VertexId v = 0; v < a.size(); ++v) {
    const double share = a[v] / graph.degree(v);
    for (VertexId w : graph.neighbors(v)) b[w] += share;
  }
  for (VertexId y = 0; y < a.size(); ++y) a[y] = (a[y] + b[y]) / (2.0 * graph.degree(y));
  return a;
}

void write_walk_csv(const WalkOnRangeTrace& trace, std::ostream& out) {
  out << "step,vertex\n";
  for (std::size_t k = 0; k < trace.steps.size(); ++k) out << k << ',' << trace.steps[k] << '\n';
}

void write_heat_kernel_csv(const HeatKernelEstimate& estimate, const std::vector<std::int64_t>& distance,
                           const std::vector<double>& resistance, std::ostream& out) {
  out << "target,distance,resistance,estimate,stderr\n";
  const auto old_precision = out.precision(17);
  for (std::size_t i = 0; i < estimate.targets.size(); ++i) {
    const VertexId y = estimate.targets[i];
    out << y << ',' << distance.at(y) << ',' << resistance.at(y) << ',' << estimate.values[i] << ','
        << estimate.standard_error[i] << '\n';
  }
  out.precision(old_precision);
}

}  // namespace rangewalk
