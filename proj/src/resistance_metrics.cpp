#include "rangewalk/resistance_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace rangewalk {

std::size_t BlockDecomposition::block_of(Time k) const {
  if (blocks.empty() || k < blocks.front().m || k > blocks.back().n) throw std::out_of_range("time outside decomposition");
  const auto it = std::lower_bound(blocks.begin(), blocks.end(), k,
                                   [](const SubtraceWindow& w, Time t) { return w.n < t; });
  return static_cast<std::size_t>(it - blocks.begin());
}

BlockDecomposition decompose_blocks(const CutTimeSet& cuts) {
  BlockDecomposition d;
  d.horizon = cuts.horizon;
  if (cuts.horizon == 0) {
    d.final_partial = false;
    return d;
  }
  Time previous = 0;
  for (Time t : cuts.times) {
    if (t > previous) d.blocks.push_back({previous, t});
    previous = t;
  }
  d.blocks.push_back({previous, cuts.horizon});
  return d;
}

namespace {

// Reusable global-to-local map for carving out consecutive blocks.
class BlockExtractor {
 public:
  explicit BlockExtractor(const RangeGraph& graph) : graph_(graph), local_(graph.num_vertices(), kUnset) {}

  BlockGraph extract(SubtraceWindow window) {
    for (VertexId v : last_) local_[v] = kUnset;
    last_.clear();
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    edges.reserve(static_cast<std::size_t>(window.n - window.m));
    std::uint32_t previous = assign(graph_.vertex_at(window.m));
    for (Time k = window.m + 1; k <= window.n; ++k) {
      const std::uint32_t current = assign(graph_.vertex_at(k));
      edges.emplace_back(previous, current);
      previous = current;
    }
    BlockGraph out{LocalGraph(static_cast<std::uint32_t>(last_.size()), std::move(edges)), last_, 0, 0};
    out.start = local_[graph_.vertex_at(window.m)];
    out.end = local_[graph_.vertex_at(window.n)];
    return out;
  }

  std::uint32_t local(VertexId v) const { return local_[v]; }

 private:
  static constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();

  std::uint32_t assign(VertexId v) {
    if (local_[v] == kUnset) {
      local_[v] = static_cast<std::uint32_t>(last_.size());
      last_.push_back(v);
    }
    return local_[v];
  }

  const RangeGraph& graph_;
  std::vector<std::uint32_t> local_;
  std::vector<VertexId> last_;
};

void require_full_graph(const RangeGraph& graph, const CutTimeSet& cuts) {
  if (graph.start_time() != 0) throw std::invalid_argument("metric computations need a graph rooted at time 0");
  if (cuts.horizon != graph.end_time()) throw std::invalid_argument("cut set horizon does not match the graph");
}

Time last_settled_cut(const CutTimeSet& cuts) {
  Time last = 0;
  for (Time t : cuts.times) {
    if (!cuts.provisional(t)) last = t;
  }
  return last;
}

std::vector<double> all_resistances_from(const LocalGraph& g, std::uint32_t source, const SolverOptions& options) {
  if (g.is_tree()) {
    const auto d = bfs_distances(g, source);
    return {d.begin(), d.end()};
  }
  return GroundedLaplacian(g, source, options).resistances_from_ground();
}

}  // namespace

BlockGraph block_graph(const RangeGraph& graph, SubtraceWindow window) {
  if (window.m < graph.start_time() || window.n > graph.end_time() || window.m >= window.n)
    throw std::invalid_argument("block window outside the graph's time range");
  BlockExtractor extractor(graph);
  return extractor.extract(window);
}

LocalGraph to_local_graph(const RangeGraph& graph) {
  const auto offsets = graph.offsets();
  const auto adjacency = graph.adjacency();
  return LocalGraph(std::vector<std::uint32_t>(offsets.begin(), offsets.end()),
                    std::vector<std::uint32_t>(adjacency.begin(), adjacency.end()));
}

std::vector<double> block_laplacian_resistance(const LocalGraph& block, std::uint32_t source,
                                               const std::vector<std::uint32_t>& targets,
                                               const SolverOptions& options) {
  std::vector<double> out(targets.size(), 0.0);
  if (block.is_tree()) {
    const auto d = bfs_distances(block, source);
    for (std::size_t i = 0; i < targets.size(); ++i) out[i] = static_cast<double>(d[targets[i]]);
    return out;
  }
  GroundedLaplacian solver(block, source, options);
  for (std::size_t i = 0; i < targets.size(); ++i) out[i] = solver.resistance_to(targets[i]);
  return out;
}

std::vector<Time> normalize_grid(std::vector<Time> grid, Time horizon) {
  for (Time k : grid) {
    if (k < 0 || k > horizon) throw std::out_of_range("grid point " + std::to_string(k) + " outside [0, N]");
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::vector<Time> full_grid(Time horizon) {
  std::vector<Time> grid(static_cast<std::size_t>(horizon + 1));
  for (Time k = 0; k <= horizon; ++k) grid[static_cast<std::size_t>(k)] = k;
  return grid;
}

namespace {

MetricProfile compute_profile(const RangeGraph& graph, const CutTimeSet& cuts, std::vector<Time> grid,
                              const SolverOptions& options, bool want_resistance, bool want_distance) {
  require_full_graph(graph, cuts);
  MetricProfile p;
  p.grid = normalize_grid(std::move(grid), cuts.horizon);
  const std::size_t n = p.grid.size();
  p.resistance.assign(n, 0.0);
  p.distance.assign(n, 0);
  p.provisional.assign(n, false);

  const Time settled = last_settled_cut(cuts);
  for (std::size_t i = 0; i < n; ++i) p.provisional[i] = p.grid[i] > settled;

  const BlockDecomposition decomposition = decompose_blocks(cuts);
  BlockExtractor extractor(graph);
  double prefix_r = 0.0;
  std::int64_t prefix_d = 0;
  std::size_t gi = 0;
  while (gi < n && p.grid[gi] == 0) ++gi;
  for (const SubtraceWindow& block : decomposition.blocks) {
    if (gi == n) break;
    std::size_t stop = gi;
    while (stop < n && p.grid[stop] <= block.n) ++stop;
    const bool need_end = stop < n;

    const BlockGraph bg = extractor.extract(block);
    std::vector<std::uint32_t> targets;
    targets.reserve(stop - gi + 1);
    for (std::size_t i = gi; i < stop; ++i) targets.push_back(extractor.local(graph.vertex_at(p.grid[i])));
    if (need_end) targets.push_back(bg.end);

    std::vector<std::int64_t> dist;
    if (want_distance || bg.graph.is_tree()) dist = bfs_distances(bg.graph, bg.start);
    std::vector<double> res;
    if (want_resistance) {
      if (bg.graph.is_tree()) {
        res.reserve(targets.size());
        for (std::uint32_t t : targets) res.push_back(static_cast<double>(dist[t]));
      } else {
        res = block_laplacian_resistance(bg.graph, bg.start, targets, options);
      }
    }
    for (std::size_t i = gi; i < stop; ++i) {
      const std::size_t t = i - gi;
      if (want_resistance) p.resistance[i] = prefix_r + res[t];
      if (want_distance) p.distance[i] = prefix_d + dist[targets[t]];
    }
    if (need_end) {
      if (want_resistance) prefix_r += res.back();
      if (want_distance) prefix_d += dist[bg.end];
    }
    gi = stop;
  }

  p.past_max_resistance.assign(n, 0.0);
  p.past_max_distance.assign(n, 0);
  double best_r = 0.0;
  std::int64_t best_d = 0;
  for (std::size_t i = 0; i < n; ++i) {
    best_r = std::max(best_r, p.resistance[i]);
    best_d = std::max(best_d, p.distance[i]);
    p.past_max_resistance[i] = best_r;
    p.past_max_distance[i] = best_d;
  }
  return p;
}

}  // namespace

MetricProfile resistance_profile(const RangeGraph& graph, const CutTimeSet& cuts, std::vector<Time> grid,
                                 const SolverOptions& options) {
  return compute_profile(graph, cuts, std::move(grid), options, true, false);
}

MetricProfile distance_profile(const RangeGraph& graph, const CutTimeSet& cuts, std::vector<Time> grid) {
  return compute_profile(graph, cuts, std::move(grid), {}, false, true);
}

MetricProfile metric_profile(const RangeGraph& graph, const CutTimeSet& cuts, std::vector<Time> grid,
                             const SolverOptions& options) {
  return compute_profile(graph, cuts, std::move(grid), options, true, true);
}

namespace {

void check_oracle_size(const RangeGraph& graph, const OracleOptions& options) {
  if (graph.num_vertices() > options.cap)
    throw std::invalid_argument("graph has " + std::to_string(graph.num_vertices()) +
                                " vertices, above the oracle cap of " + std::to_string(options.cap));
}

}  // namespace

double oracle_resistance(const RangeGraph& graph, VertexId u, VertexId v, const OracleOptions& options) {
  check_oracle_size(graph, options);
  SolverOptions dense;
  dense.method = SolverMethod::Dense;
  return GroundedLaplacian(to_local_graph(graph), u, dense).resistance_to(v);
}

std::vector<double> oracle_resistance_from(const RangeGraph& graph, VertexId source, const OracleOptions& options) {
  check_oracle_size(graph, options);
  SolverOptions dense;
  dense.method = SolverMethod::Dense;
  return GroundedLaplacian(to_local_graph(graph), source, dense).resistances_from_ground();
}

std::vector<std::int64_t> graph_distance_field(const RangeGraph& graph, VertexId source) {
  std::vector<std::int64_t> dist(graph.num_vertices(), -1);
  std::vector<VertexId> queue;
  queue.reserve(graph.num_vertices());
  dist[source] = 0;
  queue.push_back(source);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const VertexId v = queue[head];
    for (VertexId w : graph.neighbors(v)) {
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

PastMaxDeviation past_max_deviation(const MetricProfile& profile) {
  PastMaxDeviation out;
  for (std::size_t i = 0; i < profile.grid.size(); ++i) {
    if (!profile.past_max_resistance.empty())
      out.resistance = std::max(out.resistance, profile.past_max_resistance[i] - profile.resistance[i]);
    if (!profile.past_max_distance.empty())
      out.distance = std::max(out.distance, profile.past_max_distance[i] - profile.distance[i]);
  }
  return out;
}

namespace {

// Blocks touched by B_G(0, r), with full single-source data in each.
struct BallBlocks {
  struct Block {
    BlockGraph bg;
    std::vector<double> from_start;
    std::vector<double> from_end;  // filled on demand
    double length = 0.0;
  };

  std::vector<Block> blocks;
  std::vector<double> prefix;  // R_G(0, start of block i)
  ResistanceBall ball;
  std::vector<std::pair<std::size_t, std::uint32_t>> location;  // (block, local id) per member

  BallBlocks(const RangeGraph& graph, const CutTimeSet& cuts, double radius, const SolverOptions& options) {
    require_full_graph(graph, cuts);
    if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
    ball.center = graph.vertex_at(0);
    ball.radius = radius;
    const BlockDecomposition decomposition = decompose_blocks(cuts);
    const bool origin_is_cut = !cuts.times.empty() && cuts.times.front() == 0;
    if (origin_is_cut) {
      ball.cut_vertices_inside = 1;
      ball.last_inside_cut_resistance = 0.0;
    }
    std::vector<std::pair<VertexId, std::pair<double, std::pair<std::size_t, std::uint32_t>>>> found;
    if (decomposition.blocks.empty()) {
      found.push_back({ball.center, {0.0, {0, 0}}});
      ball.touches_horizon = true;
    }
    BlockExtractor extractor(graph);
    double r0 = 0.0;
    for (std::size_t i = 0; i < decomposition.blocks.size(); ++i) {
      if (i > 0) {
        if (r0 >= radius) break;
        ++ball.cut_vertices_inside;
        ball.last_inside_cut_resistance = r0;
      }
      if (i + 1 == decomposition.blocks.size() && decomposition.final_partial) ball.touches_horizon = true;
      Block b;
      b.bg = extractor.extract(decomposition.blocks[i]);
      b.from_start = all_resistances_from(b.bg.graph, b.bg.start, options);
      b.length = b.from_start[b.bg.end];
      for (std::uint32_t x = 0; x < b.bg.graph.num_vertices(); ++x) {
        if (i > 0 && x == b.bg.start) continue;
        const double r = r0 + b.from_start[x];
        if (r < radius) found.push_back({b.bg.to_global[x], {r, {i, x}}});
      }
      prefix.push_back(r0);
      r0 += b.length;
      blocks.push_back(std::move(b));
    }
    std::sort(found.begin(), found.end());
    for (const auto& [v, rest] : found) {
      ball.members.push_back(v);
      ball.resistance.push_back(rest.first);
      location.push_back(rest.second);
    }
  }

  const std::vector<double>& from_end(std::size_t i, const SolverOptions& options) {
    Block& b = blocks[i];
    if (b.from_end.empty()) b.from_end = all_resistances_from(b.bg.graph, b.bg.end, options);
    return b.from_end;
  }
};

}  // namespace

ResistanceBall resistance_ball(const RangeGraph& graph, const CutTimeSet& cuts, double radius,
                               const SolverOptions& options) {
  return BallBlocks(graph, cuts, radius, options).ball;
}

BallResistance resistance_across_ball(const RangeGraph& graph, const CutTimeSet& cuts, double radius,
                                      const SolverOptions& options) {
  const ResistanceBall ball = resistance_ball(graph, cuts, radius, options);
  std::vector<std::uint32_t> local(graph.num_vertices(), std::numeric_limits<std::uint32_t>::max());
  for (std::size_t i = 0; i < ball.members.size(); ++i) local[ball.members[i]] = static_cast<std::uint32_t>(i);
  auto next = static_cast<std::uint32_t>(ball.members.size());
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (VertexId v : ball.members) {
    for (VertexId w : graph.neighbors(v)) {
      if (local[w] == std::numeric_limits<std::uint32_t>::max()) local[w] = next++;
      edges.emplace_back(local[v], local[w]);
    }
  }
  if (next == ball.members.size())
    throw std::domain_error("complement of the resistance ball is empty in G_N (radius too large for the horizon)");
  std::vector<bool> grounded(next, false);
  for (std::uint32_t i = static_cast<std::uint32_t>(ball.members.size()); i < next; ++i) grounded[i] = true;
  const LocalGraph g(next, std::move(edges));
  BallResistance out;
  out.resistance = resistance_to_set(g, local[ball.center], grounded, options);
  out.last_inside_cut_resistance = ball.last_inside_cut_resistance;
  out.touches_horizon = ball.touches_horizon;
  return out;
}

std::size_t covering_number(const RangeGraph& graph, const CutTimeSet& cuts, double radius,
                            const SolverOptions& options) {
  BallBlocks bb(graph, cuts, radius, options);
  const auto& members = bb.ball.members;
  std::vector<std::size_t> order(members.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return graph.first_visit(members[a]) < graph.first_visit(members[b]);
  });
  const double cover_radius = 2.0 * radius / 3.0;
  std::vector<bool> covered(members.size(), false);
  std::size_t centers = 0;
  for (std::size_t ci : order) {
    if (covered[ci]) continue;
    ++centers;
    const auto [bc, lc] = bb.location[ci];
    const auto& cblock = bb.blocks[bc];
    const std::vector<double> from_center = all_resistances_from(cblock.bg.graph, lc, options);
    for (std::size_t j = 0; j < members.size(); ++j) {
      if (covered[j]) continue;
      const auto [bx, lx] = bb.location[j];
      double r = 0.0;
      if (bx == bc) {
        r = from_center[lx];
      } else if (bx > bc) {
        r = from_center[cblock.bg.end] + (bb.prefix[bx] - bb.prefix[bc + 1]) + bb.blocks[bx].from_start[lx];
      } else {
        r = from_center[cblock.bg.start] + (bb.prefix[bc] - bb.prefix[bx + 1]) + bb.from_end(bx, options)[lx];
      }
      if (r < cover_radius) covered[j] = true;
    }
  }
  return centers;
}

std::vector<bool> horizon_vertices(const RangeGraph& graph, const CutTimeSet& cuts) {
  require_full_graph(graph, cuts);
  const Time settled = last_settled_cut(cuts);
  std::vector<bool> flags(graph.num_vertices(), false);
  for (VertexId v = 0; v < graph.num_vertices(); ++v) flags[v] = graph.first_visit(v) > settled;
  return flags;
}

void write_profile_csv(const MetricProfile& profile, std::ostream& out) {
  out << "k,resistance,distance,past_max_resistance,past_max_distance,provisional\n";
  const auto old_precision = out.precision(17);
  for (std::size_t i = 0; i < profile.grid.size(); ++i) {
    out << profile.grid[i] << ',' << profile.resistance[i] << ',' << profile.distance[i] << ','
        << profile.past_max_resistance[i] << ',' << profile.past_max_distance[i] << ','
        << (profile.provisional[i] ? 1 : 0) << '\n';
  }
  out.precision(old_precision);
}

}  // namespace rangewalk
