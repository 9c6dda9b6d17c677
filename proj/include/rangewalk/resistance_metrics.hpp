#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "rangewalk/cut_structure.hpp"
#include "rangewalk/laplacian.hpp"
#include "rangewalk/range_graph.hpp"

namespace rangewalk {

/// Trace split at cut times into windows [0, T_1], [T_1, T_2], ..., [T_last, N].
/// A degenerate first window (T_1 = 0) is dropped. Consecutive blocks share
/// exactly one vertex, the cut vertex S_{T_i}, and nothing else is shared
/// between any two blocks, so d_G and R_G add across the glue vertices.
struct BlockDecomposition {
  Time horizon = 0;
  std::vector<SubtraceWindow> blocks;
  /// True when the last block ends at the horizon rather than at a cut time
  /// (always the case unless the trajectory has no steps).
  bool final_partial = true;

  /// Index of the block with m < k <= n (block 0 also owns k = its start).
  std::size_t block_of(Time k) const;
};

BlockDecomposition decompose_blocks(const CutTimeSet& cuts);

/// Graph of one block's subtrace, with local ids and the map back to the range graph.
struct BlockGraph {
  LocalGraph graph;
  std::vector<VertexId> to_global;
  std::uint32_t start = 0;  // local id of S_m
  std::uint32_t end = 0;    // local id of S_n
};

BlockGraph block_graph(const RangeGraph& graph, SubtraceWindow window);

/// Whole range graph as a LocalGraph (same vertex ids).
LocalGraph to_local_graph(const RangeGraph& graph);

/// R(source, t) for each target inside one connected block. Tree blocks are
/// answered by path length; other blocks use the grounded Laplacian solve.
std::vector<double> block_laplacian_resistance(const LocalGraph& block, std::uint32_t source,
                                               const std::vector<std::uint32_t>& targets,
                                               const SolverOptions& options = {});

struct MetricProfile {
  std::vector<Time> grid;
  std::vector<double> resistance;         ///< R_G(0, S_k)
  std::vector<std::int64_t> distance;     ///< d_G(0, S_k)
  std::vector<double> past_max_resistance;
  std::vector<std::int64_t> past_max_distance;
  std::vector<bool> provisional;          ///< k lies after the last settled cut time
};

/// Sorted, deduplicated copy of grid; rejects points outside [0, N].
std::vector<Time> normalize_grid(std::vector<Time> grid, Time horizon);
std::vector<Time> full_grid(Time horizon);

MetricProfile resistance_profile(const RangeGraph& graph, const CutTimeSet& cuts, std::vector<Time> grid,
                                 const SolverOptions& options = {});
MetricProfile distance_profile(const RangeGraph& graph, const CutTimeSet& cuts, std::vector<Time> grid);
/// Both halves in one pass over the blocks.
MetricProfile metric_profile(const RangeGraph& graph, const CutTimeSet& cuts, std::vector<Time> grid,
                             const SolverOptions& options = {});

struct OracleOptions {
  std::uint32_t cap = 4000;  ///< maximum vertex count for whole-graph dense solves
};

/// Whole-graph dense Laplacian solve, no block decomposition.
double oracle_resistance(const RangeGraph& graph, VertexId u, VertexId v, const OracleOptions& options = {});
std::vector<double> oracle_resistance_from(const RangeGraph& graph, VertexId source, const OracleOptions& options = {});
/// Whole-graph breadth-first search distances.
std::vector<std::int64_t> graph_distance_field(const RangeGraph& graph, VertexId source);

struct PastMaxDeviation {
  double resistance = 0.0;
  std::int64_t distance = 0;
};

/// max_k (max_{j<=k} M(0,S_j) - M(0,S_k)) over the profile grid for M = R_G, d_G.
PastMaxDeviation past_max_deviation(const MetricProfile& profile);

struct ResistanceBall {
  VertexId center = 0;
  double radius = 0.0;
  std::vector<VertexId> members;            ///< sorted by vertex id
  std::vector<double> resistance;           ///< R_G(0, member), aligned with members
  std::size_t cut_vertices_inside = 0;      ///< |{i : R_G(0, S_{T_i}) < radius}|
  double last_inside_cut_resistance = 0.0;  ///< R_G(0, S_{T_i}) for the last such i
  bool touches_horizon = false;             ///< ball reaches the final partial block
};

ResistanceBall resistance_ball(const RangeGraph& graph, const CutTimeSet& cuts, double radius,
                               const SolverOptions& options = {});

struct BallResistance {
  double resistance = 0.0;                  ///< R_G(0, B_G(0, r)^c) within G_N
  double last_inside_cut_resistance = 0.0;
  bool touches_horizon = false;
};

BallResistance resistance_across_ball(const RangeGraph& graph, const CutTimeSet& cuts, double radius,
                                      const SolverOptions& options = {});

/// Greedy cover of B_G(0, r) by balls of radius 2r/3: the uncovered member
/// with the earliest first visit becomes the next center.
std::size_t covering_number(const RangeGraph& graph, const CutTimeSet& cuts, double radius,
                            const SolverOptions& options = {});

/// Flags vertices first visited after the last cut time; walks that reach
/// them have left the part of the graph that is final.
std::vector<bool> horizon_vertices(const RangeGraph& graph, const CutTimeSet& cuts);

/// CSV with header "k,resistance,distance,past_max_resistance,past_max_distance,provisional".
void write_profile_csv(const MetricProfile& profile, std::ostream& out);

}  // namespace rangewalk
