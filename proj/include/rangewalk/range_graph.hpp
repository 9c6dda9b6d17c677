#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "rangewalk/lattice_walk.hpp"

namespace rangewalk {

using VertexId = std::uint32_t;

/// Time window [m, n] of a trajectory, 0 <= m < n <= N.
struct SubtraceWindow {
  Time m = 0;
  Time n = 0;

  friend bool operator==(const SubtraceWindow&, const SubtraceWindow&) = default;
};

/// Range graph of a trajectory (or of a window of it). Vertices are the
/// distinct visited sites, numbered in first-visit order, and edges are the
/// distinct traversed bonds.
class RangeGraph {
 public:
  int dimension() const { return dimension_; }
  std::size_t num_vertices() const { return first_visit_.size(); }
  std::size_t num_edges() const { return neighbors_.size() / 2; }

  std::span<const VertexId> neighbors(VertexId v) const {
    return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
  }
  int degree(VertexId v) const { return static_cast<int>(offsets_[v + 1] - offsets_[v]); }
  std::span<const std::uint32_t> offsets() const { return offsets_; }
  std::span<const VertexId> adjacency() const { return neighbors_; }

  /// Visit times are trajectory times, so a window graph reports times in [m, n].
  Time first_visit(VertexId v) const { return first_visit_[v]; }
  Time last_visit(VertexId v) const { return last_visit_[v]; }

  /// First and last trajectory time covered by the graph.
  Time start_time() const { return start_time_; }
  Time end_time() const { return start_time_ + static_cast<Time>(trace_.size()) - 1; }
  /// Vertex occupied at each covered time; trace()[i] is the vertex at time start_time() + i.
  std::span<const VertexId> trace() const { return trace_; }
  VertexId vertex_at(Time k) const { return trace_[static_cast<std::size_t>(k - start_time_)]; }

  std::span<const std::int32_t> coords(VertexId v) const {
    return {coords_.data() + static_cast<std::size_t>(v) * dimension_, static_cast<std::size_t>(dimension_)};
  }
  LatticePoint point(VertexId v) const;
  std::optional<VertexId> find(const LatticePoint& p) const;

  /// CRC-32 of a canonical serialization (coordinates, adjacency, visit times).
  std::uint32_t canonical_hash() const;

 private:
  friend RangeGraph build_window_graph(const Trajectory&, Time, Time);

  std::size_t slot_of(std::span<const std::int32_t> x) const;

  int dimension_ = 0;
  Time start_time_ = 0;
  std::vector<std::int32_t> coords_;
  std::vector<std::uint32_t> offsets_;
  std::vector<VertexId> neighbors_;
  std::vector<Time> first_visit_;
  std::vector<Time> last_visit_;
  std::vector<VertexId> trace_;
  std::vector<VertexId> table_;  // open addressing, kEmpty marks free slots
};

RangeGraph build_range_graph(const Trajectory& trajectory);

/// Graph G_{m,n}: vertices S_m..S_n and the bonds traversed at steps m..n-1.
RangeGraph subtrace_graph(const Trajectory& trajectory, SubtraceWindow window);

/// mu_G(S_[0,n]): sum of degrees over the distinct vertices visited by time n.
std::int64_t mu_measure_prefix(const RangeGraph& graph, Time n);

/// Y_k^(n) for k = 0..N: number of bonds at S_k traversed by step k+1,
/// counted only when k is the last visit to S_k (within the horizon) and S_k
/// was visited by time n.
std::vector<int> last_exit_decomposition(const RangeGraph& graph, const Trajectory& trajectory, Time n);

/// Lines "id_u id_v" with id_u < id_v.
void write_edge_list(const RangeGraph& graph, std::ostream& out);
/// Lines "id x1 .. xd degree first_visit last_visit".
void write_vertex_table(const RangeGraph& graph, std::ostream& out);

}  // namespace rangewalk
