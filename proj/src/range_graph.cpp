#include "rangewalk/range_graph.hpp"

#include <algorithm>
#include <bit>
#include <boost/crc.hpp>
#include <ostream>
#include <stdexcept>

namespace rangewalk {

namespace {

constexpr VertexId kEmpty = ~VertexId{0};

constexpr std::uint64_t kMultipliers[] = {0x9E3779B97F4A7C15ull, 0xC2B2AE3D27D4EB4Full, 0x165667B19E3779F9ull,
                                          0xD6E8FEB86659FD93ull, 0xFF51AFD7ED558CCDull, 0xC4CEB9FE1A85EC53ull,
                                          0x94D049BB133111EBull, 0xBF58476D1CE4E5B9ull};

std::uint64_t hash_coords(std::span<const std::int32_t> x) {
  std::uint64_t h = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    h += static_cast<std::uint64_t>(static_cast<std::uint32_t>(x[i])) * kMultipliers[i % 8];
    h = std::rotl(h, 23);
  }
  h ^= h >> 31;
  h *= 0xBF58476D1CE4E5B9ull;
  h ^= h >> 29;
  return h;
}

}  // namespace

RangeGraph build_window_graph(const Trajectory& trajectory, Time m, Time n);

std::size_t RangeGraph::slot_of(std::span<const std::int32_t> x) const {
  const std::size_t mask = table_.size() - 1;
  std::size_t slot = hash_coords(x) & mask;
  while (true) {
    const VertexId id = table_[slot];
    if (id == kEmpty) return slot;
    if (std::equal(x.begin(), x.end(), coords_.begin() + static_cast<std::ptrdiff_t>(id) * dimension_)) return slot;
    slot = (slot + 1) & mask;
  }
}

LatticePoint RangeGraph::point(VertexId v) const {
  const auto c = coords(v);
  return {{c.begin(), c.end()}};
}

std::optional<VertexId> RangeGraph::find(const LatticePoint& p) const {
  if (p.dimension() != dimension_) return std::nullopt;
  std::vector<std::int32_t> x(dimension_);
  for (int i = 0; i < dimension_; ++i) {
    if (p.coords[i] < INT32_MIN || p.coords[i] > INT32_MAX) return std::nullopt;
    x[i] = static_cast<std::int32_t>(p.coords[i]);
  }
  const VertexId id = table_[slot_of(x)];
  if (id == kEmpty) return std::nullopt;
  return id;
}

std::uint32_t RangeGraph::canonical_hash() const {
  boost::crc_32_type crc;
  auto feed = [&](const auto& vec) { crc.process_bytes(vec.data(), vec.size() * sizeof(vec[0])); };
  crc.process_bytes(&dimension_, sizeof dimension_);
  crc.process_bytes(&start_time_, sizeof start_time_);
  feed(coords_);
  feed(offsets_);
  feed(neighbors_);
  feed(first_visit_);
  feed(last_visit_);
  return crc.checksum();
}

RangeGraph build_window_graph(const Trajectory& trajectory, Time m, Time n) {
  RangeGraph g;
  const int d = trajectory.dimension();
  const int slots = 2 * d;
  g.dimension_ = d;
  g.start_time_ = m;
  const auto length = static_cast<std::size_t>(n - m + 1);
  g.trace_.resize(length);

  std::size_t capacity = std::bit_ceil(std::max<std::size_t>(16, 2 * length));
  g.table_.assign(capacity, kEmpty);
  g.coords_.reserve(std::min<std::size_t>(length, 1 << 20) * d);

  std::vector<VertexId> links;  // links[v * slots + code] = neighbour in that direction
  std::vector<std::int32_t> x(d);
  const auto steps = trajectory.steps();

  auto insert = [&](Time k) -> VertexId {
    std::size_t slot = g.slot_of(x);
    VertexId id = g.table_[slot];
    if (id == kEmpty) {
      id = static_cast<VertexId>(g.first_visit_.size());
      g.table_[slot] = id;
      g.coords_.insert(g.coords_.end(), x.begin(), x.end());
      g.first_visit_.push_back(k);
      g.last_visit_.push_back(k);
      links.resize(links.size() + slots, kEmpty);
    } else {
      g.last_visit_[id] = k;
    }
    return id;
  };

  trajectory.for_each_point(
      [&](Time k, std::span<const std::int64_t> p) {
        for (int i = 0; i < d; ++i) x[i] = static_cast<std::int32_t>(p[i]);
        const VertexId id = insert(k);
        g.trace_[static_cast<std::size_t>(k - m)] = id;
        if (k > m) {
          const VertexId prev = g.trace_[static_cast<std::size_t>(k - m - 1)];
          const std::uint8_t code = steps[static_cast<std::size_t>(k - 1)];
          links[static_cast<std::size_t>(prev) * slots + code] = id;
          links[static_cast<std::size_t>(id) * slots + StepCode::reverse(code)] = prev;
        }
      },
      m, n);

  const std::size_t nv = g.first_visit_.size();
  g.offsets_.assign(nv + 1, 0);
  for (std::size_t v = 0; v < nv; ++v) {
    std::uint32_t deg = 0;
    for (int c = 0; c < slots; ++c) deg += links[v * slots + c] != kEmpty;
    g.offsets_[v + 1] = g.offsets_[v] + deg;
  }
  g.neighbors_.resize(g.offsets_[nv]);
  for (std::size_t v = 0; v < nv; ++v) {
    auto out = g.neighbors_.begin() + g.offsets_[v];
    auto begin = out;
    for (int c = 0; c < slots; ++c) {
      if (links[v * slots + c] != kEmpty) *out++ = links[v * slots + c];
    }
    std::sort(begin, out);
  }
  return g;
}

RangeGraph build_range_graph(const Trajectory& trajectory) { return build_window_graph(trajectory, 0, trajectory.horizon()); }

RangeGraph subtrace_graph(const Trajectory& trajectory, SubtraceWindow window) {
  if (window.m < 0 || window.m >= window.n || window.n > trajectory.horizon()) {
    throw std::invalid_argument("subtrace window must satisfy 0 <= m < n <= N");
  }
  return build_window_graph(trajectory, window.m, window.n);
}

std::int64_t mu_measure_prefix(const RangeGraph& graph, Time n) {
  if (n < graph.start_time() || n > graph.end_time()) throw std::out_of_range("time beyond graph horizon");
  // Ids follow first-visit order, so the vertices seen by time n are 0..max id.
  VertexId newest = 0;
  const auto trace = graph.trace();
  for (Time k = graph.start_time(); k <= n; ++k) newest = std::max(newest, trace[static_cast<std::size_t>(k - graph.start_time())]);
  std::int64_t total = 0;
  for (VertexId v = 0; v <= newest; ++v) total += graph.degree(v);
  return total;
}

std::vector<int> last_exit_decomposition(const RangeGraph& graph, const Trajectory& trajectory, Time n) {
  if (graph.start_time() != 0 || graph.end_time() != trajectory.horizon()) {
    throw std::invalid_argument("graph does not match trajectory");
  }
  const Time horizon = trajectory.horizon();
  if (n < 0 || n > horizon) throw std::out_of_range("time beyond graph horizon");
  const auto steps = trajectory.steps();
  const auto trace = graph.trace();
  // Bit c of seen[v] records that the bond leaving v in direction c has been traversed.
  std::vector<std::uint64_t> seen(graph.num_vertices(), 0);
  std::vector<int> y(static_cast<std::size_t>(horizon) + 1, 0);
  for (Time k = 0; k <= horizon; ++k) {
    const VertexId x = trace[k];
    if (k < horizon) {
      // E(G_{k+1}) includes the bond {S_k, S_{k+1}}.
      const std::uint8_t code = steps[k];
      seen[x] |= std::uint64_t{1} << code;
      seen[trace[k + 1]] |= std::uint64_t{1} << StepCode::reverse(code);
    }
    if (graph.last_visit(x) == k && graph.first_visit(x) <= n) y[k] = std::popcount(seen[x]);
  }
  return y;
}

void write_edge_list(const RangeGraph& graph, std::ostream& out) {
  for (VertexId u = 0; u < graph.num_vertices(); ++u) {
    for (VertexId v : graph.neighbors(u)) {
      if (u < v) out << u << ' ' << v << '\n';
    }
  }
}

void write_vertex_table(const RangeGraph& graph, std::ostream& out) {
  for (VertexId v = 0; v < graph.num_vertices(); ++v) {
    out << v;
    for (auto c : graph.coords(v)) out << ' ' << c;
    out << ' ' << graph.degree(v) << ' ' << graph.first_visit(v) << ' ' << graph.last_visit(v) << '\n';
  }
}

}  // namespace rangewalk
