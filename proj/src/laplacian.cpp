#include "rangewalk/laplacian.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <deque>
#include <sstream>

namespace rangewalk {

LocalGraph::LocalGraph(std::uint32_t num_vertices, std::vector<std::pair<std::uint32_t, std::uint32_t>> edges) {
  for (auto& [a, b] : edges) {
    if (a > b) std::swap(a, b);
    if (a == b) throw std::invalid_argument("self-loop in local graph");
    if (b >= num_vertices) throw std::invalid_argument("edge endpoint out of range");
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  offsets_.assign(num_vertices + 1, 0);
  for (const auto& [a, b] : edges) {
    ++offsets_[a + 1];
    ++offsets_[b + 1];
  }
  for (std::uint32_t v = 0; v < num_vertices; ++v) offsets_[v + 1] += offsets_[v];
  neighbors_.resize(offsets_.back());
  std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& [a, b] : edges) {
    neighbors_[fill[a]++] = b;
    neighbors_[fill[b]++] = a;
  }
  for (std::uint32_t v = 0; v < num_vertices; ++v) std::sort(neighbors_.begin() + offsets_[v], neighbors_.begin() + offsets_[v + 1]);
}

std::vector<std::int64_t> bfs_distances(const LocalGraph& graph, std::uint32_t source) {
  std::vector<std::int64_t> dist(graph.num_vertices(), -1);
  std::vector<std::uint32_t> queue;
  queue.reserve(graph.num_vertices());
  dist[source] = 0;
  queue.push_back(source);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::uint32_t v = queue[head];
    for (std::uint32_t w : graph.neighbors(v)) {
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

SolverMethod parse_solver_method(const std::string& name) {
  if (name == "auto") return SolverMethod::Auto;
  if (name == "dense") return SolverMethod::Dense;
  if (name == "sparse") return SolverMethod::SparseDirect;
  if (name == "cg") return SolverMethod::ConjugateGradient;
  throw std::invalid_argument("unknown solver method '" + name + "' (expected auto, dense, sparse or cg)");
}

std::string to_string(SolverMethod method) {
  switch (method) {
    case SolverMethod::Auto: return "auto";
    case SolverMethod::Dense: return "dense";
    case SolverMethod::SparseDirect: return "sparse";
    case SolverMethod::ConjugateGradient: return "cg";
  }
  return "auto";
}

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;

// Reduced index of vertex v once the ground has been removed.
inline std::uint32_t reduced(std::uint32_t v, std::uint32_t ground) { return v < ground ? v : v - 1; }

SparseMatrix grounded_sparse(const LocalGraph& graph, std::uint32_t ground) {
  const std::uint32_t n = graph.num_vertices() - 1;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(graph.num_vertices() + 2 * graph.num_edges());
  for (std::uint32_t v = 0; v < graph.num_vertices(); ++v) {
    if (v == ground) continue;
    const std::uint32_t rv = reduced(v, ground);
    triplets.emplace_back(rv, rv, graph.degree(v));
    for (std::uint32_t w : graph.neighbors(v)) {
      if (w != ground) triplets.emplace_back(rv, reduced(w, ground), -1.0);
    }
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

Eigen::MatrixXd grounded_dense(const LocalGraph& graph, std::uint32_t ground) {
  const std::uint32_t n = graph.num_vertices() - 1;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::uint32_t v = 0; v < graph.num_vertices(); ++v) {
    if (v == ground) continue;
    const std::uint32_t rv = reduced(v, ground);
    m(rv, rv) = graph.degree(v);
    for (std::uint32_t w : graph.neighbors(v)) {
      if (w != ground) m(rv, reduced(w, ground)) = -1.0;
    }
  }
  return m;
}

}  // namespace

struct GroundedLaplacian::Impl {
  Eigen::LLT<Eigen::MatrixXd> dense;
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> sparse;
  SparseMatrix matrix;  // kept for conjugate gradient
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;

  Eigen::VectorXd solve(SolverMethod method, const Eigen::VectorXd& rhs) const {
    switch (method) {
      case SolverMethod::Dense: return dense.solve(rhs);
      case SolverMethod::SparseDirect: return sparse.solve(rhs);
      case SolverMethod::ConjugateGradient: {
        Eigen::VectorXd x = cg.solve(rhs);
        if (cg.info() != Eigen::Success) {
          std::ostringstream msg;
          msg << "conjugate gradient did not reach tolerance " << cg.tolerance() << " in " << cg.iterations()
              << " iterations (relative residual " << cg.error() << ")";
          throw SolverError(msg.str());
        }
        return x;
      }
      case SolverMethod::Auto: break;
    }
    throw SolverError("unresolved solver method");
  }
};

GroundedLaplacian::GroundedLaplacian(const LocalGraph& graph, std::uint32_t ground, const SolverOptions& options)
    : size_(graph.num_vertices()), ground_(ground), impl_(std::make_unique<Impl>()) {
  if (ground >= size_) throw std::invalid_argument("ground vertex out of range");
  method_ = options.method;
  if (method_ == SolverMethod::Auto) method_ = size_ <= options.dense_cap ? SolverMethod::Dense : SolverMethod::SparseDirect;
  if (size_ == 1) return;
  switch (method_) {
    case SolverMethod::Dense:
      impl_->dense.compute(grounded_dense(graph, ground));
      if (impl_->dense.info() != Eigen::Success) throw SolverError("dense Cholesky failed (disconnected block?)");
      break;
    case SolverMethod::SparseDirect:
      impl_->sparse.compute(grounded_sparse(graph, ground));
      if (impl_->sparse.info() != Eigen::Success) throw SolverError("sparse LDLT failed (disconnected block?)");
      break;
    case SolverMethod::ConjugateGradient:
      impl_->matrix = grounded_sparse(graph, ground);
      impl_->cg.setTolerance(options.tolerance);
      impl_->cg.setMaxIterations(std::max<Eigen::Index>(
          1, static_cast<Eigen::Index>(options.max_iteration_factor * static_cast<double>(size_ - 1))));
      impl_->cg.compute(impl_->matrix);
      break;
    case SolverMethod::Auto: break;
  }
}

GroundedLaplacian::~GroundedLaplacian() = default;
GroundedLaplacian::GroundedLaplacian(GroundedLaplacian&&) noexcept = default;
GroundedLaplacian& GroundedLaplacian::operator=(GroundedLaplacian&&) noexcept = default;

Eigen::VectorXd GroundedLaplacian::potentials(std::uint32_t source) const {
  if (source >= size_) throw std::invalid_argument("source vertex out of range");
  Eigen::VectorXd full = Eigen::VectorXd::Zero(size_);
  if (source == ground_) return full;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size_ - 1);
  rhs[reduced(source, ground_)] = 1.0;
  const Eigen::VectorXd x = impl_->solve(method_, rhs);
  for (std::uint32_t v = 0; v < size_; ++v) {
    if (v != ground_) full[v] = x[reduced(v, ground_)];
  }
  return full;
}

double GroundedLaplacian::resistance_to(std::uint32_t target) const {
  if (target == ground_) return 0.0;
  return potentials(target)[target];
}

std::vector<double> GroundedLaplacian::resistances_from_ground() const {
  std::vector<double> r(size_, 0.0);
  if (size_ == 1) return r;
  if (method_ == SolverMethod::Dense) {
    const Eigen::MatrixXd inverse = impl_->dense.solve(Eigen::MatrixXd::Identity(size_ - 1, size_ - 1));
    for (std::uint32_t v = 0; v < size_; ++v) {
      if (v != ground_) r[v] = inverse(reduced(v, ground_), reduced(v, ground_));
    }
    return r;
  }
  for (std::uint32_t v = 0; v < size_; ++v) r[v] = resistance_to(v);
  return r;
}

DenseResistanceTable::DenseResistanceTable(const LocalGraph& graph, std::uint32_t ground)
    : size_(graph.num_vertices()), ground_(ground), green_(Eigen::MatrixXd::Zero(size_, size_)) {
  if (ground >= size_) throw std::invalid_argument("ground vertex out of range");
  if (size_ == 1) return;
  Eigen::LLT<Eigen::MatrixXd> llt(grounded_dense(graph, ground));
  if (llt.info() != Eigen::Success) throw SolverError("dense Cholesky failed (disconnected graph?)");
  const Eigen::MatrixXd inverse = llt.solve(Eigen::MatrixXd::Identity(size_ - 1, size_ - 1));
  for (std::uint32_t u = 0; u < size_; ++u) {
    if (u == ground) continue;
    for (std::uint32_t w = 0; w < size_; ++w) {
      if (w != ground) green_(u, w) = inverse(reduced(u, ground), reduced(w, ground));
    }
  }
}

double DenseResistanceTable::between(std::uint32_t u, std::uint32_t w) const {
  if (u == w) return 0.0;
  return green_(u, u) + green_(w, w) - 2.0 * green_(u, w);
}

double resistance_to_set(const LocalGraph& graph, std::uint32_t source, const std::vector<bool>& grounded,
                         const SolverOptions& options) {
  const std::uint32_t n = graph.num_vertices();
  if (source >= n || grounded.size() != n) throw std::invalid_argument("bad arguments to resistance_to_set");
  if (grounded[source]) return 0.0;
  // Collapse the grounded set into one extra vertex and reuse the grounded solver.
  std::vector<std::uint32_t> index(n);
  std::uint32_t next = 0;
  for (std::uint32_t v = 0; v < n; ++v) index[v] = grounded[v] ? ~0u : next++;
  const std::uint32_t sink = next;
  if (sink == n) throw std::invalid_argument("grounded set is empty");
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t v = 0; v < n; ++v) {
    if (grounded[v]) continue;
    for (std::uint32_t w : graph.neighbors(v)) {
      const std::uint32_t a = index[v];
      const std::uint32_t b = grounded[w] ? sink : index[w];
      if (grounded[w] || a < b) edges.emplace_back(a, b);
    }
  }
  // Parallel bonds into the sink are legitimate conductances; keep multiplicity.
  const std::uint32_t m = sink + 1;
  std::vector<Eigen::Triplet<double>> triplets;
  for (const auto& [a, b] : edges) {
    triplets.emplace_back(a, a, 1.0);
    triplets.emplace_back(b, b, 1.0);
    triplets.emplace_back(a, b, -1.0);
    triplets.emplace_back(b, a, -1.0);
  }
  SparseMatrix full(m, m);
  full.setFromTriplets(triplets.begin(), triplets.end());
  const SparseMatrix reduced_matrix = full.topLeftCorner(sink, sink);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sink);
  rhs[index[source]] = 1.0;
  Eigen::VectorXd x;
  SolverMethod method = options.method;
  if (method == SolverMethod::Auto) method = sink <= options.dense_cap ? SolverMethod::Dense : SolverMethod::SparseDirect;
  if (method == SolverMethod::Dense) {
    Eigen::LLT<Eigen::MatrixXd> llt{Eigen::MatrixXd(reduced_matrix)};
    if (llt.info() != Eigen::Success) throw SolverError("dense Cholesky failed in multi-terminal solve");
    x = llt.solve(rhs);
  } else if (method == SolverMethod::SparseDirect) {
    Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt(reduced_matrix);
    if (ldlt.info() != Eigen::Success) throw SolverError("sparse LDLT failed in multi-terminal solve");
    x = ldlt.solve(rhs);
  } else {
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
    cg.setTolerance(options.tolerance);
    cg.setMaxIterations(std::max<Eigen::Index>(1, static_cast<Eigen::Index>(options.max_iteration_factor * sink)));
    cg.compute(reduced_matrix);
    x = cg.solve(rhs);
    if (cg.info() != Eigen::Success) throw SolverError("conjugate gradient did not converge in multi-terminal solve");
  }
  return x[index[source]];
}

Rational exact_resistance(const LocalGraph& graph, std::uint32_t u, std::uint32_t w) {
  const std::uint32_t n = graph.num_vertices();
  if (n > kExactResistanceCap) throw std::invalid_argument("graph too large for exact rational resistance");
  if (u >= n || w >= n) throw std::invalid_argument("vertex out of range");
  if (u == w) return Rational(0);
  // Ground u, inject unit current at w, solve by Gauss-Jordan elimination.
  const std::uint32_t m = n - 1;
  std::vector<std::vector<Rational>> a(m, std::vector<Rational>(m + 1, Rational(0)));
  for (std::uint32_t v = 0; v < n; ++v) {
    if (v == u) continue;
    const std::uint32_t rv = reduced(v, u);
    a[rv][rv] = Rational(graph.degree(v));
    for (std::uint32_t x : graph.neighbors(v)) {
      if (x != u) a[rv][reduced(x, u)] = Rational(-1);
    }
  }
  a[reduced(w, u)][m] = Rational(1);
  for (std::uint32_t col = 0; col < m; ++col) {
    std::uint32_t pivot = col;
    while (pivot < m && a[pivot][col] == 0) ++pivot;
    if (pivot == m) throw SolverError("singular grounded Laplacian (disconnected graph)");
    std::swap(a[pivot], a[col]);
    for (std::uint32_t row = 0; row < m; ++row) {
      if (row == col || a[row][col] == 0) continue;
      const Rational factor = a[row][col] / a[col][col];
      for (std::uint32_t k = col; k <= m; ++k) a[row][k] -= factor * a[col][k];
    }
  }
  const std::uint32_t rw = reduced(w, u);
  return a[rw][m] / a[rw][rw];
}

}  // namespace rangewalk
