#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rangewalk {

/// Small simple undirected graph in compressed adjacency form, used for
/// block and whole-graph electrical computations. All edges are unit resistors.
class LocalGraph {
 public:
  LocalGraph() = default;
  /// Edges may contain duplicates (either orientation); they are merged.
  LocalGraph(std::uint32_t num_vertices, std::vector<std::pair<std::uint32_t, std::uint32_t>> edges);
  LocalGraph(std::vector<std::uint32_t> offsets, std::vector<std::uint32_t> neighbors)
      : offsets_(std::move(offsets)), neighbors_(std::move(neighbors)) {}

  std::uint32_t num_vertices() const { return offsets_.empty() ? 0 : static_cast<std::uint32_t>(offsets_.size() - 1); }
  std::size_t num_edges() const { return neighbors_.size() / 2; }
  std::span<const std::uint32_t> neighbors(std::uint32_t v) const {
    return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
  }
  std::uint32_t degree(std::uint32_t v) const { return offsets_[v + 1] - offsets_[v]; }
  bool is_tree() const { return num_vertices() > 0 && num_edges() + 1 == num_vertices(); }

 private:
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> neighbors_;
};

/// Hop distances from `source`; -1 for unreachable vertices.
std::vector<std::int64_t> bfs_distances(const LocalGraph& graph, std::uint32_t source);

enum class SolverMethod { Auto, Dense, SparseDirect, ConjugateGradient };

SolverMethod parse_solver_method(const std::string& name);
std::string to_string(SolverMethod method);

struct SolverOptions {
  SolverMethod method = SolverMethod::Auto;
  /// Relative residual tolerance for conjugate gradient.
  double tolerance = 1e-10;
  /// Conjugate gradient iteration cap as a multiple of the system size.
  double max_iteration_factor = 20.0;
  /// Auto uses the dense factorization at or below this many vertices.
  std::uint32_t dense_cap = 256;
  /// Dense all-pairs tables are built only up to this size.
  std::uint32_t all_pairs_cap = 3000;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unit-conductance Laplacian with the ground vertex's row and column removed,
/// factorized once. Solving with a unit current at `source` gives the
/// potentials v with v[ground] = 0 and v[source] = R(ground, source).
class GroundedLaplacian {
 public:
  GroundedLaplacian(const LocalGraph& graph, std::uint32_t ground, const SolverOptions& options = {});
  ~GroundedLaplacian();
  GroundedLaplacian(GroundedLaplacian&&) noexcept;
  GroundedLaplacian& operator=(GroundedLaplacian&&) noexcept;

  std::uint32_t size() const { return size_; }
  std::uint32_t ground() const { return ground_; }
  SolverMethod method() const { return method_; }

  Eigen::VectorXd potentials(std::uint32_t source) const;
  double resistance_to(std::uint32_t target) const;
  /// R(ground, x) for every vertex x.
  std::vector<double> resistances_from_ground() const;

 private:
  struct Impl;
  std::uint32_t size_ = 0;
  std::uint32_t ground_ = 0;
  SolverMethod method_ = SolverMethod::Dense;
  std::unique_ptr<Impl> impl_;
};

/// All-pairs effective resistances from the dense inverse of a grounded
/// Laplacian: R(u, w) = G_uu + G_ww - 2 G_uw.
class DenseResistanceTable {
 public:
  explicit DenseResistanceTable(const LocalGraph& graph, std::uint32_t ground = 0);
  double between(std::uint32_t u, std::uint32_t w) const;
  std::uint32_t size() const { return size_; }

 private:
  std::uint32_t size_ = 0;
  std::uint32_t ground_ = 0;
  Eigen::MatrixXd green_;  // indexed by full vertex ids, ground row/column zero
};

/// Effective resistance from `source` to the set of vertices flagged in
/// `grounded`, all of which are shorted together.
double resistance_to_set(const LocalGraph& graph, std::uint32_t source, const std::vector<bool>& grounded,
                         const SolverOptions& options = {});

using Rational = boost::multiprecision::cpp_rational;

/// Exact R(u, w) by Gaussian elimination over the rationals (small graphs only).
inline constexpr std::uint32_t kExactResistanceCap = 64;
Rational exact_resistance(const LocalGraph& graph, std::uint32_t u, std::uint32_t w);

}  // namespace rangewalk
