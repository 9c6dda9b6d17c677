#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rangewalk/laplacian.hpp"
#include "rangewalk/lattice_walk.hpp"
#include "rangewalk/resistance_metrics.hpp"

namespace rangewalk {

struct VerifyOptions {
  int dimension = 4;
  std::size_t seeds = 20;
  Time horizon = 2000;
  std::uint64_t master_seed = 1;
  SolverOptions solver;
  OracleOptions oracle;
  double tolerance = 1e-8;        ///< relative, resistance oracle and triangle inequality
  Time invariant_horizon = 400;   ///< all-pairs checks run on shorter walks
  std::size_t triples = 2000;     ///< random triples per seed for the triangle inequality
};

struct CheckResult {
  std::string name;
  bool pass = false;
  nlohmann::json measured;
};

/// The path, back-and-forth and 4-cycle fixtures used by the oracle checks.
std::vector<Trajectory> hand_fixtures();

/// find_cut_times against the quadratic reference, exact.
CheckResult check_cut_oracle(const VerifyOptions& options);
/// Blockwise R_G(0, S_k) for every k against one whole-graph solve, plus exact rational fixtures.
CheckResult check_resistance_oracle(const VerifyOptions& options);
/// sum_k Y_k^(n) = mu_G(S_[0,n]) for every n.
CheckResult check_volume_identity(const VerifyOptions& options);
/// Symmetry, triangle inequality, R <= d, and R_G(0, S_{T_m}) >= m - 1.
CheckResult check_metric_invariants(const VerifyOptions& options);

nlohmann::json to_json(const CheckResult& result);

/// {"pass": bool, "checks": [...]}; failures are data, nothing throws on a failed check.
nlohmann::json verify_suite(const VerifyOptions& options);

}  // namespace rangewalk
