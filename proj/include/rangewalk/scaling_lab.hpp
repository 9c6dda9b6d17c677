#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rangewalk/cut_structure.hpp"
#include "rangewalk/laplacian.hpp"
#include "rangewalk/range_graph.hpp"
#include "rangewalk/statistics.hpp"

namespace rangewalk {

/// One sampled environment: trajectory, its range graph and horizon cut times.
struct Environment {
  Trajectory trajectory;
  RangeGraph graph;
  CutTimeSet cuts;

  /// `buffered = false` settles every cut time (no provisional buffer).
  explicit Environment(Trajectory t, bool buffered = true);
};

/// Seed of environment `index` under `master_seed`.
std::uint64_t environment_seed(std::uint64_t master_seed, std::uint64_t index);

/// Raised before a run whose projected walk length exceeds its step budget.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, double projected, double budget)
      : std::runtime_error(what), projected_steps(projected), budget_steps(budget) {}
  double projected_steps;
  double budget_steps;
};

struct EnsembleConfig {
  int dimension = 4;
  std::vector<Time> n_grid;
  std::size_t seeds = 30;
  std::uint64_t master_seed = 1;
  double horizon_margin = 1.25;  ///< N = ceil(margin * max n)
  SolverOptions solver;
  bool metrics = true;           ///< compute R_G and d_G along the grid
  bool buffered = true;          ///< provisional buffer at the horizon
};

/// Grid observables of one environment.
struct EnvironmentSample {
  std::uint64_t seed = 0;
  Time horizon = 0;
  std::vector<std::int64_t> mu;          ///< mu_G(S_[0,n])
  std::vector<double> resistance;        ///< R_G(0, S_n)
  std::vector<std::int64_t> distance;    ///< d_G(0, S_n)
  std::vector<Time> cut_count;           ///< N_n
  std::vector<bool> provisional;         ///< excluded from estimates
};

struct Ensemble {
  int dimension = 0;
  std::vector<Time> grid;
  std::vector<EnvironmentSample> samples;
};

EnvironmentSample measure_environment(const Environment& env, const std::vector<Time>& grid,
                                      const SolverOptions& solver = {}, bool metrics = true);
Ensemble run_ensemble(const EnsembleConfig& config);

struct TableEntry {
  Time n = 0;
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t count = 0;
};

struct ScalarEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t samples = 0;
  std::vector<TableEntry> per_n;
};

struct EstimatorOptions {
  std::size_t min_replicas = 30;
  std::uint64_t bootstrap_seed = 0x5eed;
  std::size_t resamples = 1000;
};

/// mu_G(S_[0,n]) / n per grid point, pooled over the grid per environment,
/// bootstrap CI over environments.
ScalarEstimate estimate_lambda_prefix(const Ensemble& ensemble, const EstimatorOptions& options = {});

/// Y for one pair: edges at 0 traversed by S^2 plus {S^1_0, S^1_1}, times the
/// indicator that S^1 avoids 0 on [1, m]. m = 0 leaves the indicator vacuous.
int two_sided_y(const Trajectory& s1, const Trajectory& s2, Time m);

struct TwoSidedConfig {
  int dimension = 4;
  std::size_t pairs = 20000;
  Time steps_each_side = 4096;
  Time truncation = 4096;
  std::uint64_t master_seed = 1;
};

ScalarEstimate estimate_lambda_two_sided(const TwoSidedConfig& config, const EstimatorOptions& options = {});

struct SlowlyVaryingEstimate {
  std::vector<TableEntry> psi_tilde;    ///< mean R_G(0,S_n) / n
  std::vector<TableEntry> phi;          ///< mean d_G(0,S_n) / n
  std::vector<TableEntry> cut_density;  ///< mean N_n / n
  LinearFit psi_fit, phi_fit, cut_fit;  ///< log(mean) against log log n
  Interval psi_slope, phi_slope, cut_slope;
};

SlowlyVaryingEstimate estimate_slowly_varying(const Ensemble& ensemble, const EstimatorOptions& options = {});

struct AlphaTauEstimate {
  std::vector<TableEntry> normalized_counts;  ///< N_n / (n (log n)^{-1/2})
  double alpha = 0.0;
  double alpha_lower = 0.0;
  double alpha_upper = 0.0;
  double alpha_standard_error = 0.0;
  double tau = 0.0;                           ///< 1 / alpha
  LinearFit count_fit;                        ///< log(N_n / n) against log log n
  Interval count_slope;
};

/// alpha is read at the largest grid point, where the (log n)^{-1/2} law is closest.
AlphaTauEstimate estimate_alpha_tau(const Ensemble& ensemble, const EstimatorOptions& options = {});

/// psi(n) = lambda * psi_tilde(n) entrywise.
std::vector<TableEntry> psi_table(double lambda, const std::vector<TableEntry>& psi_tilde);

struct ProcessConfig {
  int dimension = 4;
  Time n = 1024;
  std::vector<double> t_grid{1.0};
  double psi = 1.0;  ///< self-normalisation psi_hat(n)
  double phi = 1.0;  ///< self-normalisation phi_hat(n)
  std::size_t environments = 500;
  std::uint64_t master_seed = 1;
  double horizon_margin = 16.0;  ///< environment length in units of n sqrt(max t)
  double max_total_steps = 2e10;
};

struct ProcessSamples {
  Time n = 0;
  double psi = 0.0;
  double phi = 0.0;
  std::vector<double> t_grid;
  std::vector<Time> walk_times;                       ///< floor(t n^2 psi)
  std::vector<std::vector<double>> distance;          ///< [t][env] d_G(0, X) / (n phi)
  std::vector<std::vector<std::vector<double>>> position;  ///< [t][env][axis] X / sqrt(n)
};

double projected_process_steps(const ProcessConfig& config);
ProcessSamples rescaled_process_samples(const ProcessConfig& config);

struct LimitComparison {
  double t = 0.0;
  std::size_t samples = 0;
  double ks = 0.0;
  double ks_lower = 0.0;
  double ks_upper = 0.0;
  double ks_critical = 0.0;
  std::vector<double> component_mean;
  std::vector<double> component_mean_se;
  std::vector<double> component_variance;
  double isotropy_spread = 0.0;         ///< (max - min) / mean of component variances
  double radial_second_moment = 0.0;    ///< E |n^{-1/2} X|^2
  double radial_reference = 0.0;        ///< d * E|B_t| for standard W
  double kurtosis = 0.0;                ///< pooled component kurtosis
  double kurtosis_reference = 0.0;      ///< 3 pi / 2
};

struct ProcessComparisonReport {
  Time n = 0;
  std::vector<LimitComparison> rows;
};

ProcessComparisonReport compare_to_limit(const ProcessSamples& samples, std::uint64_t seed = 0x5eed,
                                         std::size_t resamples = 500, std::size_t min_samples = 500);

struct HeatKernelProfileConfig {
  int dimension = 4;
  Time n = 256;
  double t = 1.0;
  double psi = 1.0;
  double lambda = 1.0;
  std::vector<double> x_grid{0.0};
  std::size_t environments = 100;
  std::size_t replicas = 10000;
  std::uint64_t master_seed = 1;
  double horizon_margin = 16.0;
  bool exact = false;  ///< exact propagation instead of Monte Carlo
};

struct HeatKernelProfileRow {
  double x = 0.0;
  double mean = 0.0;  ///< environment average of lambda n p_T(0, S_{floor(nx)})
  double standard_error = 0.0;
  double target = 0.0;
};

struct HeatKernelProfile {
  Time n = 0;
  Time walk_time = 0;
  std::vector<HeatKernelProfileRow> rows;
  double sup_deviation = 0.0;
};

HeatKernelProfile heat_kernel_profile(const HeatKernelProfileConfig& config);

struct ExitRow {
  double r = 0.0;
  std::size_t samples = 0;
  std::size_t censored = 0;
  double mean_tau = 0.0;
  double standard_error = 0.0;
  double psi_tilde = 0.0;
  double phi = 0.0;
  double ratio = 0.0;  ///< mean tau / (r^2 psi_tilde(r) phi(r)^-2)
};

struct ExitScaling {
  std::vector<ExitRow> rows;
  double spread = 0.0;  ///< max ratio / min ratio
  double band = 3.0;
  bool within_band = false;
};

/// Walks from 0 on each environment; psi_tilde(r) and phi(r) come from the same environments.
ExitScaling exit_time_scaling(const std::vector<Environment>& environments, const std::vector<double>& radii,
                              std::size_t walks_per_environment, std::uint64_t seed, double band = 3.0,
                              Time max_steps = Time{1} << 34);

struct ExitConfig {
  int dimension = 4;
  std::vector<double> radii{8, 16, 32, 64, 128, 256};
  std::size_t environments = 200;
  std::size_t walks_per_environment = 10;
  std::uint64_t master_seed = 1;
  double horizon_factor = 32.0;  ///< environment length / max radius
  double band = 3.0;
};

ExitScaling exit_time_scaling(const ExitConfig& config);

}  // namespace rangewalk
