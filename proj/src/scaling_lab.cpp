#include "rangewalk/scaling_lab.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <limits>
#include <string>
#include <cmath>
#include <numeric>

#include "rangewalk/random.hpp"
#include "rangewalk/range_walker.hpp"
#include "rangewalk/resistance_metrics.hpp"

namespace rangewalk {

Environment::Environment(Trajectory t, bool buffered)
    : trajectory(std::move(t)),
      graph(build_range_graph(trajectory)),
      cuts(buffered ? find_cut_times(graph) : find_cut_times(graph, 0)) {}

std::uint64_t environment_seed(std::uint64_t master_seed, std::uint64_t index) {
  Engine e = make_stream(master_seed, index + 1000);
  return e();
}

namespace {

void check_grid(const std::vector<Time>& grid) {
  if (grid.empty()) throw std::invalid_argument("n grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 1) throw std::invalid_argument("n grid entries must be positive");
    if (i > 0 && grid[i] <= grid[i - 1]) throw std::invalid_argument("n grid must be strictly increasing");
  }
}

// Per-environment values of f(sample, grid index), skipping provisional entries.
template <class F>
std::vector<double> column(const Ensemble& e, std::size_t i, F&& f) {
  std::vector<double> out;
  out.reserve(e.samples.size());
  for (const auto& s : e.samples) {
    if (!s.provisional[i]) out.push_back(f(s));
  }
  return out;
}

TableEntry table_entry(Time n, const std::vector<double>& values) {
  const MeanSe m = mean_se(values);
  return {n, m.mean, m.standard_error, m.count};
}

double loglog(Time n) { return std::log(std::log(static_cast<double>(n))); }

// Fits log(mean_i f) against log log n over the grid for the given environment subset.
double fitted_slope(const Ensemble& e, const std::vector<std::size_t>& envs,
                    const std::function<double(const EnvironmentSample&, std::size_t)>& f) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < e.grid.size(); ++i) {
    double sum = 0.0;
    std::size_t count = 0;
    for (auto k : envs) {
      const auto& s = e.samples[k];
      if (s.provisional[i]) continue;
      sum += f(s, i);
      ++count;
    }
    if (count == 0 || sum <= 0.0) continue;
    x.push_back(loglog(e.grid[i]));
    y.push_back(std::log(sum / static_cast<double>(count)));
  }
  return least_squares(x, y).slope;
}

struct SlopeResult {
  std::vector<TableEntry> table;
  LinearFit fit;
  Interval slope;
};

SlopeResult slope_of(const Ensemble& e, const std::function<double(const EnvironmentSample&, std::size_t)>& f,
                     const EstimatorOptions& options, std::uint64_t salt) {
  SlopeResult r;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < e.grid.size(); ++i) {
    const auto values = column(e, i, [&](const EnvironmentSample& s) { return f(s, i); });
    if (values.size() < options.min_replicas)
      throw std::invalid_argument("fewer than " + std::to_string(options.min_replicas) + " replicas at n = " +
                                  std::to_string(e.grid[i]));
    r.table.push_back(table_entry(e.grid[i], values));
    if (r.table.back().mean > 0.0) {
      x.push_back(loglog(e.grid[i]));
      y.push_back(std::log(r.table.back().mean));
    }
  }
  if (x.size() < 2) throw std::invalid_argument("degenerate grid: need two points with n >= 3");
  r.fit = least_squares(x, y);
  r.slope = bootstrap(
      e.samples.size(), [&](const std::vector<std::size_t>& idx) { return fitted_slope(e, idx, f); },
      options.bootstrap_seed ^ salt, options.resamples);
  return r;
}

void require_replicas(std::size_t have, const EstimatorOptions& options) {
  if (have < options.min_replicas)
    throw std::invalid_argument("insufficient replicas: " + std::to_string(have) + " < " +
                                std::to_string(options.min_replicas));
}

}  // namespace

EnvironmentSample measure_environment(const Environment& env, const std::vector<Time>& grid,
                                      const SolverOptions& solver, bool metrics) {
  EnvironmentSample s;
  s.seed = env.trajectory.seed();
  s.horizon = env.trajectory.horizon();
  for (Time n : grid) {
    if (n > s.horizon) throw std::out_of_range("grid point beyond the environment horizon");
    s.mu.push_back(mu_measure_prefix(env.graph, n));
    const CutCount c = count_cut_times(env.cuts, n);
    s.cut_count.push_back(c.count);
    s.provisional.push_back(c.provisional);
  }
  if (metrics) {
    const MetricProfile p = metric_profile(env.graph, env.cuts, grid, solver);
    s.resistance = p.resistance;
    s.distance = p.distance;
    for (std::size_t i = 0; i < grid.size(); ++i) s.provisional[i] = s.provisional[i] || p.provisional[i];
  }
  return s;
}

Ensemble run_ensemble(const EnsembleConfig& config) {
  check_grid(config.n_grid);
  if (config.seeds < 1) throw std::invalid_argument("need at least one seed");
  if (config.horizon_margin < 1.0) throw std::invalid_argument("horizon margin must be at least 1");
  Ensemble e;
  e.dimension = config.dimension;
  e.grid = config.n_grid;
  const auto horizon = static_cast<Time>(std::ceil(config.horizon_margin * static_cast<double>(config.n_grid.back())));
  for (std::size_t i = 0; i < config.seeds; ++i) {
    const Environment env(generate_trajectory(config.dimension, horizon, environment_seed(config.master_seed, i)),
                          config.buffered);
    e.samples.push_back(measure_environment(env, e.grid, config.solver, config.metrics));
  }
  return e;
}

ScalarEstimate estimate_lambda_prefix(const Ensemble& e, const EstimatorOptions& options) {
  check_grid(e.grid);
  ScalarEstimate out;
  for (std::size_t i = 0; i < e.grid.size(); ++i) {
    const double n = static_cast<double>(e.grid[i]);
    const auto v = column(e, i, [&](const EnvironmentSample& s) { return static_cast<double>(s.mu[i]) / n; });
    require_replicas(v.size(), options);
    out.per_n.push_back(table_entry(e.grid[i], v));
  }
  std::vector<double> pooled;
  for (const auto& s : e.samples) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < e.grid.size(); ++i) {
      if (s.provisional[i]) continue;
      sum += static_cast<double>(s.mu[i]) / static_cast<double>(e.grid[i]);
      ++count;
    }
    if (count > 0) pooled.push_back(sum / static_cast<double>(count));
  }
  require_replicas(pooled.size(), options);
  const Interval ci = bootstrap_mean(pooled, options.bootstrap_seed, options.resamples);
  const MeanSe m = mean_se(pooled);
  out.value = m.mean;
  out.standard_error = m.standard_error;
  out.lower = ci.lower;
  out.upper = ci.upper;
  out.samples = pooled.size();
  return out;
}

int two_sided_y(const Trajectory& s1, const Trajectory& s2, Time m) {
  if (s1.dimension() != s2.dimension()) throw std::invalid_argument("pair dimensions differ");
  if (m < 0 || m > s1.horizon()) throw std::invalid_argument("truncation must lie in [0, horizon of S^1]");
  const int d = s1.dimension();
  // S^1 must avoid the origin on [1, m]; track how many coordinates are nonzero
  std::vector<std::int64_t> x(d, 0);
  int nonzero = 0;
  const auto step = [&](std::uint8_t code) {
    auto& c = x[StepCode::axis(code)];
    const bool was = c != 0;
    c += StepCode::sign(code);
    nonzero += (c != 0) - was;
  };
  const auto steps1 = s1.steps();
  for (Time k = 0; k < m; ++k) {
    step(steps1[k]);
    if (nonzero == 0) return 0;
  }
  // direction bits of bonds at the origin
  std::uint64_t bonds = 0;
  if (s1.horizon() > 0) bonds |= std::uint64_t{1} << steps1[0];
  std::fill(x.begin(), x.end(), 0);
  nonzero = 0;
  const auto steps2 = s2.steps();
  for (std::size_t k = 0; k < steps2.size(); ++k) {
    if (nonzero == 0) bonds |= std::uint64_t{1} << steps2[k];
    step(steps2[k]);
    if (nonzero == 0) bonds |= std::uint64_t{1} << StepCode::reverse(steps2[k]);
  }
  return std::popcount(bonds);
}

ScalarEstimate estimate_lambda_two_sided(const TwoSidedConfig& config, const EstimatorOptions& options) {
  if (config.truncation > config.steps_each_side) throw std::invalid_argument("truncation exceeds the walk length");
  std::vector<double> ys;
  ys.reserve(config.pairs);
  for (std::size_t i = 0; i < config.pairs; ++i) {
    const auto [a, b] =
        two_sided_trajectory(config.dimension, config.steps_each_side, environment_seed(config.master_seed, i));
    ys.push_back(two_sided_y(a, b, config.truncation));
  }
  require_replicas(ys.size(), options);
  ScalarEstimate out;
  const MeanSe m = mean_se(ys);
  const Interval ci = bootstrap_mean(ys, options.bootstrap_seed, options.resamples);
  out.value = m.mean;
  out.standard_error = m.standard_error;
  out.lower = ci.lower;
  out.upper = ci.upper;
  out.samples = ys.size();
  return out;
}

SlowlyVaryingEstimate estimate_slowly_varying(const Ensemble& e, const EstimatorOptions& options) {
  check_grid(e.grid);
  if (e.samples.empty() || e.samples.front().resistance.empty())
    throw std::invalid_argument("ensemble was run without metric profiles");
  SlowlyVaryingEstimate out;
  const auto n_of = [&](std::size_t i) { return static_cast<double>(e.grid[i]); };
  auto psi = slope_of(e, [&](const EnvironmentSample& s, std::size_t i) { return s.resistance[i] / n_of(i); },
                      options, 1);
  auto phi = slope_of(
      e, [&](const EnvironmentSample& s, std::size_t i) { return static_cast<double>(s.distance[i]) / n_of(i); },
      options, 2);
  auto cut = slope_of(
      e, [&](const EnvironmentSample& s, std::size_t i) { return static_cast<double>(s.cut_count[i]) / n_of(i); },
      options, 3);
  out.psi_tilde = std::move(psi.table);
  out.psi_fit = psi.fit;
  out.psi_slope = psi.slope;
  out.phi = std::move(phi.table);
  out.phi_fit = phi.fit;
  out.phi_slope = phi.slope;
  out.cut_density = std::move(cut.table);
  out.cut_fit = cut.fit;
  out.cut_slope = cut.slope;
  return out;
}

AlphaTauEstimate estimate_alpha_tau(const Ensemble& e, const EstimatorOptions& options) {
  check_grid(e.grid);
  AlphaTauEstimate out;
  const auto norm = [&](std::size_t i) {
    const double n = static_cast<double>(e.grid[i]);
    return n / std::sqrt(std::log(n));
  };
  for (std::size_t i = 0; i < e.grid.size(); ++i) {
    if (e.grid[i] < 2) throw std::invalid_argument("alpha needs n >= 2");
    const auto v = column(e, i, [&](const EnvironmentSample& s) { return static_cast<double>(s.cut_count[i]) / norm(i); });
    require_replicas(v.size(), options);
    out.normalized_counts.push_back(table_entry(e.grid[i], v));
  }
  const std::size_t last = e.grid.size() - 1;
  const auto v = column(e, last, [&](const EnvironmentSample& s) { return static_cast<double>(s.cut_count[last]) / norm(last); });
  const Interval ci = bootstrap_mean(v, options.bootstrap_seed ^ 4, options.resamples);
  out.alpha = out.normalized_counts.back().mean;
  out.alpha_standard_error = out.normalized_counts.back().standard_error;
  out.alpha_lower = ci.lower;
  out.alpha_upper = ci.upper;
  out.tau = 1.0 / out.alpha;
  if (e.grid.size() >= 2) {
    auto cut = slope_of(
        e,
        [&](const EnvironmentSample& s, std::size_t i) {
          return static_cast<double>(s.cut_count[i]) / static_cast<double>(e.grid[i]);
        },
        options, 3);
    out.count_fit = cut.fit;
    out.count_slope = cut.slope;
  }
  return out;
}

std::vector<TableEntry> psi_table(double lambda, const std::vector<TableEntry>& psi_tilde) {
  std::vector<TableEntry> out = psi_tilde;
  for (auto& t : out) {
    t.mean *= lambda;
    t.standard_error *= lambda;
  }
  return out;
}

namespace {

Time walk_time(double t, Time n, double psi) {
  return static_cast<Time>(std::floor(t * static_cast<double>(n) * static_cast<double>(n) * psi));
}

Time environment_length(Time n, double margin, double t_max) {
  return static_cast<Time>(std::ceil(margin * static_cast<double>(n) * std::max(1.0, std::sqrt(t_max))));
}

}  // namespace

double projected_process_steps(const ProcessConfig& config) {
  if (config.t_grid.empty()) return 0.0;
  const double t_max = *std::max_element(config.t_grid.begin(), config.t_grid.end());
  return static_cast<double>(config.environments) *
         static_cast<double>(walk_time(t_max, config.n, config.psi) + 1);
}

ProcessSamples rescaled_process_samples(const ProcessConfig& config) {
  if (config.t_grid.empty()) throw std::invalid_argument("t grid is empty");
  if (!std::is_sorted(config.t_grid.begin(), config.t_grid.end()) || config.t_grid.front() < 0)
    throw std::invalid_argument("t grid must be nonnegative and increasing");
  const double projected = projected_process_steps(config);
  if (projected > config.max_total_steps)
    throw BudgetExceeded("rescaled process at n = " + std::to_string(config.n) + " needs " +
                             std::to_string(projected) + " walk steps, budget is " +
                             std::to_string(config.max_total_steps),
                         projected, config.max_total_steps);
  ProcessSamples out;
  out.n = config.n;
  out.psi = config.psi;
  out.phi = config.phi;
  out.t_grid = config.t_grid;
  for (double t : config.t_grid) out.walk_times.push_back(walk_time(t, config.n, config.psi));
  out.distance.assign(config.t_grid.size(), {});
  out.position.assign(config.t_grid.size(), {});
  const Time length = environment_length(config.n, config.horizon_margin, config.t_grid.back());
  const double dist_scale = static_cast<double>(config.n) * config.phi;
  const double pos_scale = std::sqrt(static_cast<double>(config.n));
  for (std::size_t i = 0; i < config.environments; ++i) {
    const std::uint64_t seed = environment_seed(config.master_seed, i);
    const Environment env(generate_trajectory(config.dimension, length, seed));
    const auto dist = graph_distance_field(env.graph, 0);
    const auto fence = horizon_vertices(env.graph, env.cuts);
    RangeWalker walker(env.graph, 0, seed, 1);
    for (std::size_t j = 0; j < out.walk_times.size(); ++j) {
      while (walker.time() < out.walk_times[j]) {
        if (fence[walker.step()])
          throw std::domain_error("walk reached the environment horizon (seed " + std::to_string(seed) +
                                  "); raise horizon_margin");
      }
      const VertexId v = walker.position();
      out.distance[j].push_back(static_cast<double>(dist[v]) / dist_scale);
      std::vector<double> x;
      for (auto c : env.graph.coords(v)) x.push_back(static_cast<double>(c) / pos_scale);
      out.position[j].push_back(std::move(x));
    }
  }
  return out;
}

ProcessComparisonReport compare_to_limit(const ProcessSamples& samples, std::uint64_t seed, std::size_t resamples,
                                         std::size_t min_samples) {
  ProcessComparisonReport report;
  report.n = samples.n;
  for (std::size_t j = 0; j < samples.t_grid.size(); ++j) {
    const double t = samples.t_grid[j];
    const auto& d = samples.distance[j];
    if (d.size() < min_samples)
      throw std::invalid_argument("sample shortfall: " + std::to_string(d.size()) + " < " + std::to_string(min_samples));
    LimitComparison row;
    row.t = t;
    row.samples = d.size();
    if (t > 0) {
      const auto cdf = [t](double x) { return half_normal_cdf(x, t); };
      row.ks = ks_statistic(d, cdf);
      const Interval ci = bootstrap(
          d.size(),
          [&](const std::vector<std::size_t>& idx) {
            std::vector<double> r;
            r.reserve(idx.size());
            for (auto k : idx) r.push_back(d[k]);
            return ks_statistic(std::move(r), cdf);
          },
          seed ^ j, resamples);
      row.ks_lower = ci.lower;
      row.ks_upper = ci.upper;
      row.ks_critical = ks_critical_value(d.size());
    }
    const auto& pos = samples.position[j];
    const std::size_t dim = pos.front().size();
    double m2 = 0.0, m4 = 0.0, radial = 0.0;
    for (std::size_t a = 0; a < dim; ++a) {
      std::vector<double> comp;
      for (const auto& p : pos) comp.push_back(p[a]);
      const MeanSe ms = mean_se(comp);
      row.component_mean.push_back(ms.mean);
      row.component_mean_se.push_back(ms.standard_error);
      double var = 0.0;
      for (double c : comp) var += c * c;
      row.component_variance.push_back(var / static_cast<double>(comp.size()));
    }
    for (const auto& p : pos) {
      double r2 = 0.0;
      for (double c : p) {
        r2 += c * c;
        m2 += c * c;
        m4 += c * c * c * c;
      }
      radial += r2;
    }
    const double count = static_cast<double>(pos.size());
    row.radial_second_moment = radial / count;
    row.radial_reference = static_cast<double>(dim) * half_normal_mean(t);
    const auto [lo, hi] = std::minmax_element(row.component_variance.begin(), row.component_variance.end());
    const double mean_var = m2 / (count * static_cast<double>(dim));
    row.isotropy_spread = mean_var > 0 ? (*hi - *lo) / mean_var : 0.0;
    row.kurtosis = mean_var > 0 ? (m4 / (count * static_cast<double>(dim))) / (mean_var * mean_var) : 0.0;
    row.kurtosis_reference = subordinated_kurtosis();
    report.rows.push_back(std::move(row));
  }
  return report;
}

HeatKernelProfile heat_kernel_profile(const HeatKernelProfileConfig& config) {
  if (config.environments < 1) throw std::invalid_argument("need at least one environment");
  HeatKernelProfile out;
  out.n = config.n;
  out.walk_time = walk_time(config.t, config.n, config.psi);
  const double x_max = config.x_grid.empty() ? 0.0 : *std::max_element(config.x_grid.begin(), config.x_grid.end());
  const Time length = std::max(environment_length(config.n, config.horizon_margin, config.t),
                               static_cast<Time>(std::ceil(2.0 * x_max * static_cast<double>(config.n))) + 1);
  std::vector<std::vector<double>> values(config.x_grid.size());
  for (std::size_t i = 0; i < config.environments; ++i) {
    const std::uint64_t seed = environment_seed(config.master_seed, i);
    const Environment env(generate_trajectory(config.dimension, length, seed));
    std::vector<VertexId> targets;
    for (double x : config.x_grid)
      targets.push_back(env.graph.vertex_at(static_cast<Time>(std::floor(x * static_cast<double>(config.n)))));
    std::vector<double> p(targets.size());
    if (config.exact) {
      const auto kernel = exact_smoothed_kernel(env.graph, out.walk_time, 0);
      for (std::size_t k = 0; k < targets.size(); ++k) p[k] = kernel[targets[k]];
    } else {
      p = heat_kernel_estimate(env.graph, out.walk_time, targets, config.replicas, seed).values;
    }
    for (std::size_t k = 0; k < targets.size(); ++k)
      values[k].push_back(config.lambda * static_cast<double>(config.n) * p[k]);
  }
  for (std::size_t k = 0; k < config.x_grid.size(); ++k) {
    const MeanSe m = mean_se(values[k]);
    const double target = half_normal_density(config.x_grid[k], config.t);
    out.rows.push_back({config.x_grid[k], m.mean, m.standard_error, target});
    out.sup_deviation = std::max(out.sup_deviation, std::abs(m.mean - target));
  }
  return out;
}

ExitScaling exit_time_scaling(const std::vector<Environment>& environments, const std::vector<double>& radii,
                              std::size_t walks_per_environment, std::uint64_t seed, double band, Time max_steps) {
  if (environments.empty()) throw std::invalid_argument("no environments");
  if (radii.empty() || !std::is_sorted(radii.begin(), radii.end()) || radii.front() <= 0)
    throw std::invalid_argument("radii must be positive and ascending");
  ExitScaling out;
  out.band = band;
  const std::size_t nr = radii.size();
  std::vector<std::vector<double>> taus(nr), psi(nr), phi(nr);
  std::vector<std::size_t> censored(nr, 0);
  std::vector<Time> index;
  for (double r : radii) index.push_back(std::max<Time>(1, static_cast<Time>(std::floor(r))));
  for (std::size_t e = 0; e < environments.size(); ++e) {
    const Environment& env = environments[e];
    const auto profile = metric_profile(env.graph, env.cuts, index);
    for (std::size_t i = 0; i < nr; ++i) {
      psi[i].push_back(profile.resistance[i] / static_cast<double>(index[i]));
      phi[i].push_back(static_cast<double>(profile.distance[i]) / static_cast<double>(index[i]));
    }
    const auto dist = graph_distance_field(env.graph, 0);
    const auto fence = horizon_vertices(env.graph, env.cuts);
    ExitOptions options;
    options.max_steps = max_steps;
    options.forbidden = &fence;
    const std::int64_t reach = *std::max_element(dist.begin(), dist.end());
    std::vector<double> usable;
    for (double r : radii) {
      if (r <= static_cast<double>(reach)) usable.push_back(r);
    }
    for (std::size_t w = 0; w < walks_per_environment; ++w) {
      const auto samples =
          exit_times(env.graph, dist, usable, seed ^ (environment_seed(e, w) + 0x9e3779b97f4a7c15ULL), options);
      for (std::size_t i = 0; i < nr; ++i) {
        if (i >= samples.size() || samples[i].censored) {
          ++censored[i];
        } else {
          taus[i].push_back(static_cast<double>(samples[i].tau));
        }
      }
    }
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 0; i < nr; ++i) {
    if (taus[i].empty()) throw std::domain_error("every exit sample censored at r = " + std::to_string(radii[i]));
    ExitRow row;
    row.r = radii[i];
    row.samples = taus[i].size();
    row.censored = censored[i];
    const MeanSe m = mean_se(taus[i]);
    row.mean_tau = m.mean;
    row.standard_error = m.standard_error;
    row.psi_tilde = mean_se(psi[i]).mean;
    row.phi = mean_se(phi[i]).mean;
    row.ratio = row.mean_tau / (row.r * row.r * row.psi_tilde / (row.phi * row.phi));
    lo = std::min(lo, row.ratio);
    hi = std::max(hi, row.ratio);
    out.rows.push_back(row);
  }
  out.spread = hi / lo;
  out.within_band = out.spread <= band;
  return out;
}

ExitScaling exit_time_scaling(const ExitConfig& config) {
  if (config.radii.empty()) throw std::invalid_argument("radius grid is empty");
  const auto length = static_cast<Time>(std::ceil(config.horizon_factor * config.radii.back()));
  std::vector<Environment> envs;
  envs.reserve(config.environments);
  for (std::size_t i = 0; i < config.environments; ++i)
    envs.emplace_back(generate_trajectory(config.dimension, length, environment_seed(config.master_seed, i)));
  return exit_time_scaling(envs, config.radii, config.walks_per_environment, config.master_seed, config.band);
}

}  // namespace rangewalk
