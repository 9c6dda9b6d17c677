#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace rangewalk {

struct MeanSe {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t count = 0;
};

MeanSe mean_se(std::span<const double> values);

struct Interval {
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double standard_error = 0.0;
};

/// Percentile bootstrap for an arbitrary statistic of resampled indices.
/// `statistic` receives a vector of indices into the original sample.
Interval bootstrap(std::size_t sample_size, const std::function<double(const std::vector<std::size_t>&)>& statistic,
                   std::uint64_t seed, std::size_t resamples = 1000, double level = 0.95);

Interval bootstrap_mean(std::span<const double> values, std::uint64_t seed, std::size_t resamples = 1000,
                        double level = 0.95);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;  ///< ordinary least-squares standard error (0 for two points)
  std::size_t points = 0;
};

LinearFit least_squares(std::span<const double> x, std::span<const double> y);

/// sup_x |F_n(x) - F(x)| for the empirical distribution of `samples`.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);
/// Asymptotic Kolmogorov tail P(sqrt(n) D > z).
double kolmogorov_tail(double z);
/// Critical D at level alpha for sample size n (asymptotic with the Stephens correction).
double ks_critical_value(std::size_t n, double alpha = 0.05);

/// CDF of |B_t| for a standard Brownian motion B.
double half_normal_cdf(double x, double t = 1.0);
/// E|B_t| = sqrt(2t / pi).
double half_normal_mean(double t);
/// Density of |B_t| at x: sqrt(2 / (pi t)) exp(-x^2 / 2t).
double half_normal_density(double x, double t);
/// Kurtosis of one component of W_{|B_t|}: 3 E|B_t|^2 / (E|B_t|)^2 = 3 pi / 2.
double subordinated_kurtosis();

}  // namespace rangewalk
