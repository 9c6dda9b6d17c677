#include "rangewalk/statistics.hpp"

#include <algorithm>
#include <boost/math/statistics/linear_regression.hpp>
#include <boost/math/statistics/univariate_statistics.hpp>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "rangewalk/random.hpp"

namespace rangewalk {

MeanSe mean_se(std::span<const double> values) {
  MeanSe out;
  out.count = values.size();
  if (values.empty()) return out;
  if (values.size() == 1) {
    out.mean = values[0];
    return out;
  }
  const auto [mean, variance] = boost::math::statistics::mean_and_sample_variance(values.begin(), values.end());
  out.mean = mean;
  out.standard_error = std::sqrt(variance / static_cast<double>(values.size()));
  return out;
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

Interval bootstrap(std::size_t sample_size, const std::function<double(const std::vector<std::size_t>&)>& statistic,
                   std::uint64_t seed, std::size_t resamples, double level) {
  if (sample_size == 0) throw std::invalid_argument("bootstrap needs a nonempty sample");
  if (resamples < 2) throw std::invalid_argument("bootstrap needs at least two resamples");
  std::vector<std::size_t> index(sample_size);
  std::iota(index.begin(), index.end(), 0);
  Interval out;
  out.estimate = statistic(index);
  BoundedDraws draw(make_stream(seed, 0xB007));
  std::vector<double> stats;
  stats.reserve(resamples);
  for (std::size_t b = 0; b < resamples; ++b) {
    for (auto& i : index) i = draw(static_cast<std::uint32_t>(sample_size));
    stats.push_back(statistic(index));
  }
  const MeanSe spread = mean_se(stats);
  out.standard_error = spread.standard_error * std::sqrt(static_cast<double>(resamples));
  std::sort(stats.begin(), stats.end());
  out.lower = quantile_sorted(stats, (1.0 - level) / 2.0);
  out.upper = quantile_sorted(stats, (1.0 + level) / 2.0);
  return out;
}

Interval bootstrap_mean(std::span<const double> values, std::uint64_t seed, std::size_t resamples, double level) {
  return bootstrap(
      values.size(),
      [&](const std::vector<std::size_t>& idx) {
        double s = 0.0;
        for (auto i : idx) s += values[i];
        return s / static_cast<double>(idx.size());
      },
      seed, resamples, level);
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("x and y lengths differ");
  if (x.size() < 2) throw std::invalid_argument("regression needs at least two points");
  const std::vector<double> xs(x.begin(), x.end()), ys(y.begin(), y.end());
  const auto [mx, vx] = boost::math::statistics::mean_and_sample_variance(xs);
  if (vx == 0.0) throw std::invalid_argument("regression on a degenerate grid");
  const auto [c0, c1] = boost::math::statistics::simple_ordinary_least_squares(xs, ys);
  LinearFit fit;
  fit.points = x.size();
  fit.slope = c1;
  fit.intercept = c0;
  if (x.size() > 2) {
    const double n = static_cast<double>(x.size());
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - c0 - c1 * x[i];
      rss += r * r;
    }
    fit.slope_se = std::sqrt(rss / (n - 2) / (vx * (n - 1)));
  }
  return fit;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("KS statistic of an empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double kolmogorov_tail(double z) {
  if (z <= 0.0) return 1.0;
  if (z < 0.27) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * z * z);
    sum += (k % 2 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_critical_value(std::size_t n, double alpha) {
  if (n == 0) throw std::invalid_argument("sample size must be positive");
  double lo = 0.0, hi = 5.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (kolmogorov_tail(mid) > alpha ? lo : hi) = mid;
  }
  const double rn = std::sqrt(static_cast<double>(n));
  return hi / (rn + 0.12 + 0.11 / rn);
}

double half_normal_cdf(double x, double t) {
  if (x <= 0.0) return 0.0;
  return std::erf(x / std::sqrt(2.0 * t));
}

double half_normal_mean(double t) { return std::sqrt(2.0 * t / std::numbers::pi); }

double half_normal_density(double x, double t) {
  if (x < 0.0) return 0.0;
  return std::sqrt(2.0 / (std::numbers::pi * t)) * std::exp(-x * x / (2.0 * t));
}

double subordinated_kurtosis() { return 1.5 * std::numbers::pi; }

}  // namespace rangewalk
