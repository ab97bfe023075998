#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace fpp {

/// Pairwise (cascade) summation; the result depends only on the input order.
double pairwise_sum(std::span<const double> values);

double sample_mean(std::span<const double> values);
/// Unbiased sample variance (divisor n - 1); 0 for fewer than two values.
double sample_variance(std::span<const double> values);
/// sqrt(sample_variance / n).
double standard_error(std::span<const double> values);

/// Linear-interpolation quantile of sorted data (Hyndman-Fan type 7).
double quantile_sorted(std::span<const double> sorted, double p);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

inline constexpr int kDefaultBootstrapResamples = 1000;

/// Percentile bootstrap interval for statistic(sample) at the given level.
/// Resample b draws indices from SplitMix64(derive_seed(seed, b)).
Interval bootstrap_interval(std::span<const double> data,
                            const std::function<double(std::span<const double>)>& statistic,
                            std::uint64_t seed, int resamples = kDefaultBootstrapResamples,
                            double level = 0.95);

/// Paired version: each resample draws one index set and applies it to every
/// series, which must have equal length.
Interval bootstrap_interval_paired(
    std::span<const std::vector<double>> series,
    const std::function<double(std::span<const std::vector<double>>)>& statistic,
    std::uint64_t seed, int resamples = kDefaultBootstrapResamples, double level = 0.95);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares y = intercept + slope x. Needs two distinct x.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic Kolmogorov
/// distribution and the Stephens small-sample correction.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

}  // namespace fpp
