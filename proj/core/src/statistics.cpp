#include "fpp/statistics.hpp"

#include <algorithm>
#include <cmath>

#include "fpp/error.hpp"
#include "fpp/mix.hpp"

namespace fpp {

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double sample_mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return pairwise_sum(values) / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = sample_mean(values);
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - m) * (values[i] - m);
  return pairwise_sum(sq) / static_cast<double>(values.size() - 1);
}

double standard_error(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  return std::sqrt(sample_variance(values) / static_cast<double>(values.size()));
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw InvalidArgument("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

namespace {

Interval percentile_interval(std::vector<double>& stats, double level) {
  std::sort(stats.begin(), stats.end());
  const double tail = (1.0 - level) / 2.0;
  return {quantile_sorted(stats, tail), quantile_sorted(stats, 1.0 - tail)};
}

}  // namespace

Interval bootstrap_interval(std::span<const double> data,
                            const std::function<double(std::span<const double>)>& statistic,
                            std::uint64_t seed, int resamples, double level) {
  if (data.empty()) throw InvalidArgument("bootstrap of an empty sample");
  if (resamples < 1) throw InvalidArgument("bootstrap needs at least one resample");
  std::vector<double> stats(static_cast<std::size_t>(resamples));
  std::vector<double> draw(data.size());
  for (int b = 0; b < resamples; ++b) {
    SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(b)));
    for (auto& x : draw) x = data[rng.below(data.size())];
    stats[static_cast<std::size_t>(b)] = statistic(draw);
  }
  return percentile_interval(stats, level);
}

Interval bootstrap_interval_paired(
    std::span<const std::vector<double>> series,
    const std::function<double(std::span<const std::vector<double>>)>& statistic,
    std::uint64_t seed, int resamples, double level) {
  if (series.empty() || series.front().empty()) throw InvalidArgument("bootstrap of an empty sample");
  const std::size_t n = series.front().size();
  for (const auto& s : series) {
    if (s.size() != n) throw InvalidArgument("paired bootstrap series differ in length");
  }
  if (resamples < 1) throw InvalidArgument("bootstrap needs at least one resample");
  std::vector<double> stats(static_cast<std::size_t>(resamples));
  std::vector<std::vector<double>> draw(series.size(), std::vector<double>(n));
  std::vector<std::size_t> idx(n);
  for (int b = 0; b < resamples; ++b) {
    SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(b)));
    for (auto& i : idx) i = rng.below(n);
    for (std::size_t k = 0; k < series.size(); ++k) {
      for (std::size_t j = 0; j < n; ++j) draw[k][j] = series[k][idx[j]];
    }
    stats[static_cast<std::size_t>(b)] = statistic(draw);
  }
  return percentile_interval(stats, level);
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("least_squares: x and y differ in length");
  if (x.size() < 2) throw DiagnosticError("least_squares needs at least two points");
  const double mx = sample_mean(x);
  const double my = sample_mean(y);
  std::vector<double> sxy(x.size());
  std::vector<double> sxx(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy[i] = (x[i] - mx) * (y[i] - my);
    sxx[i] = (x[i] - mx) * (x[i] - mx);
  }
  const double denom = pairwise_sum(sxx);
  if (denom == 0.0) throw DiagnosticError("least_squares: all x values are equal");
  LinearFit fit;
  fit.slope = pairwise_sum(sxy) / denom;
  fit.intercept = my - fit.slope * mx;
  fit.points = x.size();
  return fit;
}

namespace {

// Q_KS(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  double previous = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = sign * 2.0 * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::fabs(term) <= 1e-10 * std::fabs(sum) || std::fabs(term) <= 1e-10 * previous) {
      return std::clamp(sum, 0.0, 1.0);
    }
    sign = -sign;
    previous = std::fabs(term);
  }
  return 1.0;
}

}  // namespace

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("ks_two_sample needs non-empty samples");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d)};
}

}  // namespace fpp
