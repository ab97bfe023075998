#include "fpp/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fpp/error.hpp"
#include "fpp/mix.hpp"
#include "fpp/parallel.hpp"
#include "fpp/word_metric.hpp"

namespace fpp {

std::string seed_rule_description() {
  std::ostringstream os;
  os << "replica_seed(i) = mix64(master_seed XOR i * 0x9E3779B97F4A7C15); mix64 = SplitMix64 finalizer; "
        "held-out environment k uses index 2^63 + k, sampling stream k uses 2^62 + k, "
        "bootstrap stream k uses 2^61 + k";
  return os.str();
}

Ensemble::Ensemble(GroupSpec group_, DistributionSpec distribution_, std::uint64_t master_seed_,
                   unsigned workers_, SearchLimits limits_)
    : group(std::move(group_)),
      distribution(distribution_),
      master_seed(master_seed_),
      workers(workers_),
      limits(limits_) {
  const DistributionCheck check = validate_distribution(distribution, group.degree());
  if (!check.ok) throw HypothesisViolation(check.rule, check.message);
}

std::uint64_t Ensemble::replica_seed(std::size_t i) const noexcept { return derive_seed(master_seed, i); }

std::uint64_t Ensemble::stream_seed(std::uint64_t stream, std::size_t k) const noexcept {
  return derive_seed(master_seed, stream + k);
}

WeightAssignment Ensemble::replica(std::size_t i) const {
  return WeightAssignment(group, distribution, replica_seed(i));
}

WeightAssignment Ensemble::held_out(std::size_t k) const {
  return WeightAssignment(group, distribution, stream_seed(kHeldOutStream, k));
}

std::vector<double> replica_times(const Ensemble& ens, const Element& x, const Element& y,
                                  std::size_t replicas) {
  return parallel_map<double>(replicas, ens.workers, [&](std::size_t i) {
    return passage_time(ens.replica(i), x, y, ens.limits).time;
  });
}

MeanDistanceEstimate estimate_mean_distance(const Ensemble& ens, const Element& x, const Element& y,
                                            std::size_t replicas) {
  if (replicas < 2) throw InvalidArgument("estimate_mean_distance needs at least 2 replicas");
  MeanDistanceEstimate est;
  est.x = x;
  est.y = y;
  est.replicas = replicas;
  est.word_distance = word_distance(ens.group, x, y);
  est.samples = replica_times(ens, x, y, replicas);
  est.mean = sample_mean(est.samples);
  est.std_error = standard_error(est.samples);
  return est;
}

std::vector<double> empirical_tail(std::span<const double> samples, double mean,
                                   std::span<const double> u_grid) {
  std::vector<double> dev(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) dev[i] = std::fabs(samples[i] - mean);
  std::sort(dev.begin(), dev.end());
  std::vector<double> tail(u_grid.size(), 0.0);
  if (dev.empty()) return tail;
  for (std::size_t k = 0; k < u_grid.size(); ++k) {
    const auto first = std::lower_bound(dev.begin(), dev.end(), u_grid[k]);
    tail[k] = static_cast<double>(dev.end() - first) / static_cast<double>(dev.size());
  }
  return tail;
}

ConcentrationFit concentration_tail(const Ensemble& ens, const Element& x, const Element& y,
                                    std::size_t replicas, std::vector<double> u_grid) {
  if (x == y) throw InvalidArgument("concentration_tail needs x != y");
  for (double u : u_grid) {
    if (!(u >= 0.0)) throw InvalidArgument("deviation grid entries must be non-negative");
  }
  std::sort(u_grid.begin(), u_grid.end());
  ConcentrationFit out;
  out.estimate = estimate_mean_distance(ens, x, y, replicas);
  out.u_grid = std::move(u_grid);
  out.tail = empirical_tail(out.estimate.samples, out.estimate.mean, out.u_grid);
  const double d = static_cast<double>(out.estimate.word_distance);
  std::vector<double> fx;
  std::vector<double> fy;
  out.in_fit.assign(out.u_grid.size(), false);
  for (std::size_t k = 0; k < out.u_grid.size(); ++k) {
    if (out.tail[k] >= kTailFitLow && out.tail[k] <= kTailFitHigh) {
      out.in_fit[k] = true;
      fx.push_back(out.u_grid[k] * out.u_grid[k] / d);
      fy.push_back(std::log(out.tail[k]));
    }
  }
  if (fx.size() < 2 || std::all_of(fx.begin(), fx.end(), [&](double v) { return v == fx.front(); })) {
    throw DiagnosticError("concentration_tail: fewer than two deviations have tail in [1e-3, 0.5]; "
                          "widen the u grid or add replicas");
  }
  out.fit = least_squares(fx, fy);
  return out;
}

namespace {

void require_half_two_point(const DistributionSpec& dist) {
  if (dist.kind() != DistributionKind::TwoPoint || dist.p_a() != 0.5) {
    throw HypothesisViolation("nu({a}) = nu({b}) = 1/2",
                              "variance_scan requires a two-point law with p_a = 1/2, got " + dist.describe());
  }
}

double log_factor(std::int64_t n) {
  return n <= 0 ? 0.0 : (1.0 + std::log(static_cast<double>(n))) / static_cast<double>(n);
}

double linear_factor(std::int64_t n) { return n <= 0 ? 0.0 : 1.0 / static_cast<double>(n); }

Interval scaled(Interval ci, double f) { return {ci.lo * f, ci.hi * f}; }

auto variance_stat() {
  return [](std::span<const double> s) { return sample_variance(s); };
}

}  // namespace

VarianceScan variance_scan(const Ensemble& ens, const Element& direction, std::vector<std::int64_t> n_grid,
                           std::size_t replicas) {
  require_half_two_point(ens.distribution);
  if (replicas < 2) throw InvalidArgument("variance_scan needs at least 2 replicas");
  if (!is_member(ens.group, direction)) throw InvalidArgument("direction is not an element of " + ens.group.name());
  for (auto n : n_grid) {
    if (n < 0) throw InvalidArgument("variance_scan grid entries must be non-negative");
  }
  VarianceScan scan;
  scan.direction = direction;
  scan.replicas = replicas;
  const Element e = ens.group.identity();
  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    const std::int64_t n = n_grid[k];
    const Element target = power(ens.group, direction, n);
    std::vector<double> samples = replica_times(ens, e, target, replicas);
    VariancePoint p;
    p.n = n;
    p.word_distance = word_distance(ens.group, e, target);
    p.mean = sample_mean(samples);
    p.variance = sample_variance(samples);
    p.variance_ci = bootstrap_interval(samples, variance_stat(), ens.stream_seed(kBootstrapStream, k));
    p.normalized_log = p.variance * log_factor(n);
    p.normalized_log_ci = scaled(p.variance_ci, log_factor(n));
    p.normalized_linear = p.variance * linear_factor(n);
    p.normalized_linear_ci = scaled(p.variance_ci, linear_factor(n));
    scan.points.push_back(p);
    scan.samples.push_back(std::move(samples));
  }
  return scan;
}

RatioEstimate variance_ratio(const VarianceScan& scan, std::size_t i, std::size_t j, std::uint64_t seed) {
  if (i >= scan.points.size() || j >= scan.points.size()) throw InvalidArgument("variance_ratio index out of range");
  const double fi = log_factor(scan.points[i].n);
  const double fj = log_factor(scan.points[j].n);
  auto ratio = [&](double vi, double vj) {
    const double den = vi * fi;
    return den == 0.0 ? std::numeric_limits<double>::infinity() : vj * fj / den;
  };
  RatioEstimate out;
  out.ratio = ratio(scan.points[i].variance, scan.points[j].variance);
  const std::vector<double> pair[2] = {scan.samples[i], scan.samples[j]};
  out.ci = bootstrap_interval_paired(
      pair,
      [&](std::span<const std::vector<double>> s) { return ratio(sample_variance(s[0]), sample_variance(s[1])); },
      seed);
  return out;
}

std::vector<BallPair> sample_ball_pairs(const GroupSpec& group, int radius, std::size_t count,
                                        std::int64_t min_distance, std::uint64_t seed) {
  if (radius < 0) throw InvalidArgument("pair sampling radius must be non-negative");
  const WordBall ball = word_ball(group, group.identity(), radius);
  std::vector<BallPair> out;
  out.reserve(count);
  SplitMix64 rng(seed);
  const std::size_t attempt_cap = 1000 * (count + 1);
  std::size_t attempts = 0;
  while (out.size() < count) {
    if (++attempts > attempt_cap) {
      throw DiagnosticError("sample_ball_pairs: could not find pairs with d_S >= " +
                            std::to_string(min_distance) + " in B(e, " + std::to_string(radius) + ")");
    }
    const Element& x = ball.members[rng.below(ball.size())];
    const Element& y = ball.members[rng.below(ball.size())];
    if (x == y) continue;
    const std::int64_t d = word_distance(group, x, y);
    if (d < min_distance) continue;
    out.push_back({x, y, d});
  }
  return out;
}

namespace {

double sqrt_r_log_r(double r) { return r > 1.0 ? std::sqrt(r * std::log(r)) : 0.0; }

double max_of(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

}  // namespace

FluctuationScan fluctuation_scan(const Ensemble& ens, std::vector<int> r_grid, std::size_t pair_samples,
                                 std::size_t replicas) {
  if (ens.group.kind() != GroupKind::IntegerLattice && ens.group.kind() != GroupKind::Heisenberg) {
    throw InvalidArgument("fluctuation_scan needs a group of polynomial growth (lattice or Heisenberg)");
  }
  if (replicas < 2) throw InvalidArgument("fluctuation_scan needs at least 2 replicas");
  if (pair_samples < 1) throw InvalidArgument("fluctuation_scan needs at least one pair");
  FluctuationScan scan;
  scan.replicas = replicas;
  for (std::size_t k = 0; k < r_grid.size(); ++k) {
    const int r = r_grid[k];
    if (r < 1) throw InvalidArgument("fluctuation_scan radii must be positive");
    FluctuationRow row;
    row.r = r;
    row.pairs = sample_ball_pairs(ens.group, r, pair_samples, (r + 3) / 4, ens.stream_seed(kSamplingStream, k));
    const std::size_t np = row.pairs.size();
    const std::vector<double> flat = parallel_map<double>(np * replicas, ens.workers, [&](std::size_t t) {
      const BallPair& p = row.pairs[t / replicas];
      return passage_time(ens.replica(t % replicas), p.x, p.y, ens.limits).time;
    });
    const WeightAssignment omega = ens.held_out(k);
    row.held_out = parallel_map<double>(np, ens.workers, [&](std::size_t i) {
      return passage_time(omega, row.pairs[i].x, row.pairs[i].y, ens.limits).time;
    });
    for (std::size_t i = 0; i < np; ++i) {
      const std::span<const double> s(flat.data() + i * replicas, replicas);
      row.mean.push_back(sample_mean(s));
      row.std_error.push_back(standard_error(s));
      row.deviation.push_back(std::fabs(row.held_out[i] - row.mean.back()));
    }
    row.sup = max_of(row.deviation);
    row.normalizer = sqrt_r_log_r(r);
    row.normalized = row.normalizer > 0.0 ? row.sup / row.normalizer : 0.0;
    const double norm = row.normalizer;
    row.normalized_ci = bootstrap_interval(
        row.deviation, [norm](std::span<const double> s) { return norm > 0.0 ? max_of(s) / norm : 0.0; },
        ens.stream_seed(kBootstrapStream, k));
    scan.rows.push_back(std::move(row));
  }
  return scan;
}

double fluctuation_sup(const FluctuationRow& row, std::size_t count) {
  count = std::min(count, row.deviation.size());
  return max_of(std::span<const double>(row.deviation.data(), count));
}

RatioEstimate fluctuation_ratio(const FluctuationScan& scan, std::size_t i, std::size_t j, std::uint64_t seed) {
  if (i >= scan.rows.size() || j >= scan.rows.size()) throw InvalidArgument("fluctuation_ratio index out of range");
  const FluctuationRow& a = scan.rows[i];
  const FluctuationRow& b = scan.rows[j];
  RatioEstimate out;
  out.ratio = a.normalized > 0.0 ? b.normalized / a.normalized : std::numeric_limits<double>::infinity();
  std::vector<double> stats(kDefaultBootstrapResamples);
  for (int t = 0; t < kDefaultBootstrapResamples; ++t) {
    SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    double sa = 0.0;
    double sb = 0.0;
    for (std::size_t m = 0; m < a.deviation.size(); ++m) sa = std::max(sa, a.deviation[rng.below(a.deviation.size())]);
    for (std::size_t m = 0; m < b.deviation.size(); ++m) sb = std::max(sb, b.deviation[rng.below(b.deviation.size())]);
    const double na = a.normalizer > 0.0 ? sa / a.normalizer : 0.0;
    const double nb = b.normalizer > 0.0 ? sb / b.normalizer : 0.0;
    stats[static_cast<std::size_t>(t)] = na > 0.0 ? nb / na : std::numeric_limits<double>::infinity();
  }
  std::sort(stats.begin(), stats.end());
  out.ci = {quantile_sorted(stats, 0.025), quantile_sorted(stats, 0.975)};
  return out;
}

MidpointResult midpoint_search(const Ensemble& ens, const Element& x, const Element& y, double lambda,
                               std::size_t replicas, std::size_t held_out_index) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("midpoint_search needs 0 <= lambda <= 1");
  if (replicas < 2) throw InvalidArgument("midpoint_search needs at least 2 replicas");
  MidpointResult out;
  out.x = x;
  out.y = y;
  out.lambda = lambda;
  out.word_distance = word_distance(ens.group, x, y);
  if (x == y) {
    out.z = x;
    out.geodesic = {x};
    return out;
  }
  out.geodesic = passage_time(ens.held_out(held_out_index), x, y, ens.limits).path;
  const std::vector<Element>& path = out.geodesic;
  const std::size_t m = path.size();

  // from_x[i * m + j] = d_omega_i(x, path[j]); from_y likewise.
  std::vector<std::vector<double>> from_x(replicas);
  std::vector<std::vector<double>> from_y(replicas);
  parallel_for(2 * replicas, ens.workers, [&](std::size_t t) {
    const std::size_t i = t / 2;
    const WeightAssignment omega = ens.replica(i);
    if (t % 2 == 0) {
      from_x[i] = passage_times_from(omega, x, path, ens.limits);
    } else {
      from_y[i] = passage_times_from(omega, y, path, ens.limits);
    }
  });
  std::vector<double> col(replicas);
  auto column = [&](const std::vector<std::vector<double>>& table, std::size_t j) {
    for (std::size_t i = 0; i < replicas; ++i) col[i] = table[i][j];
    return std::pair{sample_mean(col), standard_error(col)};
  };
  std::tie(out.dbar_xy, out.se_xy) = column(from_x, m - 1);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m; ++j) {
    const auto [mx, sx] = column(from_x, j);
    const auto [my, sy] = column(from_y, j);
    const double dev = std::max(std::fabs(lambda * out.dbar_xy - mx), std::fabs((1.0 - lambda) * out.dbar_xy - my));
    if (dev < best) {
      best = dev;
      out.z_index = j;
      out.dbar_xz = mx;
      out.se_xz = sx;
      out.dbar_zy = my;
      out.se_zy = sy;
    }
  }
  out.z = path[out.z_index];
  out.deviation = best;
  const double norm = sqrt_r_log_r(static_cast<double>(out.word_distance));
  out.normalized_deviation = norm > 0.0 ? best / norm : 0.0;
  return out;
}

SubdivisionReport dyadic_subdivision(const Ensemble& ens, const Element& x, const Element& y, int k,
                                     std::size_t replicas, double alpha0) {
  if (k < 0 || k > 20) throw InvalidArgument("subdivision depth k must lie in [0, 20]");
  if (replicas < 2) throw InvalidArgument("dyadic_subdivision needs at least 2 replicas");
  SubdivisionReport out;
  out.x = x;
  out.y = y;
  out.k = k;
  const MeanDistanceEstimate whole = estimate_mean_distance(ens, x, y, replicas);
  out.dbar_xy = whole.mean;
  out.se_xy = whole.std_error;
  const double pieces = std::ldexp(1.0, k);
  if (whole.mean / pieces < alpha0) {
    std::ostringstream os;
    os << "dyadic_subdivision: estimated dbar(x,y)/2^k = " << whole.mean / pieces << " < alpha0 = " << alpha0
       << "; use a smaller k";
    throw InvalidArgument(os.str());
  }
  out.chain = {x, y};
  for (int level = 0; level < k; ++level) {
    std::vector<Element> next;
    next.reserve(2 * out.chain.size() - 1);
    for (std::size_t j = 0; j + 1 < out.chain.size(); ++j) {
      const std::size_t held = (std::size_t{1} << level) + j;
      const MidpointResult mid = midpoint_search(ens, out.chain[j], out.chain[j + 1], 0.5, replicas, held);
      next.push_back(out.chain[j]);
      next.push_back(mid.z);
    }
    next.push_back(out.chain.back());
    out.chain = std::move(next);
  }
  for (std::size_t j = 0; j + 1 < out.chain.size(); ++j) {
    if (out.chain[j] == out.chain[j + 1]) {
      out.gap_mean.push_back(0.0);
      out.gap_std_error.push_back(0.0);
      continue;
    }
    const MeanDistanceEstimate gap = estimate_mean_distance(ens, out.chain[j], out.chain[j + 1], replicas);
    out.gap_mean.push_back(gap.mean);
    out.gap_std_error.push_back(gap.std_error);
  }
  out.max_gap = *std::max_element(out.gap_mean.begin(), out.gap_mean.end());
  out.min_gap = *std::min_element(out.gap_mean.begin(), out.gap_mean.end());
  out.inflation = out.dbar_xy > 0.0 ? pairwise_sum(out.gap_mean) / out.dbar_xy : 1.0;
  if (k == 0) out.inflation = 1.0;
  return out;
}

namespace {

// Smallest letter different from `previous` (-1 for none).
int smallest_after(int previous) { return previous == 0 ? 1 : 0; }

// Advances a reduced word to the next one of equal length in canonical order.
bool next_reduced_word(std::vector<int>& word, int degree) {
  for (std::size_t i = word.size(); i-- > 0;) {
    const int prev = i == 0 ? -1 : word[i - 1];
    int candidate = word[i] + 1;
    if (candidate == prev) ++candidate;
    if (candidate < degree) {
      word[i] = candidate;
      for (std::size_t j = i + 1; j < word.size(); ++j) word[j] = smallest_after(word[j - 1]);
      return true;
    }
  }
  return false;
}

}  // namespace

TreeSearchReport tree_fluctuation_search(const Ensemble& ens, int r, int K, double eps, std::uint64_t max_scan) {
  const GroupSpec& group = ens.group;
  if (group.kind() != GroupKind::RegularTree) throw InvalidArgument("tree_fluctuation_search needs a regular tree");
  const DistributionSpec& dist = ens.distribution;
  if (!dist.bounded()) throw InvalidArgument("tree_fluctuation_search needs a bounded-support distribution");
  if (!(eps >= 0.0)) throw InvalidArgument("tree_fluctuation_search needs eps >= 0");
  const double a = dist.support_min();
  if (eps == 0.0 && !(dist.atom(a) > 0.0)) {
    throw HypothesisViolation("nu({a}) > 0", "eps = 0 requires an atom at a = " + std::to_string(a));
  }
  if (K < 1) throw InvalidArgument("tree_fluctuation_search needs K >= 1");
  const int q = group.parameter();
  TreeSearchReport rep;
  rep.segment_length = r / K;
  rep.separation = (r + 3) / 4;
  rep.sphere_depth = r - rep.segment_length;
  const std::int64_t h = (rep.separation + 1) / 2;
  const std::int64_t prefix = rep.sphere_depth - h + 1;
  if (rep.segment_length < 1 || prefix < 1) {
    throw InvalidArgument("tree_fluctuation_search: r = " + std::to_string(r) + " is too small for K = " +
                          std::to_string(K));
  }
  rep.center_count = q * std::pow(static_cast<double>(q - 1), static_cast<double>(prefix - 1));
  rep.per_segment_probability = std::pow(dist.mass_in(a, a + eps), static_cast<double>(rep.segment_length));
  rep.success_probability = -std::expm1(rep.center_count * std::log1p(-rep.per_segment_probability));
  if (rep.per_segment_probability >= 1.0) rep.success_probability = 1.0;

  const WeightAssignment omega = ens.held_out(0);
  const double threshold = (a + eps) * static_cast<double>(rep.segment_length);
  const double slack = 1e-12 * std::max(1.0, threshold);

  std::vector<int> word(static_cast<std::size_t>(prefix));
  for (std::size_t j = 0; j < word.size(); ++j) word[j] = j == 0 ? 0 : smallest_after(word[j - 1]);
  std::vector<int> full;
  do {
    if (rep.scanned >= max_scan) break;
    ++rep.scanned;
    full = word;
    while (static_cast<std::int64_t>(full.size()) < rep.sphere_depth + rep.segment_length) {
      full.push_back(smallest_after(full.back()));
    }
    std::vector<double> weights;
    double total = 0.0;
    Element u = tree_word(std::span<const int>(full.data(), static_cast<std::size_t>(rep.sphere_depth)));
    for (std::int64_t s = 0; s < rep.segment_length; ++s) {
      const Element v = tree_word(
          std::span<const int>(full.data(), static_cast<std::size_t>(rep.sphere_depth + s + 1)));
      weights.push_back(omega.edge_weight(u, v));
      total += weights.back();
      u = v;
    }
    if (total <= threshold + slack) {
      rep.found = true;
      rep.x = tree_word(std::span<const int>(full.data(), static_cast<std::size_t>(rep.sphere_depth)));
      rep.y = u;
      rep.d_omega = total;
      rep.d_word = rep.segment_length;
      rep.segment_weights = std::move(weights);
      break;
    }
  } while (next_reduced_word(word, q));
  return rep;
}

MeanRatioReport mean_ratio_bound(const Ensemble& ens, std::size_t pair_samples, int radius) {
  if (ens.group.kind() != GroupKind::RegularTree) throw InvalidArgument("mean_ratio_bound needs a regular tree");
  MeanRatioReport rep;
  rep.a = ens.distribution.support_min();
  rep.atom_at_a = ens.distribution.atom(rep.a);
  rep.inverse_degree = 1.0 / ens.group.degree();
  if (!(rep.atom_at_a < rep.inverse_degree)) {
    std::ostringstream os;
    os << "nu({a}) >= 1/q: nu({" << rep.a << "}) = " << rep.atom_at_a << " >= 1/" << ens.group.degree() << " = "
       << rep.inverse_degree;
    throw HypothesisViolation("nu({a}) < 1/q", os.str());
  }
  rep.ratio = ens.distribution.mean();
  rep.pairs = sample_ball_pairs(ens.group, radius, pair_samples, 1, ens.stream_seed(kSamplingStream, 0));
  for (const auto& p : rep.pairs) rep.dbar.push_back(rep.ratio * static_cast<double>(p.word_distance));
  rep.exceeds_a = rep.ratio > rep.a;
  return rep;
}

}  // namespace fpp
