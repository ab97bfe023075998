#include "fpp/shape.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "fpp/error.hpp"
#include "fpp/heisenberg.hpp"
#include "fpp/mix.hpp"
#include "fpp/parallel.hpp"
#include "fpp/word_metric.hpp"

namespace fpp {

const char* gauge_name(Gauge g) noexcept { return g == Gauge::L1 ? "L1" : "HeisenbergGauge"; }

void PointCloud::push(std::span<const double> p, double value) {
  coords.insert(coords.end(), p.begin(), p.end());
  values.push_back(value);
}

double gauge_distance(Gauge gauge, std::span<const double> p, std::span<const double> q) {
  if (gauge == Gauge::Heisenberg) {
    const double du = q[0] - p[0];
    const double dv = q[1] - p[1];
    const double dw = q[2] - p[2] - p[0] * dv;
    return std::max(std::fabs(du) + std::fabs(dv), std::sqrt(std::fabs(dw)));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::fabs(q[i] - p[i]);
  return s;
}

namespace {

Gauge gauge_for(const GroupSpec& group) {
  switch (group.kind()) {
    case GroupKind::Heisenberg:
      return Gauge::Heisenberg;
    case GroupKind::IntegerLattice:
      return Gauge::L1;
    default:
      throw InvalidArgument("point clouds are defined for Heisenberg and lattice groups, not " + group.name());
  }
}

void push_rescaled(PointCloud& cloud, const GroupSpec& group, const Element& g, double t, double value) {
  if (group.kind() == GroupKind::Heisenberg) {
    const HeisenbergPoint p = dilate(t, embed_heisenberg(g));
    const double xyz[3] = {p.u, p.v, p.w};
    cloud.push(xyz, value);
    return;
  }
  double buf[16];
  std::vector<double> heap;
  double* out = buf;
  if (g.size() > 16) {
    heap.resize(g.size());
    out = heap.data();
  }
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = t * static_cast<double>(g[i]);
  cloud.push(std::span<const double>(out, g.size()), value);
}

PointCloud empty_cloud(const GroupSpec& group) {
  PointCloud c;
  c.gauge = gauge_for(group);
  c.dimension = group.kind() == GroupKind::Heisenberg ? 3 : group.parameter();
  return c;
}

// Uniform bucket grid over the first min(d, 3) coordinates, CSR layout.
class CloudGrid {
 public:
  explicit CloudGrid(const PointCloud& cloud) : cloud_(cloud), dims_(std::min(cloud.dimension, 3)) {
    const std::size_t n = cloud.size();
    double volume = 1.0;
    for (int j = 0; j < dims_; ++j) {
      lo_[j] = std::numeric_limits<double>::infinity();
      double hi = -lo_[j];
      for (std::size_t i = 0; i < n; ++i) {
        lo_[j] = std::min(lo_[j], cloud.point(i)[j]);
        hi = std::max(hi, cloud.point(i)[j]);
      }
      extent_[j] = hi - lo_[j];
      volume *= std::max(extent_[j], 1e-12);
    }
    const double target = std::max(1.0, static_cast<double>(n) / 2.0);
    const double h = std::pow(volume / target, 1.0 / std::max(dims_, 1));
    std::size_t total = 1;
    for (int j = 0; j < dims_; ++j) {
      cells_[j] = extent_[j] <= 0.0 ? 1 : static_cast<int>(std::clamp(std::ceil(extent_[j] / h), 1.0, 4096.0));
      inv_[j] = extent_[j] <= 0.0 ? 0.0 : cells_[j] / extent_[j];
      total *= static_cast<std::size_t>(cells_[j]);
    }
    cell_size_ = dims_ == 0 ? 1.0 : h;
    start_.assign(total + 1, 0);
    std::vector<std::uint32_t> cell_of(n);
    for (std::size_t i = 0; i < n; ++i) {
      cell_of[i] = static_cast<std::uint32_t>(flat(cloud.point(i)));
      ++start_[cell_of[i] + 1];
    }
    std::partial_sum(start_.begin(), start_.end(), start_.begin());
    items_.resize(n);
    std::vector<std::uint32_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < n; ++i) items_[fill[cell_of[i]]++] = static_cast<std::uint32_t>(i);
  }

  double cell_size() const noexcept { return cell_size_; }

  // Calls f(index) for every point whose gridded coordinates may lie in the
  // box; returns true when the box covers the whole grid.
  template <typename F>
  bool visit(const double* box_lo, const double* box_hi, F&& f) const {
    int a[3] = {0, 0, 0};
    int b[3] = {0, 0, 0};
    bool covers = true;
    for (int j = 0; j < dims_; ++j) {
      a[j] = clamp_cell(j, box_lo[j]);
      b[j] = clamp_cell(j, box_hi[j]);
      if (box_lo[j] > lo_[j] || box_hi[j] < lo_[j] + extent_[j]) covers = false;
    }
    for (int i0 = a[0]; i0 <= b[0]; ++i0) {
      for (int i1 = a[1]; i1 <= b[1]; ++i1) {
        for (int i2 = a[2]; i2 <= b[2]; ++i2) {
          const std::size_t c = (static_cast<std::size_t>(i0) * cells_[1] + i1) * cells_[2] + i2;
          for (std::uint32_t k = start_[c]; k < start_[c + 1]; ++k) f(items_[k]);
        }
      }
    }
    return covers;
  }

 private:
  int clamp_cell(int j, double x) const {
    const double c = std::floor((x - lo_[j]) * inv_[j]);
    if (!(c >= 0.0)) return 0;
    return static_cast<int>(std::min<double>(c, cells_[j] - 1));
  }

  std::size_t flat(std::span<const double> p) const {
    std::size_t c = 0;
    for (int j = 0; j < 3; ++j) {
      const int idx = j < dims_ ? clamp_cell(j, p[j]) : 0;
      c = c * static_cast<std::size_t>(cells_[j]) + static_cast<std::size_t>(idx);
    }
    return c;
  }

  const PointCloud& cloud_;
  int dims_;
  double lo_[3] = {0, 0, 0};
  double extent_[3] = {0, 0, 0};
  double inv_[3] = {0, 0, 0};
  int cells_[3] = {1, 1, 1};
  double cell_size_ = 1.0;
  std::vector<std::uint32_t> start_;
  std::vector<std::uint32_t> items_;
};

// min over q in B of d(p, q), except that it may stop early with any value
// not above `cutoff` once one is found.
double nearest(const PointCloud& b, const CloudGrid& grid, std::span<const double> p, double cutoff) {
  const Gauge gauge = b.gauge;
  const int dims = std::min(b.dimension, 3);
  double rho = grid.cell_size();
  for (;;) {
    double lo[3];
    double hi[3];
    for (int j = 0; j < dims; ++j) {
      double half = rho;
      if (gauge == Gauge::Heisenberg && j == 2) half = std::fabs(p[0]) * rho + rho * rho;
      lo[j] = p[j] - half;
      hi[j] = p[j] + half;
    }
    double best = std::numeric_limits<double>::infinity();
    const bool covers = grid.visit(lo, hi, [&](std::uint32_t k) {
      best = std::min(best, gauge_distance(gauge, p, b.point(k)));
    });
    if (best <= cutoff || best <= rho || covers) return best;
    rho *= 2.0;
  }
}

std::uint64_t to_bits(double x) { return std::bit_cast<std::uint64_t>(x); }

double directed(const PointCloud& a, const PointCloud& b, unsigned workers) {
  const CloudGrid grid(b);
  std::vector<std::uint32_t> order(a.size());
  std::iota(order.begin(), order.end(), 0u);
  SplitMix64 rng(0x5EEDC10DULL);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

  // Non-negative doubles order like their bit patterns.
  std::atomic<std::uint64_t> global{to_bits(0.0)};
  constexpr std::size_t kChunk = 2048;
  const std::size_t chunks = (order.size() + kChunk - 1) / kChunk;
  parallel_for(chunks, workers, [&](std::size_t c) {
    double local = 0.0;
    const std::size_t end = std::min(order.size(), (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      const double cutoff = std::max(local, std::bit_cast<double>(global.load(std::memory_order_relaxed)));
      local = std::max(local, nearest(b, grid, a.point(order[i]), cutoff));
    }
    std::uint64_t seen = global.load();
    while (to_bits(local) > seen && !global.compare_exchange_weak(seen, to_bits(local))) {
    }
  });
  return std::bit_cast<double>(global.load());
}

void check_compatible(const PointCloud& a, const PointCloud& b) {
  if (a.gauge != b.gauge) throw InvalidArgument("hausdorff: clouds use different gauges");
  if (a.dimension != b.dimension) throw InvalidArgument("hausdorff: clouds have different dimensions");
  if (a.size() == 0 || b.size() == 0) throw InvalidArgument("hausdorff: empty point cloud");
}

HausdorffReport make_report(const PointCloud& a, const PointCloud& b, double ab, double ba) {
  HausdorffReport r;
  r.a = a.provenance;
  r.b = b.provenance;
  r.gauge = a.gauge;
  r.directed_ab = ab;
  r.directed_ba = ba;
  r.distance = std::max(ab, ba);
  return r;
}

}  // namespace

PointCloud rescaled_fpp_ball_cloud(const WeightAssignment& omega, int n, double r, const SearchLimits& limits) {
  if (n < 1) throw InvalidArgument("rescaled_fpp_ball_cloud needs n >= 1");
  if (!(r >= 0.0)) throw InvalidArgument("rescaled_fpp_ball_cloud needs r >= 0");
  const GroupSpec& group = omega.group();
  PointCloud cloud = empty_cloud(group);
  const FppBall ball = fpp_ball(omega, group.identity(), r * n, limits);
  const double t = 1.0 / n;
  for (std::size_t i = 0; i < ball.size(); ++i) push_rescaled(cloud, group, ball.members[i], t, ball.times[i]);
  cloud.provenance = {group.name(),
                      omega.distribution().is_deterministic() ? "deterministic" : std::to_string(omega.master_seed()),
                      n, r};
  return cloud;
}

PointCloud rescaled_word_ball_cloud(const GroupSpec& group, int n, double r) {
  if (n < 1) throw InvalidArgument("rescaled_word_ball_cloud needs n >= 1");
  if (!(r >= 0.0)) throw InvalidArgument("rescaled_word_ball_cloud needs r >= 0");
  PointCloud cloud = empty_cloud(group);
  const int radius = static_cast<int>(std::floor(r * n + 1e-9));
  const WordBall ball = word_ball(group, group.identity(), radius);
  const double t = 1.0 / n;
  for (std::size_t i = 0; i < ball.size(); ++i) {
    push_rescaled(cloud, group, ball.members[i], t, static_cast<double>(ball.distances[i]));
  }
  cloud.provenance = {group.name(), "deterministic", n, r};
  return cloud;
}

HausdorffReport hausdorff(const PointCloud& a, const PointCloud& b, unsigned workers) {
  check_compatible(a, b);
  return make_report(a, b, directed(a, b, workers), directed(b, a, workers));
}

HausdorffReport hausdorff_brute_force(const PointCloud& a, const PointCloud& b) {
  check_compatible(a, b);
  auto sweep = [](const PointCloud& p, const PointCloud& q) {
    double sup = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      double inf = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < q.size(); ++j) inf = std::min(inf, gauge_distance(p.gauge, p.point(i), q.point(j)));
      sup = std::max(sup, inf);
    }
    return sup;
  };
  return make_report(a, b, sweep(a, b), sweep(b, a));
}

ShapeCauchyScan shape_cauchy_scan(const GroupSpec& group, const DistributionSpec& dist, std::uint64_t seed,
                                  double r, std::vector<int> n_grid, unsigned workers,
                                  const SearchLimits& limits) {
  if (n_grid.empty()) throw InvalidArgument("shape_cauchy_scan needs a non-empty n grid");
  for (std::size_t i = 1; i < n_grid.size(); ++i) {
    if (n_grid[i] < n_grid[i - 1]) throw InvalidArgument("shape_cauchy_scan n grid must be non-decreasing");
  }
  const WeightAssignment omega(group, dist, seed);
  ShapeCauchyScan scan;
  for (int n : n_grid) scan.clouds.push_back(rescaled_fpp_ball_cloud(omega, n, r, limits));
  for (std::size_t i = 0; i + 1 < n_grid.size(); ++i) {
    const HausdorffReport h = hausdorff(scan.clouds[i], scan.clouds[i + 1], workers);
    scan.rows.push_back({n_grid[i], n_grid[i + 1], scan.clouds[i].size(), scan.clouds[i + 1].size(), h.distance});
  }
  return scan;
}

L1Comparison l1_ball_compare(int dimension, double weight, int n, unsigned workers) {
  if (dimension < 1) throw InvalidArgument("l1_ball_compare needs d >= 1");
  if (!(weight > 0.0)) throw InvalidArgument("l1_ball_compare needs a positive deterministic weight");
  if (n < 1) throw InvalidArgument("l1_ball_compare needs n >= 1");
  const GroupSpec group = GroupSpec::lattice(dimension);
  const WeightAssignment omega(group, DistributionSpec::deterministic(weight), 0);
  const PointCloud cloud = rescaled_fpp_ball_cloud(omega, n, 1.0);

  PointCloud sample = empty_cloud(group);
  sample.provenance = {group.name(), "deterministic", n, 1.0 / weight};
  const double limit = 1.0 / weight;
  const int radius = static_cast<int>(std::floor(n * limit + 1e-9));
  const WordBall lattice = word_ball(group, group.identity(), radius);
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    push_rescaled(sample, group, lattice.members[i], 1.0 / n, static_cast<double>(lattice.distances[i]));
  }

  L1Comparison out;
  out.dimension = dimension;
  out.weight = weight;
  out.n = n;
  out.distance = hausdorff(cloud, sample, workers).distance;
  out.bound = dimension / (weight * n);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    double s = 0.0;
    for (double x : cloud.point(i)) s += std::fabs(x);
    out.farthest = std::max(out.farthest, s);
  }
  out.cloud_size = cloud.size();
  out.sample_size = sample.size();
  return out;
}

GhCheck gh_approximation_check(const Ensemble& ens, int n, double eps, std::size_t pair_samples,
                               std::size_t replicas) {
  if (ens.group.kind() != GroupKind::IntegerLattice && ens.group.kind() != GroupKind::Heisenberg) {
    throw InvalidArgument("gh_approximation_check needs a group of polynomial growth");
  }
  if (n < 1) throw InvalidArgument("gh_approximation_check needs n >= 1");
  if (!(eps > 0.0)) throw InvalidArgument("gh_approximation_check needs eps > 0");
  if (replicas < 2) throw InvalidArgument("gh_approximation_check needs at least 2 replicas");
  GhCheck out;
  out.n = n;
  out.eps = eps;
  out.pairs = sample_ball_pairs(ens.group, n, pair_samples, 1, ens.stream_seed(kSamplingStream, 0));
  const std::size_t np = out.pairs.size();
  const std::vector<double> flat = parallel_map<double>(np * replicas, ens.workers, [&](std::size_t t) {
    const BallPair& p = out.pairs[t / replicas];
    return passage_time(ens.replica(t % replicas), p.x, p.y, ens.limits).time;
  });
  const WeightAssignment omega = ens.held_out(0);
  out.held_out = parallel_map<double>(np, ens.workers, [&](std::size_t i) {
    return passage_time(omega, out.pairs[i].x, out.pairs[i].y, ens.limits).time;
  });
  out.worst_margin = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < np; ++i) {
    const std::span<const double> s(flat.data() + i * replicas, replicas);
    out.mean.push_back(sample_mean(s));
    out.std_error.push_back(standard_error(s));
    const double margin = std::fabs(out.held_out[i] - out.mean[i]) - (eps * n + 3.0 * out.std_error[i]);
    out.margin.push_back(margin);
    if (margin > 0.0) ++out.failures;
    if (margin > out.worst_margin) {
      out.worst_margin = margin;
      out.worst = i;
    }
  }
  out.pass = out.failures == 0;
  out.failure_rate = np == 0 ? 0.0 : static_cast<double>(out.failures) / static_cast<double>(np);
  return out;
}

DirectionalNormEstimate directional_norm(const Ensemble& ens, const Element& direction,
                                         std::vector<std::int64_t> n_grid, std::size_t replicas) {
  if (direction == ens.group.identity()) throw InvalidArgument("directional_norm needs g != identity");
  if (replicas < 2) throw InvalidArgument("directional_norm needs at least 2 replicas");
  DirectionalNormEstimate out;
  out.direction = direction;
  const Element e = ens.group.identity();
  for (auto n : n_grid) {
    if (n < 1) throw InvalidArgument("directional_norm grid entries must be positive");
    const Element target = power(ens.group, direction, n);
    const std::vector<double> s = replica_times(ens, e, target, replicas);
    const double m = sample_mean(s);
    const double se = standard_error(s);
    out.n_grid.push_back(n);
    out.word_distance.push_back(word_distance(ens.group, e, target));
    out.mean_time.push_back(m);
    out.time_std_error.push_back(se);
    out.series.push_back(m / static_cast<double>(n));
    out.std_error.push_back(se / static_cast<double>(n));
  }
  const std::size_t w = std::min<std::size_t>(3, out.series.size());
  if (w > 0) {
    const std::span<const double> tail(out.series.data() + out.series.size() - w, w);
    out.trailing_mean = sample_mean(tail);
    const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
    out.trailing_spread = *hi - *lo;
  }
  return out;
}

}  // namespace fpp
