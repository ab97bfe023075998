#include <cmath>
#include <vector>

#include <doctest.h>

#include "fpp/error.hpp"
#include "fpp/heisenberg.hpp"
#include "fpp/mix.hpp"
#include "fpp/shape.hpp"
#include "fpp/word_metric.hpp"
#include "oracles.hpp"

using namespace fpp;

namespace {

const DistributionSpec kTwoPoint = DistributionSpec::two_point(1, 2, 0.5);

PointCloud cloud(Gauge gauge, int dim, const std::vector<std::vector<double>>& points) {
  PointCloud c;
  c.dimension = dim;
  c.gauge = gauge;
  for (const auto& p : points) c.push(p, 0.0);
  return c;
}

PointCloud random_cloud(Gauge gauge, int dim, std::size_t n, std::uint64_t seed, double scale) {
  SplitMix64 rng(seed);
  PointCloud c;
  c.dimension = dim;
  c.gauge = gauge;
  std::vector<double> p(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < dim; ++k) p[k] = (rng.uniform() * 2 - 1) * scale * (k == 2 && gauge == Gauge::Heisenberg ? scale : 1);
    c.push(p, 0.0);
  }
  return c;
}

std::vector<std::vector<double>> points_of(const PointCloud& c) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < c.size(); ++i) out.emplace_back(c.point(i).begin(), c.point(i).end());
  return out;
}

double naive_gauge(Gauge g, const std::vector<double>& p, const std::vector<double>& q) {
  if (g == Gauge::L1) {
    double s = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) s += std::fabs(q[k] - p[k]);
    return s;
  }
  return homogeneous_gauge(heisenberg_product(heisenberg_inverse({p[0], p[1], p[2]}), {q[0], q[1], q[2]}));
}

double oracle_hausdorff(const PointCloud& a, const PointCloud& b) {
  return oracle::hausdorff(points_of(a), points_of(b), [&](const auto& p, const auto& q) { return naive_gauge(a.gauge, p, q); });
}

}  // namespace

TEST_CASE("hausdorff examples") {
  const PointCloud a = cloud(Gauge::L1, 2, {{0, 0}});
  const PointCloud b = cloud(Gauge::L1, 2, {{3, 4}});
  CHECK(hausdorff(a, b).distance == 7.0);
  CHECK(hausdorff(a, a).distance == 0.0);
  const PointCloud h3 = cloud(Gauge::Heisenberg, 3, {{0, 0, 0}, {1, 0, 0}});
  CHECK(hausdorff(h3, h3).distance == 0.0);
  CHECK_THROWS_AS(hausdorff(a, h3), InvalidArgument);
  CHECK_THROWS_AS(hausdorff(a, PointCloud{2, Gauge::L1, {}, {}, {}}), InvalidArgument);
}

TEST_CASE("accelerated hausdorff equals brute force and the naive oracle") {
  for (Gauge g : {Gauge::L1, Gauge::Heisenberg}) {
    const int dim = g == Gauge::L1 ? 2 : 3;
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      const PointCloud a = random_cloud(g, dim, 300 + 700 * seed, seed, 1.0);
      const PointCloud b = random_cloud(g, dim, 5000 - 600 * seed, seed + 50, 1.0 + 0.1 * seed);
      const auto fast = hausdorff(a, b, 2);
      const auto slow = hausdorff_brute_force(a, b);
      CHECK(fast.distance == slow.distance);
      CHECK(fast.directed_ab == slow.directed_ab);
      CHECK(fast.directed_ba == slow.directed_ba);
      if (seed < 2) CHECK(fast.distance == doctest::Approx(oracle_hausdorff(a, b)).epsilon(1e-12));
    }
  }
}

TEST_CASE("hausdorff metric axioms on sampled clouds") {
  for (Gauge g : {Gauge::L1, Gauge::Heisenberg}) {
    const int dim = g == Gauge::L1 ? 3 : 3;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const PointCloud a = random_cloud(g, dim, 200, seed, 1.0);
      const PointCloud b = random_cloud(g, dim, 150, seed + 100, 1.2);
      const PointCloud c = random_cloud(g, dim, 250, seed + 200, 0.8);
      const double ab = hausdorff(a, b).distance;
      CHECK(ab == hausdorff(b, a).distance);
      CHECK(hausdorff(a, c).distance <= ab + hausdorff(b, c).distance + 1e-12);
      CHECK(hausdorff(a, a).distance == 0.0);
      CHECK(ab > 0.0);
    }
  }
}

TEST_CASE("gauge distance is left invariant") {
  SplitMix64 rng(8);
  for (int i = 0; i < 500; ++i) {
    auto r = [&] { return static_cast<double>(static_cast<int>(rng.below(21)) - 10); };
    const HeisenbergPoint k{r(), r(), r()}, p{r(), r(), r()}, q{r(), r(), r()};
    CHECK(gauge_distance(heisenberg_product(k, p), heisenberg_product(k, q)) == gauge_distance(p, q));
    const std::vector<double> pv{p.u, p.v, p.w}, qv{q.u, q.v, q.w};
    CHECK(gauge_distance(Gauge::Heisenberg, pv, qv) == gauge_distance(p, q));
  }
}

TEST_CASE("rescaled word ball cloud") {
  const GroupSpec H = GroupSpec::heisenberg();
  const PointCloud c = rescaled_word_ball_cloud(H, 4, 1.0);
  CHECK(c.size() == word_ball(H, H.identity(), 4).size());
  bool has_origin = false, has_c = false;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto p = c.point(i);
    if (p[0] == 0 && p[1] == 0 && p[2] == 0) has_origin = true;
    if (p[0] == 0 && p[1] == 0 && p[2] == 1.0 / 16) has_c = true;
  }
  CHECK(has_origin);
  CHECK(has_c);
}

TEST_CASE("rescaled fpp ball cloud") {
  const GroupSpec H = GroupSpec::heisenberg();
  SUBCASE("n = 1 is the embedded fpp ball") {
    const WeightAssignment omega(H, kTwoPoint, 3);
    const PointCloud c = rescaled_fpp_ball_cloud(omega, 1, 5.0);
    const FppBall ball = fpp_ball(omega, H.identity(), 5.0);
    REQUIRE(c.size() == ball.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      const HeisenbergPoint p = embed_heisenberg(ball.members[i]);
      CHECK(c.point(i)[0] == p.u);
      CHECK(c.point(i)[1] == p.v);
      CHECK(c.point(i)[2] == p.w);
      CHECK(c.values[i] == ball.times[i]);
    }
  }
  SUBCASE("deterministic weight 1 equals the word ball cloud") {
    for (const auto& g : {H, GroupSpec::lattice(2)}) {
      const WeightAssignment omega(g, DistributionSpec::deterministic(1), 0);
      const PointCloud f = rescaled_fpp_ball_cloud(omega, 6, 1.0);
      const PointCloud w = rescaled_word_ball_cloud(g, 6, 1.0);
      CHECK(f.size() == w.size());
      CHECK(hausdorff(f, w).distance == 0.0);
    }
  }
  SUBCASE("contained in the rescaled word ball of radius ceil(rn/a)") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      for (int n : {3, 6}) {
        const double r = 1.5;
        const WeightAssignment omega(H, kTwoPoint, seed);
        const PointCloud f = rescaled_fpp_ball_cloud(omega, n, r);
        const int radius = static_cast<int>(std::ceil(r * n / kTwoPoint.support_min()));
        const WordBall ball = word_ball(H, H.identity(), radius);
        double g_max = 0.0;
        for (const auto& m : ball.members) g_max = std::max(g_max, homogeneous_gauge(dilate(1.0 / n, embed_heisenberg(m))));
        for (std::size_t i = 0; i < f.size(); ++i) {
          const auto p = f.point(i);
          const Element e = heisenberg_element(std::llround(p[0] * n), std::llround(p[1] * n), std::llround(p[2] * n * n));
          CHECK(ball.contains(e));
          CHECK(homogeneous_gauge({p[0], p[1], p[2]}) <= g_max + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("shape cauchy scan") {
  SUBCASE("deterministic Z^2 stays within the discretisation bound") {
    const auto scan = shape_cauchy_scan(GroupSpec::lattice(2), DistributionSpec::deterministic(1), 0, 1.0, {4, 6, 8, 12});
    for (const auto& row : scan.rows) CHECK(row.distance <= 2.0 / std::min(row.n, row.n_next) + 1e-12);
  }
  SUBCASE("identical n gives zero") {
    const auto scan = shape_cauchy_scan(GroupSpec::heisenberg(), kTwoPoint, 1, 1.0, {6, 6});
    CHECK(scan.rows[0].distance == 0.0);
  }
  SUBCASE("deterministic Heisenberg is non-increasing within 10%") {
    const auto scan =
        shape_cauchy_scan(GroupSpec::heisenberg(), DistributionSpec::deterministic(1), 0, 1.0, {4, 8, 12, 16});
    for (std::size_t i = 1; i < scan.rows.size(); ++i) CHECK(scan.rows[i].distance <= 1.1 * scan.rows[i - 1].distance);
  }
  CHECK_THROWS_AS(shape_cauchy_scan(GroupSpec::heisenberg(), kTwoPoint, 1, 1.0, {8, 4}), InvalidArgument);
}

TEST_CASE("l1 ball comparison") {
  const auto two = l1_ball_compare(2, 1.0, 32);
  CHECK(two.distance <= 1.0 / 16);
  for (int n : {1, 5, 17}) CHECK(l1_ball_compare(1, 1.0, n).distance <= 1.0 / n);
  for (int n : {8, 20}) {
    const auto halved = l1_ball_compare(2, 2.0, n);
    CHECK(halved.farthest >= 0.5 - 1.0 / n);
    CHECK(halved.farthest <= 0.5);
  }
}

TEST_CASE("gh approximation check") {
  const Ensemble unit(GroupSpec::lattice(2), DistributionSpec::deterministic(1), 1);
  CHECK(gh_approximation_check(unit, 16, 0.01, 20, 4).pass);
  const Ensemble ens(GroupSpec::lattice(2), kTwoPoint, 4, 2);
  const auto g = gh_approximation_check(ens, 16, 0.3, 20, 40);
  CHECK(g.pass);
  CHECK(g.failures == 0);
}

TEST_CASE("directional norm") {
  const Ensemble unit(GroupSpec::lattice(2), DistributionSpec::deterministic(1), 1);
  const auto one = directional_norm(unit, lattice_point({1, 0}), {1, 4, 16}, 3);
  for (double s : one.series) CHECK(s == 1.0);

  const Ensemble ens(GroupSpec::lattice(2), kTwoPoint, 2, 2);
  const auto est = directional_norm(ens, lattice_point({1, 0}), {8, 16, 32}, 200);
  for (std::size_t i = 0; i + 1 < est.n_grid.size(); ++i) {
    const double n = static_cast<double>(est.n_grid[i]);
    CHECK(est.mean_time[i + 1] <= 2 * est.mean_time[i] + 6 * (est.time_std_error[i] + est.time_std_error[i + 1]));
    CHECK(est.series[i] * n == doctest::Approx(est.mean_time[i]));
  }

  const GroupSpec H = GroupSpec::heisenberg();
  const Ensemble heis(H, kTwoPoint, 3, 2);
  const auto c = directional_norm(heis, heisenberg_c(), {100}, 20);
  CHECK(c.mean_time[0] / 10.0 <= 4.5 * kTwoPoint.support_max());
}
