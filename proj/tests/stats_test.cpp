#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <doctest.h>

#include "fpp/error.hpp"
#include "fpp/experiments.hpp"
#include "fpp/mix.hpp"
#include "fpp/statistics.hpp"
#include "fpp/word_metric.hpp"

using namespace fpp;

namespace {

const DistributionSpec kTwoPoint = DistributionSpec::two_point(1, 2, 0.5);
const DistributionSpec kUniform = DistributionSpec::uniform(1, 2);
const DistributionSpec kUnit = DistributionSpec::deterministic(1);

Element z2(std::int64_t x, std::int64_t y) { return lattice_point({x, y}); }

}  // namespace

TEST_CASE("summary statistics") {
  std::vector<double> v(10000, 0.1);
  CHECK(pairwise_sum(v) == doctest::Approx(1000.0).epsilon(1e-14));
  const std::vector<double> x{2, 4, 4, 4, 5, 5, 7, 9};
  CHECK(sample_mean(x) == 5.0);
  CHECK(sample_variance(x) == doctest::Approx(32.0 / 7));
  CHECK(standard_error(x) == doctest::Approx(std::sqrt(32.0 / 7 / 8)));
  const std::vector<double> sorted{1, 2, 3, 4};
  CHECK(quantile_sorted(sorted, 0.0) == 1);
  CHECK(quantile_sorted(sorted, 1.0) == 4);
  CHECK(quantile_sorted(sorted, 0.5) == 2.5);
}

TEST_CASE("least squares recovers an exact line") {
  const std::vector<double> x{0, 1, 2, 3, 4};
  std::vector<double> y;
  for (double t : x) y.push_back(3 - 2 * t);
  const LinearFit fit = least_squares(x, y);
  CHECK(fit.slope == doctest::Approx(-2));
  CHECK(fit.intercept == doctest::Approx(3));
  CHECK(fit.points == 5);
  CHECK_THROWS_AS(least_squares(std::vector<double>{1}, std::vector<double>{1}), DiagnosticError);
  CHECK_THROWS_AS(least_squares(std::vector<double>{1, 1}, std::vector<double>{1, 2}), DiagnosticError);
}

TEST_CASE("bootstrap interval covers the mean and is seed-deterministic") {
  SplitMix64 rng(4);
  std::vector<double> data;
  for (int i = 0; i < 400; ++i) data.push_back(rng.uniform());
  auto mean = [](std::span<const double> s) { return sample_mean(s); };
  const Interval a = bootstrap_interval(data, mean, 77);
  const Interval b = bootstrap_interval(data, mean, 77);
  CHECK(a.lo == b.lo);
  CHECK(a.hi == b.hi);
  CHECK(a.lo < sample_mean(data));
  CHECK(a.hi > sample_mean(data));
  const double se = standard_error(data);
  CHECK(a.hi - a.lo == doctest::Approx(2 * 1.96 * se).epsilon(0.15));
}

TEST_CASE("kolmogorov-smirnov") {
  std::vector<double> a, b, c;
  SplitMix64 rng(10);
  for (int i = 0; i < 500; ++i) {
    a.push_back(rng.uniform());
    b.push_back(rng.uniform());
    c.push_back(rng.uniform() + 0.3);
  }
  CHECK(ks_two_sample(a, a).statistic == 0.0);
  CHECK(ks_two_sample(a, a).p_value == doctest::Approx(1.0));
  CHECK(ks_two_sample(a, b).p_value > 0.01);
  CHECK(ks_two_sample(a, c).p_value < 1e-6);
}

TEST_CASE("seed streams") {
  const Ensemble ens(GroupSpec::lattice(2), kTwoPoint, 1234);
  CHECK(ens.replica_seed(0) == derive_seed(1234, 0));
  CHECK(ens.replica_seed(5) == mix64(1234 ^ (5 * 0x9E3779B97F4A7C15ULL)));
  CHECK(ens.stream_seed(kHeldOutStream, 3) == derive_seed(1234, kHeldOutStream + 3));
  CHECK(ens.held_out(0).master_seed() != ens.replica(0).master_seed());
  CHECK_THROWS_AS(Ensemble(GroupSpec::lattice(2), DistributionSpec::two_point(0, 1, 0.5), 1), HypothesisViolation);
}

TEST_CASE("mean distance estimates") {
  SUBCASE("deterministic weights") {
    const Ensemble ens(GroupSpec::lattice(2), kUnit, 1);
    const auto est = estimate_mean_distance(ens, z2(0, 0), z2(3, 4), 10);
    CHECK(est.mean == 7.0);
    CHECK(est.std_error == 0.0);
  }
  SUBCASE("tree with uniform weights") {
    const GroupSpec T = GroupSpec::tree(3);
    const Ensemble ens(T, kUniform, 2);
    const Element y = tree_word({0, 1, 2, 0, 1, 0, 2, 1, 0, 1});
    const auto est = estimate_mean_distance(ens, T.identity(), y, 500);
    CHECK(est.word_distance == 10);
    CHECK(std::fabs(est.mean - 15.0) <= 3 * est.std_error);
  }
  SUBCASE("minimum over many paths beats a single path") {
    const Ensemble ens(GroupSpec::lattice(2), kTwoPoint, 3, 2);
    const auto est = estimate_mean_distance(ens, z2(0, 0), z2(5, 0), 2000);
    CHECK(est.mean < 7.5 - 3 * est.std_error);
    CHECK(est.mean >= 5.0);
  }
  const Ensemble ens(GroupSpec::lattice(2), kTwoPoint, 3);
  CHECK_THROWS_AS(estimate_mean_distance(ens, z2(0, 0), z2(1, 0), 1), InvalidArgument);
}

TEST_CASE("estimates are independent of the worker count") {
  const Ensemble one(GroupSpec::heisenberg(), kUniform, 77, 1);
  const Ensemble four(GroupSpec::heisenberg(), kUniform, 77, 4);
  const Element y = heisenberg_element(4, 3, 5);
  const auto a = estimate_mean_distance(one, one.group.identity(), y, 64);
  const auto b = estimate_mean_distance(four, four.group.identity(), y, 64);
  CHECK(a.samples == b.samples);
  CHECK(a.mean == b.mean);
  const auto fa = fluctuation_scan(one, {4, 6}, 6, 8);
  const auto fb = fluctuation_scan(four, {4, 6}, 6, 8);
  for (std::size_t k = 0; k < fa.rows.size(); ++k) {
    CHECK(fa.rows[k].deviation == fb.rows[k].deviation);
    CHECK(fa.rows[k].normalized_ci.lo == fb.rows[k].normalized_ci.lo);
  }
}

TEST_CASE("concentration tail") {
  SUBCASE("deterministic weights have zero tail") {
    const Ensemble ens(GroupSpec::lattice(2), kUnit, 1);
    const auto est = estimate_mean_distance(ens, z2(0, 0), z2(6, 2), 20);
    const std::vector<double> grid{0.5, 1, 2};
    for (double t : empirical_tail(est.samples, est.mean, grid)) CHECK(t == 0.0);
    CHECK_THROWS_AS(concentration_tail(ens, z2(0, 0), z2(6, 2), 20, grid), DiagnosticError);
  }
  SUBCASE("slope is negative and the tail scales with sqrt(d)") {
    const Ensemble ens(GroupSpec::lattice(2), kTwoPoint, 5, 2);
    std::vector<double> grid;
    for (int i = 0; i <= 24; ++i) grid.push_back(0.25 * i);
    const auto fit = concentration_tail(ens, z2(0, 0), z2(16, 0), 3000, grid);
    CHECK(fit.fit.slope < 0.0);

    const auto near = estimate_mean_distance(ens, z2(0, 0), z2(16, 0), 3000);
    const auto far = estimate_mean_distance(ens, z2(0, 0), z2(32, 0), 3000);
    for (double theta : {0.25, 0.5}) {
      const std::vector<double> u1{theta * 4.0};
      const std::vector<double> u2{theta * std::sqrt(32.0)};
      const double t1 = empirical_tail(near.samples, near.mean, u1)[0];
      const double t2 = empirical_tail(far.samples, far.mean, u2)[0];
      CHECK(t2 <= 3 * t1);
      CHECK(t1 <= 3 * t2);
    }
  }
}

TEST_CASE("variance scan") {
  SUBCASE("Z^1 matches the closed form 0.25 n") {
    const Ensemble ens(GroupSpec::lattice(1), kTwoPoint, 7, 2);
    const auto scan = variance_scan(ens, lattice_point({1}), {0, 8, 16, 32, 64}, 4000);
    CHECK(scan.points[0].variance == 0.0);
    CHECK(scan.points[0].normalized_log == 0.0);
    for (std::size_t k = 1; k < scan.points.size(); ++k) {
      const auto& p = scan.points[k];
      const double exact = 0.25 * static_cast<double>(p.n);
      CHECK(p.variance_ci.lo <= exact);
      CHECK(p.variance_ci.hi >= exact);
    }
  }
  SUBCASE("requires the symmetric two-point law") {
    const Ensemble ens(GroupSpec::lattice(1), kUniform, 7);
    CHECK_THROWS_AS(variance_scan(ens, lattice_point({1}), {4}, 10), HypothesisViolation);
  }
  SUBCASE("heisenberg normalised variance stays bounded") {
    const Ensemble ens(GroupSpec::heisenberg(), kTwoPoint, 9, 2);
    const auto scan = variance_scan(ens, heisenberg_a(), {4, 8, 16}, 400);
    const auto ratio = variance_ratio(scan, 0, 2, 3);
    CHECK(ratio.ci.lo <= ratio.ratio);
    CHECK(ratio.ci.hi >= ratio.ratio);
    CHECK(ratio.ci.lo <= 1.25);
  }
}

TEST_CASE("ball pair sampling is prefix stable") {
  const GroupSpec H = GroupSpec::heisenberg();
  const auto big = sample_ball_pairs(H, 6, 30, 2, 11);
  const auto small = sample_ball_pairs(H, 6, 10, 2, 11);
  for (std::size_t i = 0; i < small.size(); ++i) {
    CHECK(small[i].x == big[i].x);
    CHECK(small[i].y == big[i].y);
  }
  for (const auto& p : big) {
    CHECK(p.word_distance >= 2);
    CHECK(p.word_distance == word_distance(H, p.x, p.y));
  }
}

TEST_CASE("fluctuation scan") {
  SUBCASE("deterministic weights") {
    const Ensemble ens(GroupSpec::lattice(2), kUnit, 1);
    const auto scan = fluctuation_scan(ens, {8, 16}, 10, 4);
    for (const auto& row : scan.rows) CHECK(row.sup == 0.0);
  }
  SUBCASE("sup is monotone in the sample set") {
    const Ensemble ens(GroupSpec::lattice(2), kTwoPoint, 4);
    const auto scan = fluctuation_scan(ens, {12}, 20, 10);
    CHECK(fluctuation_sup(scan.rows[0], 10) <= fluctuation_sup(scan.rows[0], 20));
    CHECK(fluctuation_sup(scan.rows[0], 20) == scan.rows[0].sup);
  }
}

TEST_CASE("midpoint search") {
  const Ensemble ens(GroupSpec::lattice(2), kTwoPoint, 6, 2);
  const auto at_x = midpoint_search(ens, z2(0, 0), z2(12, 4), 0.0, 60);
  CHECK(at_x.z == z2(0, 0));
  CHECK(at_x.deviation <= 2 * at_x.se_xy);
  const auto at_y = midpoint_search(ens, z2(0, 0), z2(12, 4), 1.0, 60);
  CHECK(at_y.z == z2(12, 4));
  CHECK(at_y.deviation <= 2 * at_y.se_xy);
  const auto mid = midpoint_search(ens, z2(0, 0), z2(60, 0), 0.5, 60);
  CHECK(mid.deviation <= 3 * std::sqrt(60 * std::log(60.0)));
}

TEST_CASE("dyadic subdivision") {
  const Ensemble ens(GroupSpec::lattice(2), kTwoPoint, 6);
  const auto k0 = dyadic_subdivision(ens, z2(0, 0), z2(20, 5), 0, 30);
  CHECK(k0.chain.size() == 2);
  CHECK(k0.inflation == doctest::Approx(1.0));

  const Ensemble unit(GroupSpec::lattice(1), DistributionSpec::deterministic(1.5), 1);
  const auto exact = dyadic_subdivision(unit, lattice_point({0}), lattice_point({8 * 5}), 3, 4, 1.0);
  REQUIRE(exact.gap_mean.size() == 8);
  for (double g : exact.gap_mean) CHECK(g == 5 * 1.5);
  CHECK(exact.inflation == 1.0);
  CHECK_THROWS_AS(dyadic_subdivision(ens, z2(0, 0), z2(10, 0), 3, 10), InvalidArgument);
}

TEST_CASE("tree fluctuation search") {
  SUBCASE("deterministic weights succeed on the first candidate") {
    const Ensemble ens(GroupSpec::tree(3), DistributionSpec::deterministic(1), 1);
    const auto rep = tree_fluctuation_search(ens, 16, 4, 0.0);
    CHECK(rep.found);
    CHECK(rep.scanned == 1);
    CHECK(rep.success_probability == 1.0);
  }
  SUBCASE("found pairs are geodesic segments of minimal weight") {
    const Ensemble ens(GroupSpec::tree(3), kTwoPoint, 2);
    const auto rep = tree_fluctuation_search(ens, 24, 6, 0.0);
    REQUIRE(rep.found);
    CHECK(rep.d_word == 4);
    CHECK(rep.d_omega == 4.0);
    CHECK(passage_time(ens.held_out(0), rep.x, rep.y).time == rep.d_omega);
    double sum = 0.0;
    for (double w : rep.segment_weights) sum += w;
    CHECK(sum == rep.d_omega);
  }
}

TEST_CASE("mean ratio bound") {
  const GroupSpec T = GroupSpec::tree(3);
  const auto uniform = mean_ratio_bound(Ensemble(T, kUniform, 1), 20);
  CHECK(uniform.ratio == doctest::Approx(1.5));
  CHECK(uniform.exceeds_a);
  const auto quarter = mean_ratio_bound(Ensemble(T, DistributionSpec::two_point(1, 2, 0.25), 1), 20);
  CHECK(quarter.ratio == doctest::Approx(1.75));
  try {
    mean_ratio_bound(Ensemble(T, kTwoPoint, 1), 20);
    FAIL("expected HypothesisViolation");
  } catch (const HypothesisViolation& e) {
    CHECK(e.rule() == "nu({a}) < 1/q");
    CHECK(std::string(e.what()).find("0.5 >= 1/3") != std::string::npos);
  }
}
