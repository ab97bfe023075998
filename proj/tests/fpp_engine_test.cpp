#include <cmath>
#include <set>
#include <vector>

#include <doctest.h>

#include "fpp/distribution.hpp"
#include "fpp/environment.hpp"
#include "fpp/error.hpp"
#include "fpp/mix.hpp"
#include "fpp/parallel.hpp"
#include "fpp/passage.hpp"
#include "fpp/statistics.hpp"
#include "fpp/word_metric.hpp"
#include "oracles.hpp"

using namespace fpp;

namespace {

const DistributionSpec kTwoPoint = DistributionSpec::two_point(1, 2, 0.5);
const DistributionSpec kUniform = DistributionSpec::uniform(1, 2);

}  // namespace

TEST_CASE("distribution validation") {
  const auto zero_atom = validate_distribution(DistributionSpec::two_point(0, 1, 0.5), 4);
  CHECK_FALSE(zero_atom.ok);
  CHECK(zero_atom.rule == "nu({0}) < 1/degree");
  CHECK(zero_atom.message.find("nu({0}) >= 1/degree") != std::string::npos);
  CHECK(validate_distribution(kTwoPoint, 4).ok);
  CHECK(validate_distribution(DistributionSpec::shifted_exponential(0, 1), 6).ok);
  CHECK(validate_distribution(DistributionSpec::two_point(0, 1, 0.1), 6).ok);
  CHECK_FALSE(validate_distribution(DistributionSpec::uniform(2, 1), 4).ok);
  CHECK_FALSE(validate_distribution(DistributionSpec::two_point(1, 2, 1.5), 4).ok);
  CHECK_FALSE(validate_distribution(DistributionSpec::shifted_exponential(0, -1), 4).ok);
  CHECK_FALSE(validate_distribution(DistributionSpec::uniform(-1, 1), 4).ok);
  CHECK_THROWS_AS(WeightAssignment(GroupSpec::lattice(2), DistributionSpec::two_point(0, 1, 0.5), 1),
                  HypothesisViolation);
}

TEST_CASE("distribution moments and quantiles") {
  CHECK(kTwoPoint.mean() == 1.5);
  CHECK(kTwoPoint.variance() == 0.25);
  CHECK(kUniform.mean() == 1.5);
  CHECK(kUniform.variance() == doctest::Approx(1.0 / 12));
  const auto e = DistributionSpec::shifted_exponential(1, 2);
  CHECK(e.mean() == 1.5);
  CHECK(e.variance() == 0.25);
  CHECK(kTwoPoint.quantile(0.25) == 1.0);
  CHECK(kTwoPoint.quantile(0.75) == 2.0);
  CHECK(kUniform.quantile(0.5) == 1.5);
  CHECK(e.quantile(1 - std::exp(-2.0)) == doctest::Approx(2.0));
  CHECK(kTwoPoint.atom(1) == 0.5);
  CHECK(kUniform.atom(1) == 0.0);
  CHECK(kUniform.mass_in(1, 1.25) == doctest::Approx(0.25));
  CHECK(kTwoPoint.mass_in(1, 1) == 0.5);
}

TEST_CASE("edge weights are deterministic, symmetric and in the support") {
  const GroupSpec Z2 = GroupSpec::lattice(2);
  const WeightAssignment omega(Z2, kTwoPoint, 99);
  const WeightAssignment again(Z2, kTwoPoint, 99);
  const WordBall ball = word_ball(Z2, Z2.identity(), 6);
  for (const auto& x : ball.members) {
    for (const auto& s : Z2.generators()) {
      const Element y = multiply(Z2, x, s);
      const double w = omega.edge_weight(x, y);
      CHECK((w == 1.0 || w == 2.0));
      CHECK(w == omega.edge_weight(y, x));
      CHECK(w == again.edge_weight(x, y));
    }
  }
  CHECK_THROWS_AS(omega.edge_weight(lattice_point({0, 0}), lattice_point({1, 1})), InvalidArgument);
}

TEST_CASE("edge weight mean over 1e5 distinct edges") {
  const GroupSpec Z2 = GroupSpec::lattice(2);
  for (const auto& dist : {kTwoPoint, kUniform, DistributionSpec::shifted_exponential(0.5, 2)}) {
    const WeightAssignment omega(Z2, dist, 2024);
    std::vector<double> w;
    for (std::int64_t i = 0; i < 1000; ++i) {
      for (std::int64_t j = 0; j < 100; ++j) w.push_back(omega.edge_weight(lattice_point({i, j}), lattice_point({i + 1, j})));
    }
    const double se = std::sqrt(dist.variance() / static_cast<double>(w.size()));
    CHECK(std::fabs(sample_mean(w) - dist.mean()) <= 3 * se);
  }
}

TEST_CASE("passage time examples") {
  const GroupSpec Z1 = GroupSpec::lattice(1);
  const WeightAssignment unit(Z1, DistributionSpec::deterministic(1), 0);
  const auto r = passage_time(unit, lattice_point({0}), lattice_point({5}));
  CHECK(r.time == 5.0);
  CHECK(r.path.size() == 6);
  const auto same = passage_time(unit, lattice_point({3}), lattice_point({3}));
  CHECK(same.time == 0.0);
  CHECK(same.path.empty());
}

TEST_CASE("tree passage times equal the sum along the reduced path") {
  const GroupSpec T = GroupSpec::tree(3);
  const WordBall ball = word_ball(T, T.identity(), 6);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const WeightAssignment omega(T, kUniform, seed);
    SplitMix64 rng(seed + 100);
    for (int i = 0; i < 30; ++i) {
      const Element& x = ball.members[rng.below(ball.size())];
      const Element& y = ball.members[rng.below(ball.size())];
      // Reduced path: strip the common prefix, walk x back to it, then forward to y.
      const auto& xc = x.code();
      const auto& yc = y.code();
      std::size_t common = 0;
      while (common < xc.size() && common < yc.size() && xc[common] == yc[common]) ++common;
      double sum = 0.0;
      std::vector<int> word(xc.begin(), xc.end());
      while (word.size() > common) {
        std::vector<int> shorter(word.begin(), word.end() - 1);
        sum += omega.edge_weight(tree_word(word), tree_word(shorter));
        word = shorter;
      }
      for (std::size_t k = common; k < yc.size(); ++k) {
        std::vector<int> longer(word);
        longer.push_back(static_cast<int>(yc[k]));
        sum += omega.edge_weight(tree_word(word), tree_word(longer));
        word = longer;
      }
      CHECK(passage_time(omega, x, y).time == sum);
    }
  }
}

TEST_CASE("best-first search equals brute-force simple path enumeration on Z^2") {
  const GroupSpec Z2 = GroupSpec::lattice(2);
  using V = std::pair<std::int64_t, std::int64_t>;
  // Weights lie in [1, 2], so a geodesic between points at word distance <= 4
  // has at most 8 edges; enumerating all simple paths of that length is exact.
  std::set<V> reach, ball;
  for (std::int64_t i = -12; i <= 12; ++i)
    for (std::int64_t j = -12; j <= 12; ++j) {
      if (std::abs(i) + std::abs(j) <= 12) reach.insert({i, j});
      if (std::abs(i) + std::abs(j) <= 4) ball.insert({i, j});
    }
  auto neighbours = [](const V& v) {
    return std::vector<V>{{v.first + 1, v.second}, {v.first - 1, v.second}, {v.first, v.second + 1}, {v.first, v.second - 1}};
  };
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const WeightAssignment omega(Z2, kTwoPoint, seed);
    auto weight = [&](const V& a, const V& b) {
      return omega.edge_weight(lattice_point({a.first, a.second}), lattice_point({b.first, b.second}));
    };
    for (const V& source : {V{0, 0}, V{2, -1}, V{-4, 0}}) {
      const auto minima = oracle::simple_path_minima(source, reach, 8, neighbours, weight);
      for (const V& v : ball) {
        if (std::abs(v.first - source.first) + std::abs(v.second - source.second) > 4) continue;
        const double t = passage_time(omega, lattice_point({source.first, source.second}), lattice_point({v.first, v.second})).time;
        CHECK(t == minima.at(v));
      }
    }
  }
}

TEST_CASE("symmetry, triangle inequality and sandwich on sampled pairs") {
  for (const auto& g : {GroupSpec::lattice(2), GroupSpec::heisenberg(), GroupSpec::tree(3), GroupSpec::lattice(3)}) {
    const WordBall ball = word_ball(g, g.identity(), 5);
    for (const auto& dist : {kTwoPoint, kUniform}) {
      const WeightAssignment omega(g, dist, 17);
      SplitMix64 rng(23);
      for (int i = 0; i < 40; ++i) {
        const Element& x = ball.members[rng.below(ball.size())];
        const Element& y = ball.members[rng.below(ball.size())];
        const Element& z = ball.members[rng.below(ball.size())];
        const double xy = passage_time(omega, x, y).time;
        const double yx = passage_time(omega, y, x).time;
        const double xz = passage_time(omega, x, z).time;
        const double yz = passage_time(omega, y, z).time;
        CHECK(xy == yx);
        CHECK(xz <= xy + yz + 1e-12);
        const double d = static_cast<double>(word_distance(g, x, y));
        CHECK(xy >= dist.support_min() * d);
        CHECK(xy <= dist.support_max() * d);
      }
    }
  }
}

TEST_CASE("the returned path is a Cayley path whose weight is the time") {
  const GroupSpec H = GroupSpec::heisenberg();
  const WeightAssignment omega(H, kUniform, 5);
  const auto r = passage_time(omega, H.identity(), heisenberg_element(3, -2, 4));
  REQUIRE(r.path.size() >= 2);
  CHECK(r.path.front() == H.identity());
  CHECK(r.path.back() == heisenberg_element(3, -2, 4));
  for (std::size_t i = 1; i < r.path.size(); ++i) CHECK(adjacent(H, r.path[i - 1], r.path[i]));
  CHECK(path_weight(omega, r.path) == doctest::Approx(r.time).epsilon(1e-14));
}

TEST_CASE("left invariance in law") {
  const GroupSpec H = GroupSpec::heisenberg();
  const Element g = heisenberg_element(2, 1, 3);
  const Element k = heisenberg_element(3, -2, 5);
  const Element kg = multiply(H, k, g);
  std::vector<double> from_e, from_k;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const WeightAssignment omega(H, kUniform, seed);
    from_e.push_back(passage_time(omega, H.identity(), g).time);
    from_k.push_back(passage_time(omega, k, kg).time);
  }
  const KsResult ks = ks_two_sample(from_e, from_k);
  CHECK(ks.p_value > 0.01);
  CHECK(ks.statistic == doctest::Approx(oracle::ks_statistic(from_e, from_k)));
}

TEST_CASE("raising an edge weight never decreases passage times") {
  const GroupSpec Z2 = GroupSpec::lattice(2);
  const WeightAssignment omega(Z2, kTwoPoint, 8);
  const WordBall ball = word_ball(Z2, Z2.identity(), 6);
  SplitMix64 rng(31);
  for (int i = 0; i < 40; ++i) {
    const Element& x = ball.members[rng.below(ball.size())];
    const Element& y = ball.members[rng.below(ball.size())];
    const auto base = passage_time(omega, x, y);
    if (base.path.size() < 2) continue;
    const std::size_t j = rng.below(base.path.size() - 1);
    const EdgeKey e = EdgeKey::of(Z2, base.path[j], base.path[j + 1]);
    const WeightAssignment raised = omega.with_overlay(e, omega.edge_weight(e) + 1.0 + rng.uniform());
    CHECK(raised.overlay_size() == 1);
    CHECK(passage_time(raised, x, y).time >= base.time);
    // An off-path edge raised.
    const Element& off = ball.members[rng.below(ball.size())];
    const EdgeKey e2 = EdgeKey::of(Z2, off, multiply(Z2, off, Z2.generators()[0]));
    CHECK(passage_time(omega.with_overlay(e2, 5.0), x, y).time >= base.time);
  }
  CHECK_THROWS_AS(omega.with_overlay(EdgeKey::of(Z2, Z2.identity(), lattice_point({1, 0})), 0.0), InvalidArgument);
}

TEST_CASE("fpp ball") {
  const GroupSpec Z2 = GroupSpec::lattice(2);
  SUBCASE("deterministic weight c gives the word ball") {
    const double c = 1.5;
    const WeightAssignment omega(Z2, DistributionSpec::deterministic(c), 0);
    for (int n = 0; n <= 8; ++n) {
      const FppBall b = fpp_ball(omega, Z2.identity(), c * n);
      const WordBall w = word_ball(Z2, Z2.identity(), n);
      CHECK(b.size() == w.size());
      for (const auto& m : w.members) CHECK(b.contains(m));
    }
  }
  SUBCASE("members are consistent with passage_time") {
    const WeightAssignment omega(Z2, kUniform, 3);
    const FppBall b = fpp_ball(omega, Z2.identity(), 9.0);
    SplitMix64 rng(41);
    for (int i = 0; i < 50; ++i) {
      const Element& m = b.members[rng.below(b.size())];
      CHECK(passage_time(omega, Z2.identity(), m).time == b.time_of(m));
      CHECK(b.time_of(m) <= 9.0);
    }
  }
  SUBCASE("sandwich between word balls") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const WeightAssignment omega(Z2, kTwoPoint, seed);
      for (int n : {4, 8, 12}) {
        const std::size_t size = fpp_ball(omega, Z2.identity(), n).size();
        CHECK(size >= word_ball(Z2, Z2.identity(), n / 2).size());
        CHECK(size <= word_ball(Z2, Z2.identity(), n).size());
      }
    }
  }
}

TEST_CASE("multi-target search agrees with point searches") {
  const GroupSpec H = GroupSpec::heisenberg();
  const WeightAssignment omega(H, kUniform, 12);
  const WordBall ball = word_ball(H, H.identity(), 4);
  const auto times = passage_times_from(omega, H.identity(), ball.members);
  for (std::size_t i = 0; i < ball.size(); i += 7) {
    CHECK(times[i] == passage_time(omega, H.identity(), ball.members[i]).time);
  }
}

TEST_CASE("budget exhaustion carries the best bound") {
  const GroupSpec Z2 = GroupSpec::lattice(2);
  const WeightAssignment omega(Z2, kUniform, 1);
  try {
    passage_time(omega, Z2.identity(), lattice_point({60, 60}), SearchLimits{500});
    FAIL("expected BudgetExceeded");
  } catch (const BudgetExceeded& e) {
    CHECK(e.budget() == 500);
    CHECK(e.progress() > 0.0);
    CHECK(e.progress() <= passage_time(omega, Z2.identity(), lattice_point({60, 60})).time);
  }
}

TEST_CASE("parallel_for rethrows the lowest failing index") {
  for (unsigned workers : {1u, 4u}) {
    std::vector<int> hit(100, 0);
    try {
      parallel_for(100, workers, [&](std::size_t i) {
        hit[i] = 1;
        if (i == 37 || i == 80) throw InvalidArgument("task " + std::to_string(i));
      });
      FAIL("expected a throw");
    } catch (const InvalidArgument& e) {
      CHECK(std::string(e.what()) == "task 37");
    }
    for (int i = 0; i <= 37; ++i) CHECK(hit[i] == 1);
  }
  const auto squares = parallel_map<std::size_t>(50, 3, [](std::size_t i) { return i * i; });
  for (std::size_t i = 0; i < 50; ++i) CHECK(squares[i] == i * i);
}
