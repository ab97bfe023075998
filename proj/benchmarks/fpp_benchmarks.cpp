#include <benchmark/benchmark.h>

#include "fpp/environment.hpp"
#include "fpp/passage.hpp"
#include "fpp/shape.hpp"
#include "fpp/word_metric.hpp"

namespace {

using namespace fpp;

const DistributionSpec kTwoPoint = DistributionSpec::two_point(1, 2, 0.5);

void BM_PassageTimeZ2(benchmark::State& state) {
  const GroupSpec Z2 = GroupSpec::lattice(2);
  const std::int64_t d = state.range(0);
  std::uint64_t seed = 0;
  std::size_t settled = 0;
  for (auto _ : state) {
    const WeightAssignment omega(Z2, kTwoPoint, seed++);
    const auto r = passage_time(omega, Z2.identity(), lattice_point({d, d / 2}));
    settled += r.settled_count;
    benchmark::DoNotOptimize(r.time);
  }
  state.counters["settled"] = benchmark::Counter(static_cast<double>(settled), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_PassageTimeZ2)->Arg(16)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_PassageTimeHeisenberg(benchmark::State& state) {
  const GroupSpec H = GroupSpec::heisenberg();
  const std::int64_t n = state.range(0);
  std::uint64_t seed = 0;
  std::size_t settled = 0;
  for (auto _ : state) {
    const WeightAssignment omega(H, kTwoPoint, seed++);
    const auto r = passage_time(omega, H.identity(), heisenberg_element(n, 0, 0));
    settled += r.settled_count;
    benchmark::DoNotOptimize(r.time);
  }
  state.counters["settled"] = benchmark::Counter(static_cast<double>(settled), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_PassageTimeHeisenberg)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_FppBallHeisenberg(benchmark::State& state) {
  const GroupSpec H = GroupSpec::heisenberg();
  const WeightAssignment omega(H, kTwoPoint, 1);
  for (auto _ : state) {
    const FppBall ball = fpp_ball(omega, H.identity(), static_cast<double>(state.range(0)));
    benchmark::DoNotOptimize(ball.size());
  }
}
BENCHMARK(BM_FppBallHeisenberg)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_WordBallHeisenberg(benchmark::State& state) {
  const GroupSpec H = GroupSpec::heisenberg();
  for (auto _ : state) {
    const WordBall ball = word_ball(H, H.identity(), static_cast<int>(state.range(0)));
    benchmark::DoNotOptimize(ball.size());
  }
}
BENCHMARK(BM_WordBallHeisenberg)->Arg(8)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_HausdorffHeisenberg(benchmark::State& state) {
  const GroupSpec H = GroupSpec::heisenberg();
  const int n = static_cast<int>(state.range(0));
  const PointCloud a = rescaled_word_ball_cloud(H, n, 1.0);
  const PointCloud b = rescaled_word_ball_cloud(H, n + n / 2, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(hausdorff(a, b).distance);
  state.counters["points"] = static_cast<double>(a.size() + b.size());
}
BENCHMARK(BM_HausdorffHeisenberg)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_HausdorffBruteForce(benchmark::State& state) {
  const GroupSpec H = GroupSpec::heisenberg();
  const PointCloud a = rescaled_word_ball_cloud(H, 6, 1.0);
  const PointCloud b = rescaled_word_ball_cloud(H, 9, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(hausdorff_brute_force(a, b).distance);
  state.counters["points"] = static_cast<double>(a.size() + b.size());
}
BENCHMARK(BM_HausdorffBruteForce)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
