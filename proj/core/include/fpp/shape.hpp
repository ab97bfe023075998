#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fpp/distribution.hpp"
#include "fpp/environment.hpp"
#include "fpp/experiments.hpp"
#include "fpp/group.hpp"
#include "fpp/passage.hpp"

namespace fpp {

enum class Gauge { L1, Heisenberg };

const char* gauge_name(Gauge g) noexcept;

struct CloudProvenance {
  std::string group;
  /// Decimal master seed, or "deterministic".
  std::string seed;
  int n = 1;
  double r = 0.0;
};

/// Rescaled ball as a flat array of points. Heisenberg clouds hold (u, v, w);
/// lattice clouds hold the d coordinates.
struct PointCloud {
  int dimension = 0;
  Gauge gauge = Gauge::L1;
  std::vector<double> coords;
  /// Passage time (or word distance) of each point before rescaling.
  std::vector<double> values;
  CloudProvenance provenance;

  std::size_t size() const noexcept { return dimension == 0 ? 0 : coords.size() / static_cast<std::size_t>(dimension); }
  std::span<const double> point(std::size_t i) const {
    return {coords.data() + i * static_cast<std::size_t>(dimension), static_cast<std::size_t>(dimension)};
  }
  void push(std::span<const double> p, double value);
};

/// Distance from p to q in the gauge: sum |q - p| for L1, N(p^-1 q) for Heisenberg.
double gauge_distance(Gauge gauge, std::span<const double> p, std::span<const double> q);

/// delta_{1/n} of fpp_ball(e, r n), for Heisenberg or lattice environments.
PointCloud rescaled_fpp_ball_cloud(const WeightAssignment& omega, int n, double r, const SearchLimits& limits = {});

/// delta_{1/n} of the word ball B_S(e, floor(r n)).
PointCloud rescaled_word_ball_cloud(const GroupSpec& group, int n, double r);

struct HausdorffReport {
  CloudProvenance a;
  CloudProvenance b;
  Gauge gauge = Gauge::L1;
  double distance = 0.0;
  /// sup_{p in A} inf_{q in B} d(p, q) and the reverse.
  double directed_ab = 0.0;
  double directed_ba = 0.0;
};

/// Exact Hausdorff distance, grid-bucketed with early break. Throws
/// InvalidArgument on gauge or dimension mismatch or an empty cloud.
HausdorffReport hausdorff(const PointCloud& a, const PointCloud& b, unsigned workers = 1);
/// Reference O(|A| |B|) computation.
HausdorffReport hausdorff_brute_force(const PointCloud& a, const PointCloud& b);

struct CauchyRow {
  int n = 0;
  int n_next = 0;
  std::size_t size = 0;
  std::size_t size_next = 0;
  double distance = 0.0;
};

struct ShapeCauchyScan {
  std::vector<CauchyRow> rows;
  std::vector<PointCloud> clouds;
};

/// One environment with the given seed for the whole grid; consecutive
/// Hausdorff distances between rescaled FPP clouds. n_grid must not decrease.
ShapeCauchyScan shape_cauchy_scan(const GroupSpec& group, const DistributionSpec& dist, std::uint64_t seed,
                                  double r, std::vector<int> n_grid, unsigned workers = 1,
                                  const SearchLimits& limits = {});

struct L1Comparison {
  int dimension = 0;
  double weight = 0.0;
  int n = 0;
  double distance = 0.0;
  /// d / (c n).
  double bound = 0.0;
  /// Largest L1 norm in the rescaled FPP cloud.
  double farthest = 0.0;
  std::size_t cloud_size = 0;
  std::size_t sample_size = 0;
};

/// Rescaled deterministic FPP ball on Z^d against {p in (1/n) Z^d : |p|_1 <= 1/c}.
L1Comparison l1_ball_compare(int dimension, double weight, int n, unsigned workers = 1);

struct GhCheck {
  bool pass = true;
  int n = 0;
  double eps = 0.0;
  std::vector<BallPair> pairs;
  std::vector<double> held_out;
  std::vector<double> mean;
  std::vector<double> std_error;
  /// |held_out - mean| - (eps n + 3 std_error); positive means a violation.
  std::vector<double> margin;
  std::size_t failures = 0;
  double failure_rate = 0.0;
  std::size_t worst = 0;
  double worst_margin = 0.0;
};

/// Checks |d_omega(x,y) - dbar(x,y)| <= eps n + 3 std_error on pairs sampled from
/// B(e, n). omega is held-out environment 0 of the ensemble.
GhCheck gh_approximation_check(const Ensemble& ens, int n, double eps, std::size_t pair_samples,
                               std::size_t replicas);

struct DirectionalNormEstimate {
  Element direction;
  std::vector<std::int64_t> n_grid;
  std::vector<std::int64_t> word_distance;
  /// mean of d_omega(e, g^n) / n and its standard error.
  std::vector<double> series;
  std::vector<double> std_error;
  /// Raw means of d_omega(e, g^n).
  std::vector<double> mean_time;
  std::vector<double> time_std_error;
  /// Over the last min(3, |grid|) entries.
  double trailing_mean = 0.0;
  double trailing_spread = 0.0;
};

DirectionalNormEstimate directional_norm(const Ensemble& ens, const Element& direction,
                                         std::vector<std::int64_t> n_grid, std::size_t replicas);

}  // namespace fpp
