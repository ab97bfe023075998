#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fpp/distribution.hpp"
#include "fpp/environment.hpp"
#include "fpp/group.hpp"
#include "fpp/passage.hpp"
#include "fpp/statistics.hpp"

namespace fpp {

/// Seed streams. Replica i uses derive_seed(master, i); the other streams
/// live at indices with a high tag bit set so they never meet a replica.
inline constexpr std::uint64_t kHeldOutStream = 1ULL << 63;
inline constexpr std::uint64_t kSamplingStream = 1ULL << 62;
inline constexpr std::uint64_t kBootstrapStream = 1ULL << 61;

/// Human-readable statement of the seed rule, echoed into manifests.
std::string seed_rule_description();

/// Everything an experiment needs to draw environments.
struct Ensemble {
  /// Throws HypothesisViolation when the distribution fails validation.
  Ensemble(GroupSpec group, DistributionSpec distribution, std::uint64_t master_seed,
           unsigned workers = 1, SearchLimits limits = {});

  GroupSpec group;
  DistributionSpec distribution;
  std::uint64_t master_seed;
  unsigned workers;
  SearchLimits limits;

  std::uint64_t replica_seed(std::size_t i) const noexcept;
  std::uint64_t stream_seed(std::uint64_t stream, std::size_t k) const noexcept;
  WeightAssignment replica(std::size_t i) const;
  WeightAssignment held_out(std::size_t k) const;
};

/// Passage times d_omega_i(x, y) for replicas i = 0..replicas-1.
std::vector<double> replica_times(const Ensemble& ens, const Element& x, const Element& y,
                                  std::size_t replicas);

struct MeanDistanceEstimate {
  Element x;
  Element y;
  std::size_t replicas = 0;
  std::int64_t word_distance = 0;
  double mean = 0.0;
  double std_error = 0.0;
  std::vector<double> samples;
};

/// Monte Carlo estimate of the average distance dbar(x, y). replicas >= 2.
MeanDistanceEstimate estimate_mean_distance(const Ensemble& ens, const Element& x, const Element& y,
                                            std::size_t replicas);

/// P(|d - mean| >= u) for each u, from the samples of an estimate.
std::vector<double> empirical_tail(std::span<const double> samples, double mean,
                                   std::span<const double> u_grid);

struct ConcentrationFit {
  MeanDistanceEstimate estimate;
  std::vector<double> u_grid;
  std::vector<double> tail;
  /// log tail against u^2 / d_S over the points with tail in [1e-3, 0.5].
  LinearFit fit;
  std::vector<bool> in_fit;
};

inline constexpr double kTailFitLow = 1e-3;
inline constexpr double kTailFitHigh = 0.5;

/// Throws DiagnosticError when fewer than two grid points fall in the fit range.
ConcentrationFit concentration_tail(const Ensemble& ens, const Element& x, const Element& y,
                                    std::size_t replicas, std::vector<double> u_grid);

struct VariancePoint {
  std::int64_t n = 0;
  std::int64_t word_distance = 0;
  double mean = 0.0;
  double variance = 0.0;
  Interval variance_ci;
  /// var (1 + log n) / n and var / n; both 0 at n = 0.
  double normalized_log = 0.0;
  Interval normalized_log_ci;
  double normalized_linear = 0.0;
  Interval normalized_linear_ci;
};

struct VarianceScan {
  Element direction;
  std::size_t replicas = 0;
  std::vector<VariancePoint> points;
  /// samples[k][i]: replica i at grid entry k. Replica i uses the same
  /// environment for every n.
  std::vector<std::vector<double>> samples;
};

/// Requires TwoPoint(a, b, 1/2); throws HypothesisViolation otherwise.
VarianceScan variance_scan(const Ensemble& ens, const Element& direction, std::vector<std::int64_t> n_grid,
                           std::size_t replicas);

struct RatioEstimate {
  double ratio = 0.0;
  Interval ci;
};

/// normalized_log[j] / normalized_log[i] with a paired bootstrap interval.
RatioEstimate variance_ratio(const VarianceScan& scan, std::size_t i, std::size_t j, std::uint64_t seed);

struct BallPair {
  Element x;
  Element y;
  std::int64_t word_distance = 0;
};

/// Pairs drawn uniformly and independently from B_S(e, radius), keeping those
/// with d_S(x, y) >= min_distance. Drawing is sequential, so the first k pairs
/// of a larger sample equal a sample of size k.
std::vector<BallPair> sample_ball_pairs(const GroupSpec& group, int radius, std::size_t count,
                                        std::int64_t min_distance, std::uint64_t seed);

struct FluctuationRow {
  int r = 0;
  std::vector<BallPair> pairs;
  std::vector<double> mean;
  std::vector<double> std_error;
  std::vector<double> held_out;
  /// |held_out - mean| per pair.
  std::vector<double> deviation;
  double sup = 0.0;
  /// (r log r)^{1/2}.
  double normalizer = 0.0;
  double normalized = 0.0;
  /// Bootstrap over pairs of sup / normalizer.
  Interval normalized_ci;
};

struct FluctuationScan {
  std::size_t replicas = 0;
  std::vector<FluctuationRow> rows;
};

/// Row k uses pair stream k and held-out environment k.
FluctuationScan fluctuation_scan(const Ensemble& ens, std::vector<int> r_grid, std::size_t pair_samples,
                                 std::size_t replicas);

/// Sup of the deviations over the first `count` pairs of a row.
double fluctuation_sup(const FluctuationRow& row, std::size_t count);

/// normalized[j] / normalized[i]; pairs resampled independently per row.
RatioEstimate fluctuation_ratio(const FluctuationScan& scan, std::size_t i, std::size_t j,
                                std::uint64_t seed);

struct MidpointResult {
  Element x;
  Element y;
  double lambda = 0.0;
  Element z;
  std::size_t z_index = 0;
  std::vector<Element> geodesic;
  std::int64_t word_distance = 0;
  double dbar_xy = 0.0;
  double dbar_xz = 0.0;
  double dbar_zy = 0.0;
  double se_xy = 0.0;
  double se_xz = 0.0;
  double se_zy = 0.0;
  double deviation = 0.0;
  /// deviation / (r log r)^{1/2} with r = d_S(x, y); 0 when r < 2.
  double normalized_deviation = 0.0;
};

/// Takes the geodesic of held-out environment `held_out_index`, and picks the
/// vertex z on it minimising max(|lambda dbar(x,y) - dbar(x,z)|, |(1-lambda) dbar(x,y) - dbar(z,y)|)
/// with Monte Carlo means; ties go to the vertex nearest x.
MidpointResult midpoint_search(const Ensemble& ens, const Element& x, const Element& y, double lambda,
                               std::size_t replicas, std::size_t held_out_index = 0);

inline constexpr double kDefaultAlpha0 = 8.0;

struct SubdivisionReport {
  Element x;
  Element y;
  int k = 0;
  std::vector<Element> chain;
  std::vector<double> gap_mean;
  std::vector<double> gap_std_error;
  double dbar_xy = 0.0;
  double se_xy = 0.0;
  double max_gap = 0.0;
  double min_gap = 0.0;
  /// sum of gap means / dbar(x, y).
  double inflation = 0.0;
};

/// Recursive midpoint_search with lambda = 1/2 to depth k. Throws
/// InvalidArgument when dbar(x, y) / 2^k < alpha0.
SubdivisionReport dyadic_subdivision(const Ensemble& ens, const Element& x, const Element& y, int k,
                                     std::size_t replicas, double alpha0 = kDefaultAlpha0);

struct TreeSearchReport {
  bool found = false;
  Element x;
  Element y;
  double d_omega = 0.0;
  std::int64_t d_word = 0;
  std::vector<double> segment_weights;
  std::uint64_t scanned = 0;
  /// |X|: one centre per reduced prefix of length sphere_depth - ceil(separation/2) + 1.
  double center_count = 0.0;
  std::int64_t separation = 0;
  std::int64_t segment_length = 0;
  std::int64_t sphere_depth = 0;
  /// nu([a, a + eps])^segment_length.
  double per_segment_probability = 0.0;
  /// 1 - (1 - per_segment_probability)^center_count. Exact for eps = 0, a
  /// lower bound otherwise.
  double success_probability = 0.0;
};

inline constexpr std::uint64_t kDefaultTreeScanCap = 1ULL << 22;

/// Below-average fluctuation search on the tree of the ensemble's group:
/// a maximal ceil(r/4)-separated set on the sphere of radius r - floor(r/K),
/// one outward geodesic segment of length floor(r/K) per centre, scanned in
/// canonical order for total weight <= (a + eps) * length. Uses held-out
/// environment 0.
TreeSearchReport tree_fluctuation_search(const Ensemble& ens, int r, int K, double eps,
                                         std::uint64_t max_scan = kDefaultTreeScanCap);

struct MeanRatioReport {
  double ratio = 0.0;
  double a = 0.0;
  double atom_at_a = 0.0;
  double inverse_degree = 0.0;
  std::vector<BallPair> pairs;
  /// dbar(x, y) = mean(omega) d_S(x, y) per pair.
  std::vector<double> dbar;
  bool exceeds_a = false;
};

/// On a tree dbar = mean(omega) d_S exactly. Throws HypothesisViolation
/// naming nu({a}) and 1/q unless nu({a}) < 1/degree.
MeanRatioReport mean_ratio_bound(const Ensemble& ens, std::size_t pair_samples, int radius = 8);

}  // namespace fpp
