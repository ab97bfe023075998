#pragma once

#include <cstdint>
#include <memory>

#include <absl/container/flat_hash_map.h>

#include "fpp/distribution.hpp"
#include "fpp/group.hpp"

namespace fpp {

/// The unordered edge {x, y}, stored as the two canonical encodings with
/// lo < hi in byte-lexicographic order.
struct EdgeKey {
  KeyBytes lo;
  KeyBytes hi;

  /// Throws InvalidArgument unless x and y are Cayley-adjacent.
  static EdgeKey of(const GroupSpec& group, const Element& x, const Element& y);
  /// From already-encoded endpoints; no adjacency check.
  static EdgeKey from_bytes(const KeyBytes& a, const KeyBytes& b);

  friend bool operator==(const EdgeKey&, const EdgeKey&) = default;
  template <typename H>
  friend H AbslHashValue(H h, const EdgeKey& e) {
    return H::combine(std::move(h), e.lo, e.hi);
  }
};

/// The uniform deviate behind an edge: mix64 absorption of the seed, then
/// the lo bytes and the hi bytes in 8-byte little-endian words.
std::uint64_t edge_hash(std::uint64_t master_seed, const KeyBytes& lo, const KeyBytes& hi) noexcept;

/// Edge weights are rounded to multiples of 2^-32. Path sums below 2^21 are
/// then exact in double precision, so a passage time does not depend on the
/// order in which its path is summed.
inline constexpr int kWeightFractionBits = 32;
double quantize_weight(double w) noexcept;

/// A lazily evaluated i.i.d. environment omega. Each weight is nu's quantile
/// at the open-unit image of edge_hash, quantized, unless the edge is overlaid.
class WeightAssignment {
 public:
  /// Throws HypothesisViolation if the distribution fails
  /// validate_distribution for the group's degree.
  WeightAssignment(GroupSpec group, DistributionSpec distribution, std::uint64_t master_seed);

  const GroupSpec& group() const noexcept { return group_; }
  const DistributionSpec& distribution() const noexcept { return distribution_; }
  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::size_t overlay_size() const noexcept { return overlay_ ? overlay_->size() : 0; }

  double edge_weight(const EdgeKey& e) const;
  /// Weight between two encoded, adjacent endpoints, in either order.
  double edge_weight_bytes(const KeyBytes& a, const KeyBytes& b) const;
  double edge_weight(const Element& x, const Element& y) const;

  /// Copy with omega(e) forced to quantize_weight(weight). Throws
  /// InvalidArgument for weight <= 0.
  WeightAssignment with_overlay(const EdgeKey& e, double weight) const;

  /// Smallest weight any edge can carry: min(quantized a, smallest overlay value).
  double min_weight() const noexcept { return min_weight_; }

 private:
  double sampled(const KeyBytes& lo, const KeyBytes& hi) const noexcept;

  GroupSpec group_;
  DistributionSpec distribution_;
  std::uint64_t master_seed_;
  std::shared_ptr<const absl::flat_hash_map<EdgeKey, double>> overlay_;
  double min_weight_;
};

}  // namespace fpp
