#include "fpp/environment.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "fpp/error.hpp"
#include "fpp/mix.hpp"
#include "fpp/word_metric.hpp"

namespace fpp {

namespace {

bool bytes_less(const KeyBytes& a, const KeyBytes& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

std::uint64_t absorb(std::uint64_t h, const KeyBytes& bytes) noexcept {
  const std::size_t n = bytes.size();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    std::uint64_t word = 0;
    for (int k = 7; k >= 0; --k) word = (word << 8) | bytes[i + static_cast<std::size_t>(k)];
    h = mix64(h ^ word);
  }
  std::uint64_t tail = 0;
  for (std::size_t k = n; k > i; --k) tail = (tail << 8) | bytes[k - 1];
  // The length goes into the top byte of the last word so that keys of
  // different lengths never collide structurally.
  tail ^= static_cast<std::uint64_t>(n & 0xFF) << 56;
  return mix64(h ^ tail);
}

}  // namespace

EdgeKey EdgeKey::from_bytes(const KeyBytes& a, const KeyBytes& b) {
  return bytes_less(a, b) ? EdgeKey{a, b} : EdgeKey{b, a};
}

EdgeKey EdgeKey::of(const GroupSpec& group, const Element& x, const Element& y) {
  if (!adjacent(group, x, y)) {
    throw InvalidArgument("edge endpoints " + format_element(group, x) + " and " +
                          format_element(group, y) + " are not adjacent");
  }
  return from_bytes(encode(group, x), encode(group, y));
}

std::uint64_t edge_hash(std::uint64_t master_seed, const KeyBytes& lo, const KeyBytes& hi) noexcept {
  std::uint64_t h = mix64(master_seed ^ kGoldenGamma);
  h = absorb(h, lo);
  return absorb(h, hi);
}

WeightAssignment::WeightAssignment(GroupSpec group, DistributionSpec distribution,
                                   std::uint64_t master_seed)
    : group_(std::move(group)),
      distribution_(distribution),
      master_seed_(master_seed),
      min_weight_(quantize_weight(distribution.support_min())) {
  const DistributionCheck check = validate_distribution(distribution_, group_.degree());
  if (!check.ok) throw HypothesisViolation(check.rule, check.message);
}

double quantize_weight(double w) noexcept {
  if (!std::isfinite(w)) return w;
  return std::ldexp(std::nearbyint(std::ldexp(w, kWeightFractionBits)), -kWeightFractionBits);
}

double WeightAssignment::sampled(const KeyBytes& lo, const KeyBytes& hi) const noexcept {
  return quantize_weight(distribution_.quantile(open_unit(edge_hash(master_seed_, lo, hi))));
}

double WeightAssignment::edge_weight(const EdgeKey& e) const {
  if (overlay_) {
    if (auto it = overlay_->find(e); it != overlay_->end()) return it->second;
  }
  return sampled(e.lo, e.hi);
}

double WeightAssignment::edge_weight_bytes(const KeyBytes& a, const KeyBytes& b) const {
  const bool ordered = bytes_less(a, b);
  const KeyBytes& lo = ordered ? a : b;
  const KeyBytes& hi = ordered ? b : a;
  if (overlay_) {
    if (auto it = overlay_->find(EdgeKey{lo, hi}); it != overlay_->end()) return it->second;
  }
  return sampled(lo, hi);
}

double WeightAssignment::edge_weight(const Element& x, const Element& y) const {
  return edge_weight(EdgeKey::of(group_, x, y));
}

WeightAssignment WeightAssignment::with_overlay(const EdgeKey& e, double weight) const {
  if (!(weight > 0.0)) throw InvalidArgument("overlay weights must be positive");
  WeightAssignment copy = *this;
  auto map = overlay_ ? std::make_shared<absl::flat_hash_map<EdgeKey, double>>(*overlay_)
                      : std::make_shared<absl::flat_hash_map<EdgeKey, double>>();
  const double stored = quantize_weight(weight);
  if (!(stored > 0.0)) throw InvalidArgument("overlay weight rounds to zero");
  (*map)[e] = stored;
  copy.min_weight_ = quantize_weight(distribution_.support_min());
  for (const auto& [key, value] : *map) copy.min_weight_ = std::min(copy.min_weight_, value);
  copy.overlay_ = std::move(map);
  return copy;
}

}  // namespace fpp
