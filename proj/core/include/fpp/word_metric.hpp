#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <absl/container/flat_hash_map.h>

#include "fpp/group.hpp"

namespace fpp {

inline constexpr std::size_t kDefaultBallCap = 20'000'000;

/// Exact ball of the word metric d_S, enumerated by breadth-first search.
struct WordBall {
  Element origin;
  int radius = 0;
  /// Members in BFS order; distances are non-decreasing along this list.
  std::vector<Element> members;
  std::vector<int> distances;
  /// shell_sizes[k] = |{x : d_S(origin, x) = k}| for k = 0..radius.
  std::vector<std::size_t> shell_sizes;

  std::size_t size() const noexcept { return members.size(); }
  bool contains(const Element& g) const { return index_.contains(g); }
  /// Word distance from the origin, or -1 when g lies outside the ball.
  int distance_of(const Element& g) const;

  absl::flat_hash_map<Element, std::uint32_t> index_;
};

/// Throws BudgetExceeded naming the cap and the last complete radius when the
/// ball would exceed memory_cap elements.
WordBall word_ball(const GroupSpec& group, const Element& origin, int radius,
                   std::size_t memory_cap = kDefaultBallCap);

/// Exact d_S(x, y) by bidirectional BFS from both endpoints. Throws
/// BudgetExceeded if the combined frontier storage exceeds frontier_cap.
std::int64_t bfs_word_distance(const GroupSpec& group, const Element& x, const Element& y,
                               std::size_t frontier_cap = kDefaultBallCap);

/// Exact d_S(x, y). Lattices and trees use their closed forms, products add
/// the factor distances, everything else runs bfs_word_distance.
std::int64_t word_distance(const GroupSpec& group, const Element& x, const Element& y,
                           std::size_t frontier_cap = kDefaultBallCap);

/// True when x^-1 y is a generator.
bool adjacent(const GroupSpec& group, const Element& x, const Element& y);

/// Number of central elements inside B_S(e, radius): {c^k} for Heisenberg,
/// every element for a lattice.
std::size_t center_growth(const GroupSpec& group, int radius,
                          std::size_t memory_cap = kDefaultBallCap);
/// center_growth(group, n) for n = 0..max_radius from a single BFS.
std::vector<std::size_t> center_growth_series(const GroupSpec& group, int max_radius,
                                              std::size_t memory_cap = kDefaultBallCap);

}  // namespace fpp
