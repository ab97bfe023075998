#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <absl/container/flat_hash_map.h>

#include "fpp/environment.hpp"
#include "fpp/group.hpp"

namespace fpp {

inline constexpr std::size_t kDefaultSettledBudget = 50'000'000;

struct SearchLimits {
  /// Maximum number of vertices popped from the queue before BudgetExceeded.
  std::size_t settled_budget = kDefaultSettledBudget;
};

/// d_omega(x, y) with one optimal path.
struct PassageTimeResult {
  double time = 0.0;
  /// x, ..., y. Empty when x == y.
  std::vector<Element> path;
  std::size_t settled_count = 0;
};

/// Exact passage time by best-first search on the implicit Cayley graph.
///
/// The queue is ordered by g + a * L(v, y) where L is the word-distance lower
/// bound of the group and a the smallest possible weight; L is 1-Lipschitz so
/// the order is consistent and y's label is final when y is popped. Equal
/// keys are broken by the canonical element order.
PassageTimeResult passage_time(const WeightAssignment& omega, const Element& x, const Element& y,
                               const SearchLimits& limits = {});

/// B_omega(origin, T) with exact passage times.
struct FppBall {
  Element origin;
  double horizon = 0.0;
  /// Settled order: times are non-decreasing along this list.
  std::vector<Element> members;
  std::vector<double> times;
  std::size_t settled_count = 0;

  std::size_t size() const noexcept { return members.size(); }
  bool contains(const Element& g) const { return index_.contains(g); }
  /// Time of g, or -1 when g lies outside the ball.
  double time_of(const Element& g) const;

  absl::flat_hash_map<Element, std::uint32_t> index_;
};

/// Dijkstra from origin, stopped once the smallest queued time exceeds T.
FppBall fpp_ball(const WeightAssignment& omega, const Element& origin, double horizon,
                 const SearchLimits& limits = {});

/// d_omega(origin, t) for every target, from one Dijkstra run stopped when
/// the last target is settled. Output order matches the targets.
std::vector<double> passage_times_from(const WeightAssignment& omega, const Element& origin,
                                       std::span<const Element> targets,
                                       const SearchLimits& limits = {});

/// Sum of edge weights along consecutive path vertices.
double path_weight(const WeightAssignment& omega, std::span<const Element> path);

}  // namespace fpp
