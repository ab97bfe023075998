#include "fpp/word_metric.hpp"

#include <algorithm>

#include "fpp/error.hpp"

namespace fpp {

int WordBall::distance_of(const Element& g) const {
  auto it = index_.find(g);
  return it == index_.end() ? -1 : distances[it->second];
}

WordBall word_ball(const GroupSpec& group, const Element& origin, int radius, std::size_t memory_cap) {
  if (radius < 0) throw InvalidArgument("word_ball radius must be non-negative");
  if (!is_member(group, origin)) throw InvalidArgument("word_ball origin is not an element of " + group.name());
  WordBall ball;
  ball.origin = origin;
  ball.radius = radius;
  ball.members.push_back(origin);
  ball.distances.push_back(0);
  ball.index_.emplace(origin, 0);
  ball.shell_sizes.push_back(1);

  std::size_t layer_begin = 0;
  for (int d = 0; d < radius; ++d) {
    const std::size_t layer_end = ball.members.size();
    for (std::size_t i = layer_begin; i < layer_end; ++i) {
      for (const auto& s : group.generators()) {
        Element next = multiply(group, ball.members[i], s);
        auto [it, inserted] = ball.index_.try_emplace(std::move(next), 0);
        if (!inserted) continue;
        it->second = static_cast<std::uint32_t>(ball.members.size());
        ball.members.push_back(it->first);
        ball.distances.push_back(d + 1);
        if (ball.members.size() > memory_cap) {
          throw BudgetExceeded("word ball exceeded memory cap of " + std::to_string(memory_cap) +
                                   " elements after completing radius " + std::to_string(d),
                               memory_cap, d);
        }
      }
    }
    ball.shell_sizes.push_back(ball.members.size() - layer_end);
    layer_begin = layer_end;
  }
  return ball;
}

std::int64_t bfs_word_distance(const GroupSpec& group, const Element& x, const Element& y,
                               std::size_t frontier_cap) {
  if (!is_member(group, x) || !is_member(group, y)) {
    throw InvalidArgument("word_distance arguments must be elements of " + group.name());
  }
  if (x == y) return 0;

  struct Side {
    absl::flat_hash_map<Element, std::int64_t> dist;
    std::vector<Element> frontier;
    std::int64_t depth = 0;
  };
  Side sx, sy;
  sx.dist.emplace(x, 0);
  sx.frontier.push_back(x);
  sy.dist.emplace(y, 0);
  sy.frontier.push_back(y);

  while (!sx.frontier.empty() && !sy.frontier.empty()) {
    Side& grow = sx.frontier.size() <= sy.frontier.size() ? sx : sy;
    const Side& other = &grow == &sx ? sy : sx;
    std::vector<Element> next;
    std::int64_t best = -1;
    for (const auto& v : grow.frontier) {
      for (const auto& s : group.generators()) {
        Element w = multiply(group, v, s);
        if (grow.dist.contains(w)) continue;
        if (auto it = other.dist.find(w); it != other.dist.end()) {
          const std::int64_t candidate = grow.depth + 1 + it->second;
          if (best < 0 || candidate < best) best = candidate;
        }
        grow.dist.emplace(w, grow.depth + 1);
        next.push_back(std::move(w));
      }
    }
    if (best >= 0) return best;
    grow.frontier = std::move(next);
    ++grow.depth;
    if (sx.dist.size() + sy.dist.size() > frontier_cap) {
      throw BudgetExceeded("bidirectional BFS exceeded frontier cap of " + std::to_string(frontier_cap),
                           frontier_cap, static_cast<double>(sx.depth + sy.depth));
    }
  }
  throw InvalidArgument("word_distance: endpoints are not connected");
}

std::int64_t word_distance(const GroupSpec& group, const Element& x, const Element& y,
                           std::size_t frontier_cap) {
  if (!is_member(group, x) || !is_member(group, y)) {
    throw InvalidArgument("word_distance arguments must be elements of " + group.name());
  }
  switch (group.kind()) {
    case GroupKind::IntegerLattice:
    case GroupKind::RegularTree:
      return word_distance_lower_bound(group, x, y);
    case GroupKind::Product:
      // The Cayley graph of a product with generators S x {e} u {e} x T is the
      // Cartesian product graph, whose metric is the sum of the factor metrics.
      return word_distance(group.left(), product_left(group, x), product_left(group, y), frontier_cap) +
             word_distance(group.right(), product_right(group, x), product_right(group, y), frontier_cap);
    case GroupKind::Heisenberg:
      return bfs_word_distance(group, x, y, frontier_cap);
  }
  return 0;
}

bool adjacent(const GroupSpec& group, const Element& x, const Element& y) {
  const Element step = multiply(group, invert(group, x), y);
  const auto& gens = group.generators();
  return std::find(gens.begin(), gens.end(), step) != gens.end();
}

std::vector<std::size_t> center_growth_series(const GroupSpec& group, int max_radius,
                                              std::size_t memory_cap) {
  if (group.kind() != GroupKind::Heisenberg && group.kind() != GroupKind::IntegerLattice) {
    throw InvalidArgument("center_growth is defined for Heisenberg and lattice groups, not " + group.name());
  }
  const WordBall ball = word_ball(group, group.identity(), max_radius, memory_cap);
  std::vector<std::size_t> per_shell(static_cast<std::size_t>(max_radius) + 1, 0);
  for (std::size_t i = 0; i < ball.size(); ++i) {
    const Element& g = ball.members[i];
    const bool central = group.kind() == GroupKind::IntegerLattice || (g[0] == 0 && g[1] == 0);
    if (central) ++per_shell[static_cast<std::size_t>(ball.distances[i])];
  }
  std::vector<std::size_t> cumulative(per_shell.size());
  std::size_t running = 0;
  for (std::size_t k = 0; k < per_shell.size(); ++k) {
    running += per_shell[k];
    cumulative[k] = running;
  }
  return cumulative;
}

std::size_t center_growth(const GroupSpec& group, int radius, std::size_t memory_cap) {
  if (radius < 0) throw InvalidArgument("center_growth radius must be non-negative");
  return center_growth_series(group, radius, memory_cap).back();
}

}  // namespace fpp
