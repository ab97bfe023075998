#include "fpp/passage.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>

#include <absl/container/flat_hash_set.h>

#include "fpp/error.hpp"

namespace fpp {

namespace {

constexpr std::uint32_t kNoParent = std::numeric_limits<std::uint32_t>::max();

struct Node {
  Element elem;
  double g;
  std::uint32_t parent;
  bool settled;
};

struct Entry {
  double key;
  std::uint32_t node;
};

// Shared best-first loop. `heuristic(v)` must be consistent; `settle(i, key)`
// is called on every pop and returns true to stop.
class Search {
 public:
  Search(const WeightAssignment& omega, const Element& origin, const SearchLimits& limits)
      : omega_(omega), group_(omega.group()), limits_(limits) {
    if (!is_member(group_, origin)) {
      throw InvalidArgument("search origin is not an element of " + group_.name());
    }
    nodes_.push_back({origin, 0.0, kNoParent, false});
    index_.emplace(origin, 0);
  }

  template <typename Heuristic, typename Settle>
  void run(Heuristic heuristic, Settle settle) {
    auto later = [this](const Entry& p, const Entry& q) {
      if (p.key != q.key) return p.key > q.key;
      return nodes_[p.node].elem > nodes_[q.node].elem;
    };
    heap_.push_back({heuristic(nodes_[0].elem), 0});
    KeyBytes here;
    KeyBytes there;
    while (!heap_.empty()) {
      std::pop_heap(heap_.begin(), heap_.end(), later);
      const Entry top = heap_.back();
      heap_.pop_back();
      if (nodes_[top.node].settled) continue;
      nodes_[top.node].settled = true;
      ++settled_;
      last_key_ = top.key;
      if (settle(top.node, top.key)) return;
      if (settled_ >= limits_.settled_budget) {
        throw BudgetExceeded("search exceeded settled-vertex budget of " +
                                 std::to_string(limits_.settled_budget) + "; best bound " +
                                 std::to_string(top.key),
                             limits_.settled_budget, top.key);
      }
      const Element current = nodes_[top.node].elem;
      const double g = nodes_[top.node].g;
      here.clear();
      encode_into(group_, current, here);
      for (const auto& s : group_.generators()) {
        Element next = multiply(group_, current, s);
        auto [it, inserted] = index_.try_emplace(next, static_cast<std::uint32_t>(nodes_.size()));
        if (!inserted && nodes_[it->second].settled) continue;
        there.clear();
        encode_into(group_, next, there);
        const double candidate = g + omega_.edge_weight_bytes(here, there);
        std::uint32_t id = it->second;
        if (inserted) {
          nodes_.push_back({std::move(next), candidate, top.node, false});
        } else if (candidate < nodes_[id].g) {
          nodes_[id].g = candidate;
          nodes_[id].parent = top.node;
        } else {
          continue;
        }
        heap_.push_back({candidate + heuristic(nodes_[id].elem), id});
        std::push_heap(heap_.begin(), heap_.end(), later);
      }
    }
  }

  const Node& node(std::uint32_t i) const { return nodes_[i]; }
  std::size_t settled() const noexcept { return settled_; }
  const absl::flat_hash_map<Element, std::uint32_t>& index() const { return index_; }

  std::vector<Element> path_to(std::uint32_t i) const {
    std::vector<Element> path;
    for (std::uint32_t k = i; k != kNoParent; k = nodes_[k].parent) path.push_back(nodes_[k].elem);
    std::reverse(path.begin(), path.end());
    return path;
  }

 private:
  const WeightAssignment& omega_;
  const GroupSpec& group_;
  SearchLimits limits_;
  std::vector<Node> nodes_;
  absl::flat_hash_map<Element, std::uint32_t> index_;
  std::vector<Entry> heap_;
  std::size_t settled_ = 0;
  double last_key_ = 0.0;
};

}  // namespace

PassageTimeResult passage_time(const WeightAssignment& omega, const Element& x, const Element& y,
                               const SearchLimits& limits) {
  const GroupSpec& group = omega.group();
  if (!is_member(group, y)) throw InvalidArgument("passage_time target is not an element of " + group.name());
  if (x == y) {
    if (!is_member(group, x)) throw InvalidArgument("passage_time source is not an element of " + group.name());
    return {};
  }
  const double a = omega.min_weight();
  Search search(omega, x, limits);
  PassageTimeResult result;
  search.run(
      [&](const Element& v) { return a * static_cast<double>(word_distance_lower_bound(group, v, y)); },
      [&](std::uint32_t i, double) {
        if (search.node(i).elem != y) return false;
        result.time = search.node(i).g;
        result.path = search.path_to(i);
        return true;
      });
  result.settled_count = search.settled();
  return result;
}

double FppBall::time_of(const Element& g) const {
  auto it = index_.find(g);
  return it == index_.end() ? -1.0 : times[it->second];
}

FppBall fpp_ball(const WeightAssignment& omega, const Element& origin, double horizon,
                 const SearchLimits& limits) {
  if (!(horizon >= 0.0)) throw InvalidArgument("fpp_ball horizon must be non-negative");
  FppBall ball;
  ball.origin = origin;
  ball.horizon = horizon;
  Search search(omega, origin, limits);
  search.run([](const Element&) { return 0.0; },
             [&](std::uint32_t i, double key) {
               if (key > horizon) return true;
               ball.index_.emplace(search.node(i).elem, static_cast<std::uint32_t>(ball.members.size()));
               ball.members.push_back(search.node(i).elem);
               ball.times.push_back(key);
               return false;
             });
  ball.settled_count = search.settled();
  return ball;
}

std::vector<double> passage_times_from(const WeightAssignment& omega, const Element& origin,
                                       std::span<const Element> targets, const SearchLimits& limits) {
  const GroupSpec& group = omega.group();
  absl::flat_hash_set<Element> pending;
  for (const auto& t : targets) {
    if (!is_member(group, t)) throw InvalidArgument("target is not an element of " + group.name());
    pending.insert(t);
  }
  std::vector<double> out(targets.size(), 0.0);
  if (pending.empty()) return out;
  absl::flat_hash_map<Element, double> found;
  Search search(omega, origin, limits);
  search.run([](const Element&) { return 0.0; },
             [&](std::uint32_t i, double key) {
               const Element& e = search.node(i).elem;
               if (pending.erase(e) > 0) found.emplace(e, key);
               return pending.empty();
             });
  for (std::size_t k = 0; k < targets.size(); ++k) out[k] = found.at(targets[k]);
  return out;
}

double path_weight(const WeightAssignment& omega, std::span<const Element> path) {
  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) total += omega.edge_weight(path[i - 1], path[i]);
  return total;
}

}  // namespace fpp
