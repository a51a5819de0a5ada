#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <queue>
#include <unordered_map>
#include <vector>

#include "covplan/costs.hpp"

namespace covplan {

using Clock = std::chrono::steady_clock;

enum class SearchStatus { Found, NoPath, Timeout };

template <typename State>
struct Successor {
  State state;
  Cost cost = 0;
};

template <typename State>
struct SearchResult {
  SearchStatus status = SearchStatus::NoPath;
  std::vector<State> path;  // start ... goal
  Cost cost = 0;
  std::size_t expansions = 0;
  std::size_t generated = 0;  // successor edges produced
  std::size_t states = 0;     // nodes held in the search tables
  double wall_ms = 0.0;

  [[nodiscard]] bool found() const noexcept { return status == SearchStatus::Found; }
};

template <typename State>
struct SearchOptions {
  Clock::time_point deadline = Clock::time_point::max();
  std::size_t max_expansions = std::numeric_limits<std::size_t>::max();
  std::size_t max_nodes = std::numeric_limits<std::size_t>::max();  // memory guard, summed over tables
  Cost g_limit = std::numeric_limits<Cost>::max();  // successors with larger g are pruned
  std::function<void(const State&, Cost g)> on_expand;  // instrumentation
};

namespace detail {

inline constexpr std::uint32_t kNoParent = std::numeric_limits<std::uint32_t>::max();
// Deadline is polled once per this many expansions.
inline constexpr std::size_t kClockStride = 64;

[[nodiscard]] inline Cost inflate(double w, Cost h) {
  if (h >= std::numeric_limits<Cost>::max() / 4) return std::numeric_limits<Cost>::max() / 4;
  return static_cast<Cost>(std::floor(w * static_cast<double>(h)));
}

/// Node table plus lazy-deletion binary heap for one best-first search.
/// Ties on the key prefer larger g, then the smaller state under Less.
template <typename State, typename Hash, typename Less>
class BestFirstTable {
 public:
  struct Node {
    State state;
    Cost g;
    Cost h;
    std::uint32_t parent;
    bool closed;
  };

  explicit BestFirstTable(Less less = Less{}) : less_(less) {}
  BestFirstTable(const BestFirstTable&) = delete;
  BestFirstTable& operator=(const BestFirstTable&) = delete;

  std::uint32_t touch(const State& s, bool& fresh) {
    auto [it, inserted] = index_.try_emplace(s, static_cast<std::uint32_t>(nodes_.size()));
    fresh = inserted;
    if (inserted) nodes_.push_back(Node{s, std::numeric_limits<Cost>::max(), 0, kNoParent, false});
    return it->second;
  }

  void push(std::uint32_t idx, Cost key) { open_.push(Entry{key, nodes_[idx].g, idx}); }

  // Pops the best live entry; returns false when OPEN is empty.
  bool pop(std::uint32_t& idx) {
    while (!open_.empty()) {
      Entry e = open_.top();
      open_.pop();
      const Node& n = nodes_[e.idx];
      if (n.closed || e.g != n.g) continue;
      idx = e.idx;
      return true;
    }
    return false;
  }

  // Key of the best live entry, or max when OPEN is empty.
  Cost min_key() {
    while (!open_.empty()) {
      const Entry& e = open_.top();
      const Node& n = nodes_[e.idx];
      if (n.closed || e.g != n.g) {
        open_.pop();
        continue;
      }
      return e.key;
    }
    return std::numeric_limits<Cost>::max();
  }

  Node& node(std::uint32_t idx) { return nodes_[idx]; }
  [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }

  std::vector<State> backtrack(std::uint32_t idx) const {
    std::vector<State> path;
    for (std::uint32_t i = idx; i != kNoParent; i = nodes_[i].parent) path.push_back(nodes_[i].state);
    std::reverse(path.begin(), path.end());
    return path;
  }

 private:
  struct Entry {
    Cost key;
    Cost g;
    std::uint32_t idx;
  };
  struct Worse {
    const BestFirstTable* table;
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.key != b.key) return a.key > b.key;
      if (a.g != b.g) return a.g < b.g;
      return table->less_(table->nodes_[b.idx].state, table->nodes_[a.idx].state);
    }
  };

  Less less_;
  std::vector<Node> nodes_;
  std::unordered_map<State, std::uint32_t, Hash> index_;
  std::priority_queue<Entry, std::vector<Entry>, Worse> open_{Worse{this}};
};

}  // namespace detail

/// Weighted A* (w = 1: A*; h = 0: Dijkstra). Edge costs must be non-negative.
/// Closed states are never reopened. `expand(s, out)` appends successors.
template <typename State, typename Hash = std::hash<State>, typename Less = std::less<State>, typename GoalFn,
          typename ExpandFn, typename HeuristicFn>
SearchResult<State> astar(const State& start, GoalFn&& is_goal, ExpandFn&& expand, HeuristicFn&& h, double w = 1.0,
                          const SearchOptions<State>& options = {}, Less less = Less{}) {
  const auto t0 = Clock::now();
  SearchResult<State> result;
  detail::BestFirstTable<State, Hash, Less> table(less);
  bool fresh = false;
  const std::uint32_t s0 = table.touch(start, fresh);
  table.node(s0).g = 0;
  table.node(s0).h = h(start);
  table.push(s0, detail::inflate(w, table.node(s0).h));

  std::vector<Successor<State>> succ;
  std::uint32_t idx = 0;
  while (table.pop(idx)) {
    if (result.expansions % detail::kClockStride == 0 &&
        (Clock::now() >= options.deadline || result.expansions >= options.max_expansions ||
         table.size() >= options.max_nodes)) {
      result.status = SearchStatus::Timeout;
      break;
    }
    auto& n = table.node(idx);
    if (is_goal(n.state)) {
      result.status = SearchStatus::Found;
      result.cost = n.g;
      result.path = table.backtrack(idx);
      break;
    }
    n.closed = true;
    ++result.expansions;
    if (options.on_expand) options.on_expand(n.state, n.g);
    const Cost g = n.g;
    const State current = n.state;
    succ.clear();
    expand(current, succ);
    for (const auto& s : succ) {
      ++result.generated;
      const std::uint32_t j = table.touch(s.state, fresh);
      auto& m = table.node(j);
      if (m.closed) continue;
      if (fresh) m.h = h(s.state);
      if (g + s.cost < m.g && g + s.cost <= options.g_limit) {
        m.g = g + s.cost;
        m.parent = idx;
        if (m.h < std::numeric_limits<Cost>::max() / 4) table.push(j, m.g + detail::inflate(w, m.h));
      }
    }
  }
  result.states = table.size();
  result.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  return result;
}

/// Independent multi-heuristic A*: an anchor queue keyed g + w1*h_anchor and
/// one queue per extra heuristic keyed g + w1*h_i, each with its own g-values.
/// Queues are visited round-robin; queue i is expanded only while its min key
/// is within w2 times the anchor's. Returned cost <= w1*w2 * optimal when the
/// anchor heuristic is consistent.
template <typename State, typename Hash = std::hash<State>, typename Less = std::less<State>, typename GoalFn,
          typename ExpandFn, typename HeuristicFn>
SearchResult<State> mhastar(const State& start, GoalFn&& is_goal, ExpandFn&& expand, HeuristicFn&& h_anchor,
                            const std::vector<std::function<Cost(const State&)>>& h_extra, double w1, double w2,
                            const SearchOptions<State>& options = {}, Less less = Less{}) {
  const auto t0 = Clock::now();
  SearchResult<State> result;
  const std::size_t nq = 1 + h_extra.size();
  using Table = detail::BestFirstTable<State, Hash, Less>;
  std::vector<std::unique_ptr<Table>> tables;
  for (std::size_t q = 0; q < nq; ++q) tables.push_back(std::make_unique<Table>(less));
  auto heuristic = [&](std::size_t q, const State& s) -> Cost { return q == 0 ? h_anchor(s) : h_extra[q - 1](s); };

  // Best generated goal per queue.
  std::vector<std::uint32_t> goal_idx(nq, detail::kNoParent);
  std::vector<Cost> goal_g(nq, std::numeric_limits<Cost>::max());

  bool fresh = false;
  for (std::size_t q = 0; q < nq; ++q) {
    const std::uint32_t s0 = tables[q]->touch(start, fresh);
    auto& n = tables[q]->node(s0);
    n.g = 0;
    n.h = heuristic(q, start);
    if (is_goal(start)) {
      goal_idx[q] = s0;
      goal_g[q] = 0;
    }
    if (n.h < std::numeric_limits<Cost>::max() / 4) tables[q]->push(s0, detail::inflate(w1, n.h));
  }

  std::vector<Successor<State>> succ;
  auto finish = [&](std::size_t q) {
    result.status = SearchStatus::Found;
    result.cost = goal_g[q];
    result.path = tables[q]->backtrack(goal_idx[q]);
  };

  auto expand_from = [&](std::size_t q) {
    auto& table = *tables[q];
    std::uint32_t idx = 0;
    if (!table.pop(idx)) return;
    auto& n = table.node(idx);
    n.closed = true;
    ++result.expansions;
    if (options.on_expand) options.on_expand(n.state, n.g);
    const Cost g = n.g;
    const State current = n.state;
    succ.clear();
    expand(current, succ);
    for (const auto& s : succ) {
      ++result.generated;
      const std::uint32_t j = table.touch(s.state, fresh);
      auto& m = table.node(j);
      if (m.closed) continue;
      if (fresh) m.h = heuristic(q, s.state);
      if (g + s.cost < m.g && g + s.cost <= options.g_limit) {
        m.g = g + s.cost;
        m.parent = idx;
        if (is_goal(s.state) && m.g < goal_g[q]) {
          goal_g[q] = m.g;
          goal_idx[q] = j;
        }
        if (m.h < std::numeric_limits<Cost>::max() / 4) table.push(j, m.g + detail::inflate(w1, m.h));
      }
    }
  };

  auto nodes = [&] {
    std::size_t n = 0;
    for (const auto& t : tables) n += t->size();
    return n;
  };
  std::size_t rr = 0;
  while (true) {
    if (result.expansions % detail::kClockStride == 0 &&
        (Clock::now() >= options.deadline || result.expansions >= options.max_expansions || nodes() >= options.max_nodes)) {
      result.status = SearchStatus::Timeout;
      break;
    }
    const Cost anchor_key = tables[0]->min_key();
    if (anchor_key == std::numeric_limits<Cost>::max()) {
      if (goal_g[0] != std::numeric_limits<Cost>::max()) finish(0);
      break;
    }
    std::size_t q = nq > 1 ? 1 + (rr++ % (nq - 1)) : 0;
    if (q != 0) {
      const Cost key = tables[q]->min_key();
      const double bound = w2 * static_cast<double>(anchor_key);
      if (key == std::numeric_limits<Cost>::max() || static_cast<double>(key) > bound) q = 0;
      else if (static_cast<double>(goal_g[q]) <= static_cast<double>(key)) {
        finish(q);
        break;
      }
    }
    if (q == 0 && goal_g[0] <= anchor_key) {
      finish(0);
      break;
    }
    expand_from(q);
  }
  result.states = nodes();
  result.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  return result;
}

}  // namespace covplan
