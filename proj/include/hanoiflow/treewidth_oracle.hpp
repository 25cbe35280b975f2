#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hanoiflow/small_graph.hpp"

namespace hanoiflow {

/// An exact treewidth value with a certifying elimination order. The order
/// proves the upper bound (replay it with replay_elimination_width); the
/// exhaustive flag records that the subset DP examined every prefix set,
/// which proves the lower bound.
struct TreewidthCertificate {
  int width = 0;
  std::vector<int> elimination_order;
  bool exhaustive = false;
};

namespace detail {

// Number of vertices outside S' u {v} that are adjacent to the connected
// component of v in G[S' u {v}]; the clique degree of v when eliminated
// right after the set S'.
inline int elimination_degree(const SmallGraph& g, std::uint64_t eliminated,
                              int v) {
  std::uint64_t comp = SmallGraph::bit(v);
  std::uint64_t frontier = comp;
  std::uint64_t nb = 0;
  while (frontier) {
    std::uint64_t f = frontier;
    while (f) {
      int u = std::countr_zero(f);
      f &= f - 1;
      nb |= g.adj[static_cast<std::size_t>(u)];
    }
    frontier = nb & eliminated & ~comp;
    comp |= frontier;
  }
  return std::popcount(nb & ~eliminated & ~SmallGraph::bit(v));
}

}  // namespace detail

/// Exact treewidth by dynamic programming over prefix sets of elimination
/// orders. Deliberately exponential: 2^|V| states. The default budget keeps
/// that cost explicit; raising it is an informed opt-in.
inline TreewidthCertificate exact_treewidth(const SmallGraph& g,
                                            int budget = 20) {
  if (g.n > budget)
    throw std::length_error("treewidth oracle: " + std::to_string(g.n) +
                            " vertices need 2^" + std::to_string(g.n) +
                            " DP states, budget is " + std::to_string(budget));
  if (g.n < 1) throw std::invalid_argument("treewidth oracle: empty graph");
  TreewidthCertificate cert;
  cert.exhaustive = true;
  if (g.n == 1) {
    cert.width = 0;
    cert.elimination_order = {0};
    return cert;
  }
  const std::uint64_t states = std::uint64_t{1} << g.n;
  std::vector<std::int8_t> dp(states, 0);
  dp[0] = -1;  // identity of max: the empty prefix forces nothing
  for (std::uint64_t s = 1; s < states; ++s) {
    int best = 127;
    std::uint64_t rest = s;
    while (rest) {
      int v = std::countr_zero(rest);
      rest &= rest - 1;
      std::uint64_t prev = s & ~SmallGraph::bit(v);
      int cand = std::max<int>(dp[prev], detail::elimination_degree(g, prev, v));
      if (cand < best) best = cand;
    }
    dp[s] = static_cast<std::int8_t>(best);
  }
  cert.width = dp[states - 1];
  cert.elimination_order.assign(static_cast<std::size_t>(g.n), -1);
  std::uint64_t s = states - 1;
  for (int pos = g.n - 1; pos >= 0; --pos) {
    std::uint64_t rest = s;
    while (rest) {
      int v = std::countr_zero(rest);
      rest &= rest - 1;
      std::uint64_t prev = s & ~SmallGraph::bit(v);
      int cand = std::max<int>(dp[prev], detail::elimination_degree(g, prev, v));
      if (cand == dp[s]) {
        cert.elimination_order[static_cast<std::size_t>(pos)] = v;
        s = prev;
        break;
      }
    }
  }
  return cert;
}

/// Independent certificate check: simulate the elimination order on an
/// explicit fill graph and report the largest clique degree encountered.
/// Equals the certified width for an optimal order.
inline int replay_elimination_width(const SmallGraph& g,
                                    const std::vector<int>& order) {
  if (static_cast<int>(order.size()) != g.n)
    throw std::invalid_argument("replay: order length != vertex count");
  std::vector<std::uint64_t> fill = g.adj;
  std::uint64_t eliminated = 0;
  int width = 0;
  for (int v : order) {
    std::uint64_t live = fill[static_cast<std::size_t>(v)] & ~eliminated;
    width = std::max(width, std::popcount(live));
    std::uint64_t rest = live;
    while (rest) {
      int a = std::countr_zero(rest);
      rest &= rest - 1;
      fill[static_cast<std::size_t>(a)] |= live & ~SmallGraph::bit(a);
    }
    eliminated |= SmallGraph::bit(v);
  }
  return width;
}

}  // namespace hanoiflow
