#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <future>
#include <stdexcept>
#include <string>
#include <vector>

#include "hanoiflow/rational.hpp"
#include "hanoiflow/small_graph.hpp"

namespace hanoiflow {

/// An explicit cut certifying an upper bound on expansion; the oracle
/// returns the optimal one, ties broken toward the lexicographically
/// smallest vertex set.
struct CutWitness {
  std::vector<int> vertices;  // ascending
  long long boundary = 0;     // |dS| (edges) or |d_v S| (vertices)
  Rational ratio{0};
};

struct ExpansionResult {
  Rational value{0};
  CutWitness witness;
};

namespace detail {

struct BestCut {
  bool have = false;
  long long num = 0;  // boundary
  int den = 0;        // |S|
  std::uint64_t set = 0;

  // Lexicographic order on ascending vertex lists: the owner of the lowest
  // bit of the symmetric difference is the smaller set.
  static bool lex_less(std::uint64_t a, std::uint64_t b) {
    std::uint64_t d = a ^ b;
    if (d == 0) return false;
    return (a & (d & ~(d - 1))) != 0;
  }

  void offer(long long num2, int den2, std::uint64_t set2) {
    if (!have) {
      have = true;
      num = num2;
      den = den2;
      set = set2;
      return;
    }
    __int128 lhs = static_cast<__int128>(num2) * den;
    __int128 rhs = static_cast<__int128>(num) * den2;
    if (lhs < rhs || (lhs == rhs && lex_less(set2, set))) {
      num = num2;
      den = den2;
      set = set2;
    }
  }

  void merge(const BestCut& o) {
    if (o.have) offer(o.num, o.den, o.set);
  }

  // True when no completion of a partial set can beat or tie this ratio:
  // adding one vertex changes the boundary by at least -max_shrink, and a
  // proper nonempty subset of a connected graph has boundary at least 1.
  bool unbeatable_from(long long bdry, int size, int cap,
                       int max_shrink) const {
    if (!have) return false;
    for (int t = 1; size + t <= cap; ++t) {
      long long nb = bdry - static_cast<long long>(t) * max_shrink;
      if (nb < 1) nb = 1;
      __int128 lhs = static_cast<__int128>(nb) * den;
      __int128 rhs = static_cast<__int128>(num) * (size + t);
      if (lhs <= rhs) return false;
    }
    return true;
  }
};

inline ExpansionResult to_result(const BestCut& best) {
  ExpansionResult r;
  r.value = Rational(best.num, best.den);
  r.witness.boundary = best.num;
  r.witness.ratio = r.value;
  std::uint64_t s = best.set;
  while (s) {
    r.witness.vertices.push_back(std::countr_zero(s));
    s &= s - 1;
  }
  return r;
}

// Enumerates every connected subset whose minimum vertex is `root`,
// branching on the lowest candidate: exclude it permanently or include it
// and extend the frontier. kEdgeBoundary selects edge vs vertex boundary.
template <bool kEdgeBoundary>
void enumerate_connected(const SmallGraph& g, int root, int cap,
                         BestCut& best) {
  const std::uint64_t above =
      root + 1 >= 64 ? 0 : ~((std::uint64_t{1} << (root + 1)) - 1);
  const int max_shrink = kEdgeBoundary ? g.max_degree() : 1;

  struct Frame {
    std::uint64_t set;
    std::uint64_t ext;
    std::uint64_t banned;
    std::uint64_t nbhd;
    long long bdry;
    int size;
  };
  std::vector<Frame> stack;
  {
    Frame f0;
    f0.set = SmallGraph::bit(root);
    f0.ext = g.adj[static_cast<std::size_t>(root)] & above;
    f0.banned = 0;
    f0.nbhd = g.adj[static_cast<std::size_t>(root)];
    f0.bdry = kEdgeBoundary
                  ? g.degree(root)
                  : std::popcount(f0.nbhd & ~f0.set);
    f0.size = 1;
    best.offer(f0.bdry, 1, f0.set);
    stack.push_back(f0);
  }
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    if (f.size >= cap) continue;
    if (f.ext == 0) continue;
    if (best.unbeatable_from(f.bdry, f.size, cap, max_shrink)) continue;
    int u = std::countr_zero(f.ext);
    std::uint64_t ubit = SmallGraph::bit(u);
    // Exclude u.
    Frame skip = f;
    skip.ext &= ~ubit;
    skip.banned |= ubit;
    stack.push_back(skip);
    // Include u.
    Frame take = f;
    take.set |= ubit;
    take.size += 1;
    const std::uint64_t uadj = g.adj[static_cast<std::size_t>(u)];
    take.nbhd = f.nbhd | uadj;
    if (kEdgeBoundary)
      take.bdry = f.bdry + g.degree(u) -
                  2 * std::popcount(uadj & f.set);
    else
      take.bdry = std::popcount(take.nbhd & ~take.set);
    take.ext = (f.ext & ~ubit) | (uadj & above & ~take.set & ~f.banned);
    best.offer(take.bdry, take.size, take.set);
    stack.push_back(take);
  }
}

template <bool kEdgeBoundary>
ExpansionResult expansion_connected(const SmallGraph& g, int budget,
                                    int workers) {
  if (g.n > budget)
    throw std::length_error("expansion oracle: " + std::to_string(g.n) +
                            " vertices exceed budget " +
                            std::to_string(budget));
  if (g.n < 2 || !g.connected())
    throw std::invalid_argument(
        "expansion oracle: graph must be connected with >= 2 vertices");
  int cap = g.n / 2;
  if (workers < 1) workers = 1;
  workers = std::min(workers, g.n);
  BestCut best;
  if (workers == 1) {
    for (int r = 0; r < g.n; ++r)
      enumerate_connected<kEdgeBoundary>(g, r, cap, best);
  } else {
    std::vector<std::future<BestCut>> tasks;
    for (int w = 0; w < workers; ++w) {
      tasks.push_back(std::async(std::launch::async, [&g, cap, w, workers]() {
        BestCut local;
        for (int r = w; r < g.n; r += workers)
          enumerate_connected<kEdgeBoundary>(g, r, cap, local);
        return local;
      }));
    }
    for (auto& t : tasks) best.merge(t.get());
  }
  return to_result(best);
}

}  // namespace detail

/// Exact edge expansion h(G) = min |dS|/|S| over |S| <= |V|/2. Only
/// connected S are enumerated: the best component of any minimizer does at
/// least as well, so the restriction is lossless for edge boundaries.
inline ExpansionResult exact_edge_expansion(const SmallGraph& g,
                                            int budget = 30, int workers = 1) {
  return detail::expansion_connected<true>(g, budget, workers);
}

/// Connected-restricted vertex expansion. Not sound as an oracle in
/// general (components may share outside neighbors); exists to be compared
/// against the exhaustive enumeration.
inline ExpansionResult vertex_expansion_connected_only(const SmallGraph& g,
                                                       int budget = 30,
                                                       int workers = 1) {
  return detail::expansion_connected<false>(g, budget, workers);
}

/// Exact vertex expansion h_v(G) by exhaustive enumeration of all subsets
/// with |S| <= |V|/2, with half-split neighborhood tables.
inline ExpansionResult exact_vertex_expansion(const SmallGraph& g,
                                              int budget = 30) {
  if (g.n > budget)
    throw std::length_error("vertex expansion oracle: " +
                            std::to_string(g.n) + " vertices exceed budget " +
                            std::to_string(budget));
  if (g.n < 2 || !g.connected())
    throw std::invalid_argument(
        "expansion oracle: graph must be connected with >= 2 vertices");
  int lo = g.n / 2;
  int hi = g.n - lo;
  std::vector<std::uint64_t> tab_lo(std::size_t{1} << lo, 0);
  std::vector<std::uint64_t> tab_hi(std::size_t{1} << hi, 0);
  for (std::uint64_t s = 1; s < tab_lo.size(); ++s) {
    int v = std::countr_zero(s);
    tab_lo[s] = tab_lo[s & (s - 1)] | g.adj[static_cast<std::size_t>(v)];
  }
  for (std::uint64_t s = 1; s < tab_hi.size(); ++s) {
    int v = std::countr_zero(s);
    tab_hi[s] =
        tab_hi[s & (s - 1)] | g.adj[static_cast<std::size_t>(v + lo)];
  }
  const std::uint64_t lo_mask = (std::uint64_t{1} << lo) - 1;
  const int cap = g.n / 2;
  detail::BestCut best;
  const std::uint64_t full = g.full_mask();
  for (std::uint64_t s = 1; s <= full; ++s) {
    int size = std::popcount(s);
    if (size > cap) continue;
    std::uint64_t nb = tab_lo[s & lo_mask] | tab_hi[s >> lo];
    best.offer(std::popcount(nb & ~s), size, s);
  }
  return detail::to_result(best);
}

/// Exhaustive edge expansion over all subsets; the independent cross-check
/// for the connected-restricted oracle. Kept to small budgets on purpose.
inline ExpansionResult edge_expansion_all_subsets(const SmallGraph& g,
                                                  int budget = 20) {
  if (g.n > budget)
    throw std::length_error("exhaustive edge expansion: " +
                            std::to_string(g.n) + " vertices exceed budget " +
                            std::to_string(budget));
  if (g.n < 2 || !g.connected())
    throw std::invalid_argument(
        "expansion oracle: graph must be connected with >= 2 vertices");
  const int cap = g.n / 2;
  detail::BestCut best;
  const std::uint64_t full = g.full_mask();
  for (std::uint64_t s = 1; s <= full; ++s) {
    int size = std::popcount(s);
    if (size > cap) continue;
    long long bdry = 0;
    std::uint64_t rest = s;
    while (rest) {
      int v = std::countr_zero(rest);
      rest &= rest - 1;
      bdry += std::popcount(g.adj[static_cast<std::size_t>(v)] & ~s);
    }
    best.offer(bdry, size, s);
  }
  return detail::to_result(best);
}

/// Upper bound from the one-child cut: S = one H_p^{n-1} copy has
/// |S| = p^{n-1} and |dS| = (p-1)(p-2)^{n-1}.
inline Rational witness_cut_bound(int p, int n) {
  if (p < 3 || n < 1) throw std::invalid_argument("witness_cut_bound: p>=3, n>=1");
  long long num = p - 1;
  long long den = 1;
  for (int t = 0; t < n - 1; ++t) {
    num *= p - 2;
    den *= p;
  }
  return Rational(num, den);
}

/// Checks h_v <= h <= D*h_v <= 3D(t+1)/|V| with exact values; returns the
/// violated inequalities (empty means the chain holds).
inline std::vector<std::string> check_relations(const Rational& h,
                                                const Rational& h_v,
                                                long long max_degree,
                                                long long treewidth,
                                                long long vertex_count) {
  std::vector<std::string> bad;
  Rational dhv = Rational(max_degree) * h_v;
  Rational sep = Rational(3 * max_degree * (treewidth + 1), vertex_count);
  if (!(h_v <= h)) bad.push_back("h_v <= h");
  if (!(h <= dhv)) bad.push_back("h <= max_degree * h_v");
  if (!(dhv <= sep)) bad.push_back("max_degree * h_v <= 3*max_degree*(t+1)/|V|");
  return bad;
}

}  // namespace hanoiflow
