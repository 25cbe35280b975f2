#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace hanoiflow {

// Vertices are configuration indices under the little-endian base-p codec:
// disc 1 (the smallest) is the least significant digit. This keying is a
// stable contract; emitted flows and cuts are reproducible bit for bit.
using Vertex = std::uint64_t;

inline std::uint64_t ipow(std::uint64_t base, int exp) {
  std::uint64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > std::numeric_limits<std::uint64_t>::max() / base)
      throw std::overflow_error("ipow: overflow");
    r *= base;
  }
  return r;
}

// A puzzle state: pegs[i] is the peg label (1..p) holding disc i+1.
// Disc order on a peg is forced by size, so the tuple is the whole state.
struct Configuration {
  std::vector<std::uint8_t> pegs;

  int discs() const { return static_cast<int>(pegs.size()); }

  bool operator==(const Configuration& o) const = default;
};

inline void check_configuration(const Configuration& c, int p) {
  for (std::size_t i = 0; i < c.pegs.size(); ++i) {
    if (c.pegs[i] < 1 || c.pegs[i] > p)
      throw std::invalid_argument("invalid configuration: disc " +
                                  std::to_string(i + 1) + " on peg " +
                                  std::to_string(c.pegs[i]) +
                                  ", want 1.." + std::to_string(p));
  }
}

inline Vertex config_to_index(const Configuration& c, int p) {
  check_configuration(c, p);
  Vertex v = 0;
  for (int i = c.discs() - 1; i >= 0; --i)
    v = v * p + (c.pegs[static_cast<std::size_t>(i)] - 1);
  return v;
}

inline Configuration index_to_config(Vertex v, int p, int n) {
  Configuration c;
  c.pegs.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    c.pegs[static_cast<std::size_t>(i)] =
        static_cast<std::uint8_t>(v % static_cast<Vertex>(p) + 1);
    v /= static_cast<Vertex>(p);
  }
  return c;
}

/// The Hanoi graph H_p^n: one vertex per configuration of n discs on p pegs,
/// one edge per legal single-disc move. Adjacency is generated on demand; an
/// optional cached mode materializes adjacency lists for small graphs.
class HanoiGraph {
 public:
  static constexpr std::uint64_t kDefaultCacheBudget = 1'000'000;

  HanoiGraph(int pegs, int discs) : p_(pegs), n_(discs) {
    if (pegs < 3) throw std::invalid_argument("HanoiGraph: need p >= 3");
    if (discs < 1) throw std::invalid_argument("HanoiGraph: need n >= 1");
    vertex_count_ = ipow(static_cast<std::uint64_t>(pegs), discs);
    pow_.resize(static_cast<std::size_t>(discs) + 1);
    pow_[0] = 1;
    for (int i = 1; i <= discs; ++i) pow_[static_cast<std::size_t>(i)] = pow_[static_cast<std::size_t>(i - 1)] * static_cast<Vertex>(pegs);
  }

  int pegs() const { return p_; }
  int discs() const { return n_; }
  Vertex vertex_count() const { return vertex_count_; }

  std::vector<Vertex> neighbors(Vertex v) const {
    if (!cache_.empty()) return cache_[static_cast<std::size_t>(v)];
    return compute_neighbors(v);
  }

  // Every unordered peg pair with at least one nonempty peg admits exactly
  // one legal move, so deg(v) = C(p,2) - C(e,2) with e = empty peg count.
  int degree(Vertex v) const {
    int e = empty_pegs(v);
    return p_ * (p_ - 1) / 2 - e * (e - 1) / 2;
  }

  int empty_pegs(Vertex v) const {
    check_vertex(v);
    bool used[kMaxPegs] = {};
    for (int i = 0; i < n_; ++i) {
      used[v % static_cast<Vertex>(p_)] = true;
      v /= static_cast<Vertex>(p_);
    }
    int e = 0;
    for (int a = 0; a < p_; ++a)
      if (!used[a]) ++e;
    return e;
  }

  // The largest degree over all vertices: at least max(p-n, 0) pegs are
  // always empty.
  int max_degree() const {
    int e = p_ - n_ > 0 ? p_ - n_ : 0;
    return p_ * (p_ - 1) / 2 - e * (e - 1) / 2;
  }

  bool adjacent(Vertex u, Vertex v) const {
    check_vertex(u);
    check_vertex(v);
    if (u == v) return false;
    int moved = -1;
    int peg_u = -1, peg_v = -1;
    Vertex a = u, b = v;
    for (int i = 0; i < n_; ++i) {
      int da = static_cast<int>(a % static_cast<Vertex>(p_));
      int db = static_cast<int>(b % static_cast<Vertex>(p_));
      if (da != db) {
        if (moved >= 0) return false;  // more than one disc moved
        moved = i;
        peg_u = da;
        peg_v = db;
      }
      a /= static_cast<Vertex>(p_);
      b /= static_cast<Vertex>(p_);
    }
    if (moved < 0) return false;
    // The moved disc must be topmost on both its source and target peg:
    // no smaller disc may sit on either.
    a = u;
    for (int i = 0; i < moved; ++i) {
      int d = static_cast<int>(a % static_cast<Vertex>(p_));
      if (d == peg_u || d == peg_v) return false;
      a /= static_cast<Vertex>(p_);
    }
    return true;
  }

  // Closed form E_n = p * E_{n-1} + C(p,2) * (p-2)^{n-1}; brute-force
  // enumeration is the test oracle for this.
  std::uint64_t edge_count() const {
    std::uint64_t e = static_cast<std::uint64_t>(p_) * (p_ - 1) / 2;
    std::uint64_t facet = 1;
    for (int m = 2; m <= n_; ++m) {
      facet *= static_cast<std::uint64_t>(p_ - 2);
      e = e * static_cast<std::uint64_t>(p_) +
          static_cast<std::uint64_t>(p_) * (p_ - 1) / 2 * facet;
    }
    return e;
  }

  void cache_adjacency(std::uint64_t vertex_budget = kDefaultCacheBudget) {
    if (vertex_count_ > vertex_budget)
      throw std::length_error("cache_adjacency: " +
                              std::to_string(vertex_count_) +
                              " vertices exceed budget " +
                              std::to_string(vertex_budget));
    cache_.resize(static_cast<std::size_t>(vertex_count_));
    for (Vertex v = 0; v < vertex_count_; ++v)
      cache_[static_cast<std::size_t>(v)] = compute_neighbors(v);
  }

  bool adjacency_cached() const { return !cache_.empty(); }

  Vertex power(int k) const { return pow_[static_cast<std::size_t>(k)]; }

 private:
  static constexpr int kMaxPegs = 255;

  void check_vertex(Vertex v) const {
    if (v >= vertex_count_)
      throw std::out_of_range("vertex " + std::to_string(v) +
                              " out of range for H_" + std::to_string(p_) +
                              "^" + std::to_string(n_));
  }

  std::vector<Vertex> compute_neighbors(Vertex v) const {
    check_vertex(v);
    // top[a] = smallest disc on peg a (0-based), or -1 when empty.
    int top[kMaxPegs];
    for (int a = 0; a < p_; ++a) top[a] = -1;
    Vertex w = v;
    for (int i = 0; i < n_; ++i) {
      int d = static_cast<int>(w % static_cast<Vertex>(p_));
      if (top[d] < 0) top[d] = i;
      w /= static_cast<Vertex>(p_);
    }
    std::vector<Vertex> out;
    out.reserve(static_cast<std::size_t>(p_ * (p_ - 1) / 2));
    for (int a = 0; a < p_; ++a) {
      for (int b = a + 1; b < p_; ++b) {
        int ta = top[a], tb = top[b];
        if (ta < 0 && tb < 0) continue;
        int disc, from, to;
        if (ta < 0 || (tb >= 0 && tb < ta)) {
          disc = tb;
          from = b;
          to = a;
        } else {
          disc = ta;
          from = a;
          to = b;
        }
        out.push_back(v + static_cast<Vertex>(to - from + p_) * pow_[static_cast<std::size_t>(disc)] -
                      static_cast<Vertex>(p_) * pow_[static_cast<std::size_t>(disc)]);
      }
    }
    return out;
  }

  int p_;
  int n_;
  Vertex vertex_count_;
  std::vector<Vertex> pow_;
  std::vector<std::vector<Vertex>> cache_;
};

}  // namespace hanoiflow
