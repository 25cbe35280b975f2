#pragma once

#include <bit>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "hanoiflow/hanoi_graph.hpp"

namespace hanoiflow {

/// Dense bitmask adjacency for the brute-force oracles; capped at 64
/// vertices, far above any budget the oracles accept.
struct SmallGraph {
  int n = 0;
  std::vector<std::uint64_t> adj;

  explicit SmallGraph(int vertices = 0) : n(vertices) {
    if (vertices < 0 || vertices > 64)
      throw std::invalid_argument("SmallGraph: need 0..64 vertices");
    adj.assign(static_cast<std::size_t>(vertices), 0);
  }

  static std::uint64_t bit(int v) { return std::uint64_t{1} << v; }

  void add_edge(int u, int v) {
    if (u == v || u < 0 || v < 0 || u >= n || v >= n)
      throw std::invalid_argument("SmallGraph: bad edge");
    adj[static_cast<std::size_t>(u)] |= bit(v);
    adj[static_cast<std::size_t>(v)] |= bit(u);
  }

  bool is_edge(int u, int v) const {
    return (adj[static_cast<std::size_t>(u)] & bit(v)) != 0;
  }

  int degree(int v) const {
    return std::popcount(adj[static_cast<std::size_t>(v)]);
  }

  int max_degree() const {
    int d = 0;
    for (int v = 0; v < n; ++v) d = std::max(d, degree(v));
    return d;
  }

  long long edge_count() const {
    long long twice = 0;
    for (int v = 0; v < n; ++v) twice += degree(v);
    return twice / 2;
  }

  std::uint64_t full_mask() const {
    return n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  }

  bool connected() const {
    if (n == 0) return false;
    std::uint64_t seen = 1, frontier = 1;
    while (frontier) {
      std::uint64_t next = 0;
      std::uint64_t f = frontier;
      while (f) {
        int v = std::countr_zero(f);
        f &= f - 1;
        next |= adj[static_cast<std::size_t>(v)];
      }
      frontier = next & ~seen;
      seen |= next;
    }
    return seen == full_mask();
  }

  static SmallGraph clique(int k) {
    SmallGraph g(k);
    for (int u = 0; u < k; ++u)
      for (int v = u + 1; v < k; ++v) g.add_edge(u, v);
    return g;
  }

  /// Vertex 0 is the hub.
  static SmallGraph star(int leaves) {
    SmallGraph g(leaves + 1);
    for (int v = 1; v <= leaves; ++v) g.add_edge(0, v);
    return g;
  }

  static SmallGraph path(int k) {
    SmallGraph g(k);
    for (int v = 0; v + 1 < k; ++v) g.add_edge(v, v + 1);
    return g;
  }

  static SmallGraph from_hanoi(const HanoiGraph& h) {
    if (h.vertex_count() > 64)
      throw std::length_error("SmallGraph: H_" + std::to_string(h.pegs()) +
                              "^" + std::to_string(h.discs()) + " has " +
                              std::to_string(h.vertex_count()) +
                              " vertices, oracle cap is 64");
    SmallGraph g(static_cast<int>(h.vertex_count()));
    for (Vertex v = 0; v < h.vertex_count(); ++v)
      for (Vertex u : h.neighbors(v))
        if (u > v) g.add_edge(static_cast<int>(v), static_cast<int>(u));
    return g;
  }

  /// Erdos-Renyi draw, resampled until connected.
  static SmallGraph random_connected(int vertices, double edge_prob,
                                     std::mt19937_64& rng) {
    std::bernoulli_distribution coin(edge_prob);
    for (;;) {
      SmallGraph g(vertices);
      for (int u = 0; u < vertices; ++u)
        for (int v = u + 1; v < vertices; ++v)
          if (coin(rng)) g.add_edge(u, v);
      if (g.connected()) return g;
    }
  }

  /// Uniform random attachment tree.
  static SmallGraph random_tree(int vertices, std::mt19937_64& rng) {
    SmallGraph g(vertices);
    for (int v = 1; v < vertices; ++v) {
      std::uniform_int_distribution<int> pick(0, v - 1);
      g.add_edge(pick(rng), v);
    }
    return g;
  }
};

}  // namespace hanoiflow
