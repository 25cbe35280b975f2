#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hanoiflow/hanoi_graph.hpp"

namespace hanoiflow {

/// A copy of H_p^m inside H_p^n obtained by pinning the largest n-m discs.
/// The handle stores only the index offset contributed by the pinned
/// suffix, so nested handles compose for free and vertex sets are never
/// copied. Local vertex u of the copy maps to global index base + u.
class SubgraphHandle {
 public:
  static SubgraphHandle whole(const HanoiGraph& g) {
    return SubgraphHandle(g.pegs(), g.discs(), g.discs(), 0);
  }

  int pegs() const { return p_; }
  int graph_discs() const { return graph_n_; }
  // Number of free (unpinned) discs; the handle is isomorphic to H_p^m.
  int free_discs() const { return m_; }
  Vertex base() const { return base_; }
  Vertex vertex_count() const { return ipow(static_cast<std::uint64_t>(p_), m_); }

  Vertex to_global(Vertex local) const { return base_ + local; }
  bool contains(Vertex global) const {
    return global >= base_ && global < base_ + vertex_count();
  }

  /// Splits into the p handles pinning the largest free disc on each peg.
  /// Handle k (peg labels 1..p) covers the configurations placing that disc
  /// on peg k; together they partition this handle's vertex set.
  std::vector<SubgraphHandle> partition_by_largest() const {
    if (m_ < 1)
      throw std::logic_error("partition_by_largest: zero free discs");
    std::vector<SubgraphHandle> parts;
    parts.reserve(static_cast<std::size_t>(p_));
    for (int peg = 1; peg <= p_; ++peg) parts.push_back(child(peg));
    return parts;
  }

  SubgraphHandle child(int peg) const {
    if (m_ < 1)
      throw std::logic_error("child: zero free discs");
    if (peg < 1 || peg > p_)
      throw std::invalid_argument("child: peg out of range");
    Vertex step = ipow(static_cast<std::uint64_t>(p_), m_ - 1);
    return SubgraphHandle(p_, graph_n_, m_ - 1,
                          base_ + static_cast<Vertex>(peg - 1) * step);
  }

  // Peg holding the innermost pinned disc; meaningful only for a proper
  // subgraph produced by partition_by_largest.
  int pinned_peg() const {
    if (m_ >= graph_n_)
      throw std::logic_error("pinned_peg: handle covers the whole graph");
    Vertex step = ipow(static_cast<std::uint64_t>(p_), m_);
    return static_cast<int>((base_ / step) % static_cast<Vertex>(p_)) + 1;
  }

  bool sibling_of(const SubgraphHandle& o) const {
    if (p_ != o.p_ || graph_n_ != o.graph_n_ || m_ != o.m_) return false;
    if (m_ >= graph_n_) return false;
    if (base_ == o.base_) return false;
    Vertex step = ipow(static_cast<std::uint64_t>(p_), m_);
    Vertex parent_a = base_ - static_cast<Vertex>(pinned_peg() - 1) * step;
    Vertex parent_b = o.base_ - static_cast<Vertex>(o.pinned_peg() - 1) * step;
    return parent_a == parent_b;
  }

  bool operator==(const SubgraphHandle& o) const = default;

 private:
  SubgraphHandle(int p, int graph_n, int m, Vertex base)
      : p_(p), graph_n_(graph_n), m_(m), base_(base) {}

  int p_;
  int graph_n_;
  int m_;
  Vertex base_;
};

/// The vertices of a handle placing none of its free discs on peg_i or
/// peg_j. A facet of an H_p^m copy has (p-2)^m vertices and is the boundary
/// set toward the sibling handle exchanged by moving the pinned disc
/// between those two pegs.
struct Facet {
  SubgraphHandle owner;
  int peg_i;
  int peg_j;
  std::vector<Vertex> vertices;  // global indices, ascending

  std::size_t size() const { return vertices.size(); }
};

inline Facet facet(const SubgraphHandle& h, int peg_i, int peg_j) {
  int p = h.pegs();
  if (peg_i == peg_j)
    throw std::invalid_argument("facet: peg pair must be distinct");
  if (peg_i < 1 || peg_i > p || peg_j < 1 || peg_j > p)
    throw std::invalid_argument("facet: peg out of range");
  std::vector<int> allowed;
  for (int a = 0; a < p; ++a)
    if (a != peg_i - 1 && a != peg_j - 1) allowed.push_back(a);
  int m = h.free_discs();
  std::vector<std::size_t> digit(static_cast<std::size_t>(m), 0);
  Facet f{h, std::min(peg_i, peg_j), std::max(peg_i, peg_j), {}};
  f.vertices.reserve(ipow(static_cast<std::uint64_t>(p - 2), m));
  while (true) {
    Vertex local = 0;
    for (int i = m - 1; i >= 0; --i)
      local = local * static_cast<Vertex>(p) +
              static_cast<Vertex>(allowed[digit[static_cast<std::size_t>(i)]]);
    f.vertices.push_back(h.to_global(local));
    int i = 0;
    while (i < m && ++digit[static_cast<std::size_t>(i)] == allowed.size()) {
      digit[static_cast<std::size_t>(i)] = 0;
      ++i;
    }
    if (i == m) break;
  }
  return f;
}

/// The edges between two sibling handles: a perfect matching between their
/// boundary facets, pairing equal local configurations. Sorted by the
/// endpoint in h_i.
struct BoundaryMatching {
  std::vector<Vertex> side_i;  // boundary vertices in h_i, ascending
  std::vector<Vertex> side_j;  // matched partners in h_j, same order
  std::size_t size() const { return side_i.size(); }
};

inline BoundaryMatching boundary(const SubgraphHandle& h_i,
                                 const SubgraphHandle& h_j) {
  if (!h_i.sibling_of(h_j))
    throw std::invalid_argument("boundary: handles are not siblings");
  int peg_i = h_i.pinned_peg();
  int peg_j = h_j.pinned_peg();
  Facet fi = facet(h_i, peg_i, peg_j);
  BoundaryMatching b;
  b.side_i = fi.vertices;
  b.side_j.reserve(fi.vertices.size());
  for (Vertex v : fi.vertices)
    b.side_j.push_back(v - h_i.base() + h_j.base());
  return b;
}

}  // namespace hanoiflow
