#pragma once

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hanoiflow/hanoi_graph.hpp"
#include "hanoiflow/rational.hpp"

namespace hanoiflow {

constexpr double kDefaultFlowTol = 1e-9;

template <class A>
struct ArcEntry {
  Vertex tail;
  Vertex head;
  A amount;
};

/// A sparse assignment of nonnegative amounts to directed arcs. Each arc is
/// one direction of an undirected graph edge; validation checks that. The
/// amount type is double (fast) or Rational (exact).
template <class A>
class ArcFlow {
 public:
  using Amount = A;

  // Arc keys pack both endpoints into one word; every supported budget
  // keeps vertex indices far below 2^32.
  static std::uint64_t arc_key(Vertex tail, Vertex head) {
    return (tail << 32) | head;
  }
  static Vertex key_tail(std::uint64_t k) { return k >> 32; }
  static Vertex key_head(std::uint64_t k) { return k & 0xffffffffULL; }

  void add(Vertex tail, Vertex head, const A& amount) {
    if (amount == A(0)) return;
    amounts_[arc_key(tail, head)] += amount;
  }

  A at(Vertex tail, Vertex head) const {
    auto it = amounts_.find(arc_key(tail, head));
    return it == amounts_.end() ? A(0) : it->second;
  }

  std::size_t arc_count() const { return amounts_.size(); }
  bool empty() const { return amounts_.empty(); }

  ArcFlow& operator+=(const ArcFlow& o) {
    for (const auto& [k, amt] : o.amounts_) amounts_[k] += amt;
    return *this;
  }

  ArcFlow& scale(const A& factor) {
    for (auto& [k, amt] : amounts_) amt = amt * factor;
    return *this;
  }

  /// Copy with all endpoints shifted by `offset`; embeds a flow built on a
  /// canonical H_p^m into a handle at another base index.
  ArcFlow translated(Vertex offset) const {
    ArcFlow out;
    out.amounts_.reserve(amounts_.size());
    for (const auto& [k, amt] : amounts_)
      out.amounts_.emplace(arc_key(key_tail(k) + offset, key_head(k) + offset),
                           amt);
    return out;
  }

  /// Copy with every arc direction swapped (the "mirror image" of a flow).
  ArcFlow reversed() const {
    ArcFlow out;
    out.amounts_.reserve(amounts_.size());
    for (const auto& [k, amt] : amounts_)
      out.amounts_.emplace(arc_key(key_head(k), key_tail(k)), amt);
    return out;
  }

  /// Entries sorted by (tail, head); the canonical dump order.
  std::vector<ArcEntry<A>> sorted_entries() const {
    std::vector<std::uint64_t> keys;
    keys.reserve(amounts_.size());
    for (const auto& [k, amt] : amounts_) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    std::vector<ArcEntry<A>> out;
    out.reserve(keys.size());
    for (std::uint64_t k : keys)
      out.push_back({key_tail(k), key_head(k), amounts_.at(k)});
    return out;
  }

  /// Net outflow per vertex, for every vertex touched by an arc.
  std::unordered_map<Vertex, A> divergence() const {
    std::unordered_map<Vertex, A> div;
    for (const auto& [k, amt] : amounts_) {
      div[key_tail(k)] += amt;
      div[key_head(k)] -= amt;
    }
    return div;
  }

  /// Largest arc amount; ties break toward the smallest (tail, head) so the
  /// result does not depend on hash iteration order. Zero arc for an empty
  /// flow.
  ArcEntry<A> max_load() const {
    bool have = false;
    std::uint64_t best_key = 0;
    A best{};
    for (const auto& [k, amt] : amounts_) {
      if (!have || best < amt || (amt == best && k < best_key)) {
        have = true;
        best = amt;
        best_key = k;
      }
    }
    if (!have) return {0, 0, A(0)};
    return {key_tail(best_key), key_head(best_key), best};
  }

  const std::unordered_map<std::uint64_t, A>& raw() const { return amounts_; }

  bool same_amounts(const ArcFlow& o, double tol = kDefaultFlowTol) const {
    for (const auto& [k, amt] : amounts_)
      if (!close_enough(amt, o.at(key_tail(k), key_head(k)), tol)) return false;
    for (const auto& [k, amt] : o.amounts_)
      if (!close_enough(at(key_tail(k), key_head(k)), amt, tol)) return false;
    return true;
  }

 private:
  std::unordered_map<std::uint64_t, A> amounts_;
};

/// An MSF problem: a source set with per-vertex surplus and a sink set with
/// per-vertex demand. A flow solves it when every pure source has net
/// outflow equal to its surplus, every pure sink net inflow equal to its
/// demand, overlap vertices net surplus-minus-demand, and every other
/// vertex zero divergence.
template <class A>
struct MsfProblem {
  std::unordered_map<Vertex, A> surplus;
  std::unordered_map<Vertex, A> demand;

  static MsfProblem uniform(const std::vector<Vertex>& sources, const A& sigma,
                            const std::vector<Vertex>& sinks, const A& delta) {
    MsfProblem pi;
    pi.surplus.reserve(sources.size());
    pi.demand.reserve(sinks.size());
    for (Vertex s : sources) pi.surplus[s] = sigma;
    for (Vertex t : sinks) pi.demand[t] = delta;
    return pi;
  }

  A total_surplus() const {
    A t{};
    for (const auto& [v, s] : surplus) t += s;
    return t;
  }
  A total_demand() const {
    A t{};
    for (const auto& [v, d] : demand) t += d;
    return t;
  }
  bool balanced(double tol = kDefaultFlowTol) const {
    return close_enough(total_surplus(), total_demand(), tol);
  }

  A expected_divergence(Vertex v) const {
    A e{};
    auto s = surplus.find(v);
    if (s != surplus.end()) e += s->second;
    auto d = demand.find(v);
    if (d != demand.end()) e -= d->second;
    return e;
  }

  bool same_as(const MsfProblem& o, double tol = kDefaultFlowTol) const {
    auto maps_equal = [tol](const std::unordered_map<Vertex, A>& a,
                            const std::unordered_map<Vertex, A>& b) {
      if (a.size() != b.size()) return false;
      for (const auto& [v, x] : a) {
        auto it = b.find(v);
        if (it == b.end() || !close_enough(x, it->second, tol)) return false;
      }
      return true;
    };
    return maps_equal(surplus, o.surplus) && maps_equal(demand, o.demand);
  }
};

template <class A>
struct DivergenceViolation {
  Vertex vertex;
  A expected;
  A actual;
};

template <class A>
struct ValidationReport {
  std::vector<DivergenceViolation<A>> divergence;
  std::vector<std::pair<Vertex, Vertex>> non_edges;
  std::vector<std::pair<Vertex, Vertex>> negative;

  bool ok() const {
    return divergence.empty() && non_edges.empty() && negative.empty();
  }
  std::string summary() const {
    if (ok()) return "ok";
    std::string s;
    if (!divergence.empty()) {
      const auto& v = divergence.front();
      s += std::to_string(divergence.size()) + " divergence violations (v" +
           std::to_string(v.vertex) + ": expected " +
           amount_traits<A>::str(v.expected) + ", actual " +
           amount_traits<A>::str(v.actual) + ")";
    }
    if (!non_edges.empty())
      s += std::string(s.empty() ? "" : "; ") +
           std::to_string(non_edges.size()) + " arcs off the graph";
    if (!negative.empty())
      s += std::string(s.empty() ? "" : "; ") +
           std::to_string(negative.size()) + " negative amounts";
    return s;
  }
};

/// Checks a flow against a problem. `is_edge(u, v)` supplies the graph.
/// With Rational amounts every comparison is exact and `tol` is ignored.
template <class A, class EdgePred>
ValidationReport<A> validate_msf(const ArcFlow<A>& flow,
                                 const MsfProblem<A>& problem,
                                 EdgePred&& is_edge,
                                 double tol = kDefaultFlowTol) {
  ValidationReport<A> report;
  for (const auto& [k, amt] : flow.raw()) {
    Vertex u = ArcFlow<A>::key_tail(k);
    Vertex v = ArcFlow<A>::key_head(k);
    if (amt < A(0)) report.negative.push_back({u, v});
    if (!is_edge(u, v)) report.non_edges.push_back({u, v});
  }
  auto div = flow.divergence();
  // Vertices with flow but no problem entry must have zero divergence;
  // sources/sinks with no flow must have zero expectation.
  auto check = [&](Vertex v) {
    A actual{};
    auto it = div.find(v);
    if (it != div.end()) actual = it->second;
    A expected = problem.expected_divergence(v);
    if (!close_enough(actual, expected, tol))
      report.divergence.push_back({v, expected, actual});
  };
  std::vector<Vertex> seen;
  seen.reserve(div.size() + problem.surplus.size() + problem.demand.size());
  for (const auto& [v, x] : div) seen.push_back(v);
  for (const auto& [v, x] : problem.surplus) seen.push_back(v);
  for (const auto& [v, x] : problem.demand) seen.push_back(v);
  std::sort(seen.begin(), seen.end());
  seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
  for (Vertex v : seen) check(v);
  // Deterministic report order.
  std::sort(report.non_edges.begin(), report.non_edges.end());
  std::sort(report.negative.begin(), report.negative.end());
  return report;
}

/// Chains two MSFs: f2 consumes exactly what f1 delivers, so the pointwise
/// sum solves (S1, T2, sigma1, delta2). Requires source set of pi2 equal to
/// sink set of pi1 with matching amounts.
template <class A>
std::pair<ArcFlow<A>, MsfProblem<A>> compose(const ArcFlow<A>& f1,
                                             const MsfProblem<A>& pi1,
                                             const ArcFlow<A>& f2,
                                             const MsfProblem<A>& pi2,
                                             double tol = kDefaultFlowTol) {
  if (pi2.surplus.size() != pi1.demand.size())
    throw std::invalid_argument(
        "compose: source set of second problem differs from sink set of "
        "first");
  for (const auto& [v, sigma] : pi2.surplus) {
    auto it = pi1.demand.find(v);
    if (it == pi1.demand.end())
      throw std::invalid_argument(
          "compose: source set of second problem differs from sink set of "
          "first");
    if (!close_enough(sigma, it->second, tol))
      throw std::invalid_argument(
          "compose: interface surplus does not match delivered demand at "
          "vertex " +
          std::to_string(v));
  }
  ArcFlow<A> f = f1;
  f += f2;
  MsfProblem<A> pi;
  pi.surplus = pi1.surplus;
  pi.demand = pi2.demand;
  return {std::move(f), std::move(pi)};
}

/// Pointwise sum of two MSFs; sources, sinks, surpluses and demands merge
/// with zero extension.
template <class A>
std::pair<ArcFlow<A>, MsfProblem<A>> sum(const ArcFlow<A>& f1,
                                         const MsfProblem<A>& pi1,
                                         const ArcFlow<A>& f2,
                                         const MsfProblem<A>& pi2) {
  ArcFlow<A> f = f1;
  f += f2;
  MsfProblem<A> pi = pi1;
  for (const auto& [v, s] : pi2.surplus) pi.surplus[v] += s;
  for (const auto& [v, d] : pi2.demand) pi.demand[v] += d;
  return {std::move(f), std::move(pi)};
}

/// Congestion of an aggregate (commodity-summed) flow: the largest arc load
/// divided by the vertex count of the graph the flow lives on.
template <class A>
struct CongestionReport {
  A max_arc_load{};
  Vertex argmax_tail = 0;
  Vertex argmax_head = 0;
  A normalized_congestion{};
  std::vector<std::pair<int, A>> per_level_terms;
};

template <class A>
CongestionReport<A> congestion(const ArcFlow<A>& aggregate,
                               std::uint64_t vertex_count) {
  CongestionReport<A> r;
  if (aggregate.empty()) return r;
  auto top = aggregate.max_load();
  r.max_arc_load = top.amount;
  r.argmax_tail = top.tail;
  r.argmax_head = top.head;
  r.normalized_congestion =
      top.amount / A(static_cast<long long>(vertex_count));
  return r;
}

/// The flow-cut bound: a uniform multicommodity flow with congestion rho
/// certifies edge expansion at least 1/(2 rho).
template <class A>
A expansion_lower_bound(const A& rho) {
  if (!(A(0) < rho))
    throw std::domain_error("expansion_lower_bound: need rho > 0");
  return A(1) / (A(2) * rho);
}

/// One record per arc, sorted by (tail, head): "tail,head,amount".
template <class A>
void dump_flow(const ArcFlow<A>& flow, std::ostream& os) {
  for (const auto& e : flow.sorted_entries())
    os << e.tail << ',' << e.head << ',' << amount_traits<A>::str(e.amount)
       << '\n';
}

}  // namespace hanoiflow
