#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hanoiflow/hanoi_graph.hpp"
#include "hanoiflow/msf.hpp"
#include "hanoiflow/subgraph.hpp"

namespace hanoiflow {

// ---------------------------------------------------------------------------
// Stage flows.
//
// The uniform multicommodity flow on H_p^n is assembled from five kinds of
// MSF stages between and inside the p copies of H_p^{n-1}:
//
//   shuffle        a source spreads its outbound flow uniformly over its own
//                  copy, reusing the level-(n-1) flow
//   concentration  the spread flow gathers onto the boundary facet toward
//                  the destination copy (mirror image of distribution)
//   transmission   the boundary matching carries the flow across
//   distribution   flow entering at a facet spreads uniformly over the copy
//   routing        facet-to-facet transport inside a copy, used by the
//                  distribution recursion
//
// Distribution and routing recurse over the p-way partition; both bottom out
// on single-disc copies, which are cliques.
// ---------------------------------------------------------------------------

template <class A>
void add_transmission_flow(const SubgraphHandle& h_i, const SubgraphHandle& h_j,
                           const A& amount_per_edge, ArcFlow<A>& out) {
  if (amount_per_edge == A(0)) return;
  BoundaryMatching b = boundary(h_i, h_j);
  for (std::size_t t = 0; t < b.size(); ++t)
    out.add(b.side_i[t], b.side_j[t], amount_per_edge);
}

namespace detail {

inline bool same_peg_pair(int a1, int b1, int a2, int b2) {
  return (a1 == a2 && b1 == b2) || (a1 == b2 && b1 == a2);
}

// Facet-to-facet routing inside h: from F_{qa,qb}(h) to F_{ra,rb}(h), a
// uniform `amount` per facet vertex on both sides. Children meeting both
// facets recurse; children meeting only one are paired in increasing peg
// order and connected through their boundary matching. No edge of h ever
// carries more than `amount`.
template <class A>
void add_routing_flow(const SubgraphHandle& h, int qa, int qb, int ra, int rb,
                      const A& amount, ArcFlow<A>& out) {
  if (same_peg_pair(qa, qb, ra, rb)) return;  // identical facets, zero flow
  if (amount == A(0)) return;
  int p = h.pegs();
  int m = h.free_discs();
  if (m == 0) return;  // both facets are the single vertex itself
  if (m == 1) {
    // Vertices in both facets keep their amount. The unshared source
    // vertices sit on the pegs excluded by the sink pair and vice versa;
    // pair them in increasing order along direct clique edges.
    std::vector<int> src_only, dst_only;
    for (int peg = 1; peg <= p; ++peg) {
      bool in_src = peg != qa && peg != qb;
      bool in_dst = peg != ra && peg != rb;
      if (in_src && !in_dst) src_only.push_back(peg);
      if (in_dst && !in_src) dst_only.push_back(peg);
    }
    for (std::size_t t = 0; t < src_only.size(); ++t)
      out.add(h.to_global(static_cast<Vertex>(src_only[t] - 1)),
              h.to_global(static_cast<Vertex>(dst_only[t] - 1)), amount);
    return;
  }
  std::vector<int> src_only, dst_only;
  for (int k = 1; k <= p; ++k) {
    bool in_src = k != qa && k != qb;
    bool in_dst = k != ra && k != rb;
    if (in_src && in_dst)
      add_routing_flow(h.child(k), qa, qb, ra, rb, amount, out);
    else if (in_src)
      src_only.push_back(k);
    else if (in_dst)
      dst_only.push_back(k);
  }
  for (std::size_t t = 0; t < src_only.size(); ++t) {
    int x = src_only[t];
    int y = dst_only[t];
    add_routing_flow(h.child(x), qa, qb, x, y, amount, out);
    add_transmission_flow(h.child(x), h.child(y), amount, out);
    add_routing_flow(h.child(y), x, y, ra, rb, amount, out);
  }
}

// Distribution inside h: a uniform `sigma` per vertex of the facet
// F_{peg_a,peg_b}(h) spreads so that every vertex of h nets
// sigma * ((p-2)/p)^m. The two children pinned on the avoided pegs hold no
// facet vertices; each other child routes a 1/p share toward each of them
// and keeps (p-2)/p for its own recursive distribution. No edge of h ever
// carries more than `sigma`.
template <class A>
void add_distribution_flow(const SubgraphHandle& h, int peg_a, int peg_b,
                           const A& sigma, ArcFlow<A>& out) {
  if (sigma == A(0)) return;
  int p = h.pegs();
  int m = h.free_discs();
  if (m == 0) return;  // facet == vertex, everything is kept
  A spill = sigma / A(p);
  if (m == 1) {
    for (int peg = 1; peg <= p; ++peg) {
      if (peg == peg_a || peg == peg_b) continue;
      Vertex v = h.to_global(static_cast<Vertex>(peg - 1));
      out.add(v, h.to_global(static_cast<Vertex>(peg_a - 1)), spill);
      out.add(v, h.to_global(static_cast<Vertex>(peg_b - 1)), spill);
    }
    return;
  }
  A child_sigma = sigma * A(p - 2) / A(p);
  for (int k = 1; k <= p; ++k) {
    if (k == peg_a || k == peg_b) {
      // Entered through p-2 boundary facets, one per facet child.
      for (int i = 1; i <= p; ++i) {
        if (i == peg_a || i == peg_b) continue;
        add_distribution_flow(h.child(k), k, i, spill, out);
      }
    } else {
      add_distribution_flow(h.child(k), peg_a, peg_b, child_sigma, out);
      for (int j : {peg_a, peg_b}) {
        add_routing_flow(h.child(k), peg_a, peg_b, k, j, spill, out);
        add_transmission_flow(h.child(k), h.child(j), spill, out);
      }
    }
  }
}

}  // namespace detail

template <class A>
ArcFlow<A> solve_transmission(const SubgraphHandle& h_i,
                              const SubgraphHandle& h_j,
                              const A& amount_per_edge) {
  ArcFlow<A> f;
  add_transmission_flow(h_i, h_j, amount_per_edge, f);
  return f;
}

/// Solves pi_dist = (facet, V(h2), sigma_dist, sigma_dist * |facet|/|V|).
template <class A>
ArcFlow<A> solve_distribution(const SubgraphHandle& h2,
                              const Facet& source_facet, const A& sigma_dist) {
  if (!(source_facet.owner == h2))
    throw std::invalid_argument("solve_distribution: facet/owner mismatch");
  ArcFlow<A> f;
  detail::add_distribution_flow(h2, source_facet.peg_i, source_facet.peg_j,
                                sigma_dist, f);
  return f;
}

/// Solves pi_conc = (V(h1), facet, delta_conc * |facet|/|V|, delta_conc):
/// the arc reversal of the distribution flow at facet surplus delta_conc.
template <class A>
ArcFlow<A> solve_concentration(const SubgraphHandle& h1,
                               const Facet& sink_facet, const A& delta_conc) {
  return solve_distribution(h1, sink_facet, delta_conc).reversed();
}

/// Facet-to-facet routing: equal uniform surplus and demand `amount` on two
/// equal-size facets of h.
template <class A>
ArcFlow<A> solve_routing(const SubgraphHandle& h, const Facet& source_facet,
                         const Facet& sink_facet, const A& amount) {
  if (!(source_facet.owner == h) || !(sink_facet.owner == h))
    throw std::invalid_argument("solve_routing: facet/owner mismatch");
  if (source_facet.size() != sink_facet.size())
    throw std::invalid_argument("solve_routing: facet size mismatch");
  ArcFlow<A> f;
  detail::add_routing_flow(h, source_facet.peg_i, source_facet.peg_j,
                           sink_facet.peg_i, sink_facet.peg_j, amount, f);
  return f;
}

/// The commodity flow of a single source in the uniform multicommodity flow
/// on (a copy of) H_p^m: one unit from s to every other vertex of the
/// handle. Reused verbatim as the shuffle stage.
template <class A>
ArcFlow<A> per_source_uniform_flow(const SubgraphHandle& h, Vertex s) {
  if (!h.contains(s))
    throw std::invalid_argument("per_source_uniform_flow: s outside handle");
  int p = h.pegs();
  int m = h.free_discs();
  ArcFlow<A> f;
  if (m == 0) return f;  // single vertex, nothing to send
  if (m == 1) {
    for (Vertex t = 0; t < static_cast<Vertex>(p); ++t) {
      Vertex tg = h.to_global(t);
      if (tg != s) f.add(s, tg, A(1));
    }
    return f;
  }
  Vertex step = ipow(static_cast<std::uint64_t>(p), m - 1);
  int k = static_cast<int>((s - h.base()) / step) + 1;
  SubgraphHandle mine = h.child(k);
  // One copy for the intra-copy commodities plus one shuffle per
  // destination copy.
  f = per_source_uniform_flow<A>(mine, s);
  f.scale(A(p));
  long long v_prev = static_cast<long long>(step);
  long long bdry = 1;
  for (int i = 0; i < m - 1; ++i) bdry *= p - 2;
  A interface_amt = amount_traits<A>::ratio(v_prev, bdry);
  for (int j = 1; j <= p; ++j) {
    if (j == k) continue;
    SubgraphHandle other = h.child(j);
    ArcFlow<A> conc =
        solve_concentration(mine, facet(mine, k, j), interface_amt);
    f += conc;
    add_transmission_flow(mine, other, interface_amt, f);
    ArcFlow<A> dist =
        solve_distribution(other, facet(other, k, j), interface_amt);
    f += dist;
  }
  return f;
}

/// The shuffle stage for source s: s sends one unit to every vertex of its
/// own copy, solving pi_shuf = ({s}, V(h1), |V(h1)|, 1).
template <class A>
ArcFlow<A> solve_shuffle(const SubgraphHandle& h1, Vertex s) {
  return per_source_uniform_flow<A>(h1, s);
}

// ---------------------------------------------------------------------------
// Aggregate construction and congestion accounting.
// ---------------------------------------------------------------------------

enum class StageKind {
  shuffle,
  concentration,
  transmission,
  distribution,
  routing,
  distsub,
};

inline const char* stage_name(StageKind k) {
  switch (k) {
    case StageKind::shuffle: return "shuffle";
    case StageKind::concentration: return "concentration";
    case StageKind::transmission: return "transmission";
    case StageKind::distribution: return "distribution";
    case StageKind::routing: return "routing";
    case StageKind::distsub: return "distsub";
  }
  return "?";
}

/// Descriptor of one stage of the per-source chain between two sibling
/// copies, with the canonical per-source surplus amount.
template <class A>
struct StagePlan {
  StageKind kind;
  SubgraphHandle owner;
  int peg_a;  // facet or boundary pegs; 0 when not applicable
  int peg_b;
  A surplus_per_vertex;
};

/// The four per-source stages for the ordered sibling pair (h_i, h_j):
/// sigma_shuf = |V|, sigma_conc = 1, sigma_tran = sigma_dist = |V|/|bdry|.
template <class A>
std::array<StagePlan<A>, 4> chain_stage_plans(const SubgraphHandle& h_i,
                                              const SubgraphHandle& h_j) {
  if (!h_i.sibling_of(h_j))
    throw std::invalid_argument("chain_stage_plans: not siblings");
  int i = h_i.pinned_peg();
  int j = h_j.pinned_peg();
  long long v = static_cast<long long>(h_i.vertex_count());
  long long b = 1;
  for (int t = 0; t < h_i.free_discs(); ++t) b *= h_i.pegs() - 2;
  A interface_amt = amount_traits<A>::ratio(v, b);
  return {StagePlan<A>{StageKind::shuffle, h_i, 0, 0, A(v)},
          StagePlan<A>{StageKind::concentration, h_i, i, j, A(1)},
          StagePlan<A>{StageKind::transmission, h_i, i, j, interface_amt},
          StagePlan<A>{StageKind::distribution, h_j, i, j, interface_amt}};
}

template <class A>
struct LevelTerms {
  int level;
  A shuffle_term;       // congestion carried over from the previous level
  A transmission_term;  // normalized max load on the boundary matchings
  A concdist_term;      // normalized max load of concentration+distribution
  A rho;                // cumulative congestion after this level
  A increment;          // rho(level) - rho(level-1)
};

template <class A>
struct RecurrenceLedger {
  int p = 0;
  int n = 0;
  std::vector<LevelTerms<A>> levels;
  // Smallest constant with increment(m) <= c * (p/(p-2))^m for all measured
  // m >= 2; zero when n == 1.
  A fitted_c{};
};

template <class A>
struct BuildResult {
  ArcFlow<A> aggregate;
  CongestionReport<A> report;
  RecurrenceLedger<A> ledger;
};

/// Builds the aggregate uniform multicommodity flow on H_p^n level by
/// level: each copy carries p embedded copies of the previous aggregate
/// (its own commodities plus one shuffle per destination copy), and every
/// ordered sibling pair adds concentration, transmission, and distribution
/// flows scaled by the copy size.
template <class A>
BuildResult<A> build_uniform_mcf(int p, int n,
                                 std::uint64_t vertex_budget = 1'000'000) {
  HanoiGraph g(p, n);
  if (g.vertex_count() > vertex_budget)
    throw std::length_error("build_uniform_mcf: " +
                            std::to_string(g.vertex_count()) +
                            " vertices exceed budget " +
                            std::to_string(vertex_budget));
  if (g.vertex_count() > (std::uint64_t{1} << 32))
    throw std::length_error(
        "build_uniform_mcf: vertex indices exceed the 32-bit arc key space");
  BuildResult<A> result;
  result.ledger.p = p;
  result.ledger.n = n;

  // Level 1: direct clique routing, every ordered pair on its own arc.
  ArcFlow<A> agg;
  for (Vertex u = 0; u < static_cast<Vertex>(p); ++u)
    for (Vertex v = 0; v < static_cast<Vertex>(p); ++v)
      if (u != v) agg.add(u, v, A(1));
  A rho = amount_traits<A>::ratio(1, p);
  result.ledger.levels.push_back({1, A(0), A(0), A(0), rho, rho});

  for (int m = 2; m <= n; ++m) {
    HanoiGraph gm(p, m);
    SubgraphHandle top = SubgraphHandle::whole(gm);
    std::vector<SubgraphHandle> children = top.partition_by_largest();
    long long v_prev = static_cast<long long>(children[0].vertex_count());
    long long bdry = 1;
    for (int t = 0; t < m - 1; ++t) bdry *= p - 2;
    A interface_amt = amount_traits<A>::ratio(v_prev, bdry);

    ArcFlow<A> next;
    for (int k = 1; k <= p; ++k) {
      ArcFlow<A> copy =
          agg.translated(children[static_cast<std::size_t>(k - 1)].base());
      copy.scale(A(p));
      next += copy;
    }
    ArcFlow<A> concdist;
    ArcFlow<A> trans;
    for (int i = 1; i <= p; ++i) {
      for (int j = 1; j <= p; ++j) {
        if (i == j) continue;
        const SubgraphHandle& hi = children[static_cast<std::size_t>(i - 1)];
        const SubgraphHandle& hj = children[static_cast<std::size_t>(j - 1)];
        ArcFlow<A> conc =
            solve_concentration(hi, facet(hi, i, j), interface_amt);
        conc.scale(A(v_prev));
        ArcFlow<A> tran = solve_transmission(hi, hj, interface_amt);
        tran.scale(A(v_prev));
        ArcFlow<A> dist = solve_distribution(hj, facet(hj, i, j), interface_amt);
        dist.scale(A(v_prev));
        concdist += conc;
        concdist += dist;
        trans += tran;
        next += conc;
        next += tran;
        next += dist;
      }
    }
    std::uint64_t vm = gm.vertex_count();
    A rho_m = congestion(next, vm).normalized_congestion;
    result.ledger.levels.push_back(
        {m, rho, congestion(trans, vm).normalized_congestion,
         congestion(concdist, vm).normalized_congestion, rho_m, rho_m - rho});
    agg = std::move(next);
    rho = rho_m;
  }

  A c{};
  for (const auto& lt : result.ledger.levels) {
    if (lt.level < 2) continue;
    A ratio_pow = A(1);
    for (int t = 0; t < lt.level; ++t)
      ratio_pow = ratio_pow * amount_traits<A>::ratio(p, p - 2);
    A cand = lt.increment / ratio_pow;
    if (c < cand) c = cand;
  }
  result.ledger.fitted_c = c;

  result.report = congestion(agg, g.vertex_count());
  for (const auto& lt : result.ledger.levels)
    result.report.per_level_terms.push_back({lt.level, lt.increment});
  result.aggregate = std::move(agg);
  return result;
}

/// The measured per-level congestion accounting for H_p^n.
template <class A>
RecurrenceLedger<A> recurrence_ledger(int p, int n,
                                      std::uint64_t vertex_budget = 1'000'000) {
  return build_uniform_mcf<A>(p, n, vertex_budget).ledger;
}

// ---------------------------------------------------------------------------
// Per-commodity audit.
// ---------------------------------------------------------------------------

/// Result of the per-commodity construction audit: every per-source chain
/// at every level is validated against its MSF problem, every stage flow
/// against its stage problem, the full aggregate against zero divergence,
/// and the aggregate against the sum of all per-source flows.
struct AuditResult {
  int p = 0;
  int n = 0;
  std::size_t chains_validated = 0;
  std::size_t stages_validated = 0;
  bool aggregate_divergence_free = false;
  bool aggregate_matches_commodity_sum = false;
  std::vector<std::string> failures;

  bool ok() const {
    return failures.empty() && aggregate_divergence_free &&
           aggregate_matches_commodity_sum;
  }
};

constexpr std::uint64_t kPerCommodityBudget = 100;

template <class A>
AuditResult audit_uniform_mcf(int p, int n,
                              std::uint64_t vertex_budget = kPerCommodityBudget,
                              double tol = kDefaultFlowTol) {
  HanoiGraph g(p, n);
  if (g.vertex_count() > vertex_budget)
    throw std::length_error("audit_uniform_mcf: per-commodity mode needs " +
                            std::to_string(g.vertex_count()) +
                            " vertices, budget is " +
                            std::to_string(vertex_budget));
  AuditResult r;
  r.p = p;
  r.n = n;
  auto fail = [&r](const std::string& what, const std::string& detail) {
    r.failures.push_back(what + ": " + detail);
  };

  for (int m = 1; m <= n; ++m) {
    HanoiGraph gm(p, m);
    auto is_edge = [&gm](Vertex u, Vertex v) { return gm.adjacent(u, v); };
    std::string lvl = "H_" + std::to_string(p) + "^" + std::to_string(m);
    SubgraphHandle top = SubgraphHandle::whole(gm);
    if (m == 1) {
      for (Vertex u = 0; u < gm.vertex_count(); ++u) {
        for (Vertex v = 0; v < gm.vertex_count(); ++v) {
          if (u == v) continue;
          ArcFlow<A> f;
          f.add(u, v, A(1));
          auto pi = MsfProblem<A>::uniform({u}, A(1), {v}, A(1));
          auto rep = validate_msf(f, pi, is_edge, tol);
          if (!rep.ok()) fail(lvl + " clique commodity", rep.summary());
          ++r.chains_validated;
        }
      }
      continue;
    }
    std::vector<SubgraphHandle> children = top.partition_by_largest();
    long long v_prev = static_cast<long long>(children[0].vertex_count());
    long long bdry = 1;
    for (int t = 0; t < m - 1; ++t) bdry *= p - 2;
    A interface_amt = amount_traits<A>::ratio(v_prev, bdry);
    for (int i = 1; i <= p; ++i) {
      for (int j = 1; j <= p; ++j) {
        if (i == j) continue;
        const SubgraphHandle& hi = children[static_cast<std::size_t>(i - 1)];
        const SubgraphHandle& hj = children[static_cast<std::size_t>(j - 1)];
        std::string pair_tag = lvl + " pair (" + std::to_string(i) + "," +
                               std::to_string(j) + ")";
        Facet fi = facet(hi, i, j);
        Facet fj = facet(hj, i, j);
        std::vector<Vertex> vi, vj;
        for (Vertex t = 0; t < hi.vertex_count(); ++t)
          vi.push_back(hi.to_global(t));
        for (Vertex t = 0; t < hj.vertex_count(); ++t)
          vj.push_back(hj.to_global(t));

        ArcFlow<A> conc = solve_concentration(hi, fi, interface_amt);
        ArcFlow<A> tran = solve_transmission(hi, hj, interface_amt);
        ArcFlow<A> dist = solve_distribution(hj, fj, interface_amt);
        auto pi_conc =
            MsfProblem<A>::uniform(vi, A(1), fi.vertices, interface_amt);
        auto pi_tran = MsfProblem<A>::uniform(fi.vertices, interface_amt,
                                              fj.vertices, interface_amt);
        auto pi_dist =
            MsfProblem<A>::uniform(fj.vertices, interface_amt, vj, A(1));
        for (auto [flow, pi, tag] :
             {std::tuple<const ArcFlow<A>*, const MsfProblem<A>*, const char*>{
                  &conc, &pi_conc, "concentration"},
              {&tran, &pi_tran, "transmission"},
              {&dist, &pi_dist, "distribution"}}) {
          auto rep = validate_msf(*flow, *pi, is_edge, tol);
          if (!rep.ok()) fail(pair_tag + " " + tag, rep.summary());
          ++r.stages_validated;
        }

        for (Vertex s : vi) {
          ArcFlow<A> shuf = per_source_uniform_flow<A>(hi, s);
          auto pi_shuf = MsfProblem<A>::uniform({s}, A(v_prev), vi, A(1));
          auto rep = validate_msf(shuf, pi_shuf, is_edge, tol);
          if (!rep.ok())
            fail(pair_tag + " shuffle s=" + std::to_string(s), rep.summary());
          auto c1 = compose(shuf, pi_shuf, conc, pi_conc, tol);
          auto c2 = compose(c1.first, c1.second, tran, pi_tran, tol);
          auto c3 = compose(c2.first, c2.second, dist, pi_dist, tol);
          auto pi_s = MsfProblem<A>::uniform({s}, A(v_prev), vj, A(1));
          if (!c3.second.same_as(pi_s, tol))
            fail(pair_tag + " chain problem s=" + std::to_string(s),
                 "composed problem differs from pi_s");
          auto chain_rep = validate_msf(c3.first, pi_s, is_edge, tol);
          if (!chain_rep.ok())
            fail(pair_tag + " chain s=" + std::to_string(s),
                 chain_rep.summary());
          ++r.chains_validated;
        }
      }
    }
  }

  // Full-graph aggregate checks: zero divergence everywhere, and equality
  // with the sum of all per-source commodity flows.
  auto built = build_uniform_mcf<A>(p, n, vertex_budget);
  auto is_edge = [&g](Vertex u, Vertex v) { return g.adjacent(u, v); };
  MsfProblem<A> zero;
  auto rep = validate_msf(built.aggregate, zero, is_edge, tol);
  r.aggregate_divergence_free = rep.ok();
  if (!rep.ok()) fail("aggregate divergence", rep.summary());

  SubgraphHandle whole = SubgraphHandle::whole(g);
  ArcFlow<A> commodity_sum;
  for (Vertex s = 0; s < g.vertex_count(); ++s)
    commodity_sum += per_source_uniform_flow<A>(whole, s);
  r.aggregate_matches_commodity_sum =
      commodity_sum.same_amounts(built.aggregate, tol);
  if (!r.aggregate_matches_commodity_sum)
    fail("aggregate reconstruction",
         "sum of per-source flows differs from aggregate");
  return r;
}

}  // namespace hanoiflow
