#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "hanoiflow/flow_builder.hpp"
#include "hanoiflow/hanoi_graph.hpp"
#include "hanoiflow/msf.hpp"
#include "hanoiflow/rational.hpp"
#include "hanoiflow/subgraph.hpp"

using namespace hanoiflow;

namespace {

auto edge_of(const HanoiGraph& g) {
  return [&g](Vertex u, Vertex v) { return g.adjacent(u, v); };
}

std::vector<Vertex> handle_vertices(const SubgraphHandle& h) {
  std::vector<Vertex> vs;
  vs.reserve(h.vertex_count());
  for (Vertex v = 0; v < h.vertex_count(); ++v) vs.push_back(h.to_global(v));
  return vs;
}

Rational max_arc(const ArcFlow<Rational>& f) { return f.max_load().amount; }

Rational ratio_pow(int p, int e) {
  Rational r(1);
  for (int t = 0; t < e; ++t) r = r * Rational(p, p - 2);
  return r;
}

}  // namespace

TEST_CASE("base case: direct clique routing has congestion 1/p") {
  for (int p : {3, 4, 5}) {
    auto built = build_uniform_mcf<Rational>(p, 1);
    CHECK(built.report.max_arc_load == Rational(1));
    CHECK(built.report.normalized_congestion == Rational(1, p));
    HanoiGraph g(p, 1);
    MsfProblem<Rational> zero;
    CHECK(validate_msf(built.aggregate, zero, edge_of(g)).ok());
  }
}

TEST_CASE("stage plans carry the canonical surplus ledger") {
  // sigma_shuf = |V(H_2)|, sigma_conc = 1,
  // sigma_tran = delta_tran = |V(H_1)|/|bdry|, sigma_dist = |V(H_2)|/|E|.
  HanoiGraph g33(3, 3);
  auto kids = SubgraphHandle::whole(g33).partition_by_largest();
  auto plans = chain_stage_plans<Rational>(kids[0], kids[1]);
  CHECK(plans[0].kind == StageKind::shuffle);
  CHECK(plans[0].surplus_per_vertex == Rational(9));
  CHECK(plans[1].kind == StageKind::concentration);
  CHECK(plans[1].surplus_per_vertex == Rational(1));
  CHECK(plans[2].kind == StageKind::transmission);
  CHECK(plans[2].surplus_per_vertex == Rational(9));  // 9 / 1
  CHECK(plans[3].kind == StageKind::distribution);
  CHECK(plans[3].surplus_per_vertex == Rational(9));

  HanoiGraph g43(4, 3);
  auto kids4 = SubgraphHandle::whole(g43).partition_by_largest();
  auto plans4 = chain_stage_plans<Rational>(kids4[0], kids4[1]);
  CHECK(plans4[2].surplus_per_vertex == Rational(4));  // 16 / 4
  CHECK(plans4[3].surplus_per_vertex == Rational(4));
}

TEST_CASE("transmission flows") {
  HanoiGraph g33(3, 3);
  auto kids = SubgraphHandle::whole(g33).partition_by_largest();
  // One matching edge; per-source amount sigma_tran = 9. Aggregating over
  // the 9 sources puts |V(H_1)||V(H_2)| = 81 across the boundary.
  auto tran = solve_transmission(kids[0], kids[1], Rational(9));
  REQUIRE(tran.arc_count() == 1);
  CHECK(max_arc(tran) == Rational(9));
  auto aggregated = tran;
  aggregated.scale(Rational(9));
  CHECK(max_arc(aggregated) == Rational(81));

  HanoiGraph g43(4, 3);
  auto kids4 = SubgraphHandle::whole(g43).partition_by_largest();
  auto tran4 = solve_transmission(kids4[0], kids4[1], Rational(4));
  REQUIRE(tran4.arc_count() == 4);
  CHECK(max_arc(tran4) == Rational(4));

  CHECK(solve_transmission(kids4[0], kids4[1], Rational(0)).empty());
  CHECK_THROWS_AS(solve_transmission(kids4[0], kids[0], Rational(1)),
                  std::invalid_argument);
}

TEST_CASE("distribution base case on a clique") {
  // Each facet vertex keeps one unit and sends 1/(p-2) to each avoided-peg
  // vertex: p/(p-2) - 1 - 2/(p-2) = 0.
  for (int p : {3, 4, 5}) {
    HanoiGraph g(p, 1);
    auto top = SubgraphHandle::whole(g);
    Facet f = facet(top, 1, 2);
    Rational sigma(p, p - 2);
    auto dist = solve_distribution(top, f, sigma);
    auto pi = MsfProblem<Rational>::uniform(f.vertices, sigma,
                                            handle_vertices(top), Rational(1));
    CHECK(validate_msf(dist, pi, edge_of(g)).ok());
    for (Vertex fv : f.vertices) {
      CHECK(dist.at(fv, 0) == Rational(1, p - 2));  // peg 1 vertex is index 0
      CHECK(dist.at(fv, 1) == Rational(1, p - 2));
    }
  }
}

TEST_CASE("distribution recursion: validity and the per-edge bound") {
  // Across p in {3,4,5} and handles up to three free discs, pi_dist
  // validates exactly and no edge carries more than sigma_dist.
  for (int p : {3, 4, 5}) {
    for (int m = 1; m <= 3; ++m) {
      HanoiGraph g(p, m + 1);
      auto kids = SubgraphHandle::whole(g).partition_by_largest();
      const SubgraphHandle& h2 = kids[1];
      Facet f = facet(h2, 1, 2);
      long long bdry = 1;
      for (int t = 0; t < m; ++t) bdry *= p - 2;
      Rational sigma(static_cast<long long>(h2.vertex_count()), bdry);
      auto dist = solve_distribution(h2, f, sigma);
      auto pi = MsfProblem<Rational>::uniform(
          f.vertices, sigma, handle_vertices(h2), Rational(1));
      REQUIRE(validate_msf(dist, pi, edge_of(g)).ok());
      REQUIRE(max_arc(dist) <= sigma);
    }
  }
}

TEST_CASE("distribution splits per the recursive ledger (p=4)") {
  // sigma_distsub,i = ((p-2)/p) sigma_dist for the facet children and the
  // two transmissions out of each carry sigma_dist/p per boundary edge.
  HanoiGraph g(4, 3);
  auto kids = SubgraphHandle::whole(g).partition_by_largest();
  const SubgraphHandle& h2 = kids[1];  // children pinned on pegs 1..4
  Facet f = facet(h2, 1, 2);
  Rational sigma(16, 4);
  auto dist = solve_distribution(h2, f, sigma);
  // The boundary matching from child 3 into child 1 carries exactly
  // sigma/p per edge; no other stage touches those arcs.
  auto inner = h2.partition_by_largest();
  BoundaryMatching bm = boundary(inner[2], inner[0]);
  for (std::size_t t = 0; t < bm.size(); ++t)
    CHECK(dist.at(bm.side_i[t], bm.side_j[t]) == sigma / Rational(4));
}

TEST_CASE("summed distribution subproblems feed the facet-free children") {
  // The two children pinned on the avoided pegs receive their whole demand
  // through p-2 entry facets; summing those subproblems yields one unit of
  // demand per vertex, with overlapping facet vertices accumulating
  // surplus once per facet they lie in.
  HanoiGraph g(4, 3);
  auto kids = SubgraphHandle::whole(g).partition_by_largest();
  const SubgraphHandle& h2 = kids[1];
  auto inner = h2.partition_by_largest();
  const SubgraphHandle& c1 = inner[0];
  Rational sigma(16, 4);
  Rational spill = sigma / Rational(4);
  ArcFlow<Rational> total;
  MsfProblem<Rational> total_pi;
  for (int k = 3; k <= 4; ++k) {
    Facet entry = facet(c1, 1, k);
    Rational delta = spill * Rational(2, 4);  // spill * ((p-2)/p)^{m'}
    auto flow = solve_distribution(c1, entry, spill);
    auto pi = MsfProblem<Rational>::uniform(entry.vertices, spill,
                                            handle_vertices(c1), delta);
    std::tie(total, total_pi) = sum(total, total_pi, flow, pi);
  }
  for (Vertex v : handle_vertices(c1))
    CHECK(total_pi.demand.at(v) == Rational(1));
  for (const auto& [v, s] : total_pi.surplus)
    CHECK((s == spill || s == spill * Rational(2)));
  CHECK(validate_msf(total, total_pi,
                     [&g](Vertex u, Vertex v) { return g.adjacent(u, v); })
            .ok());
}

TEST_CASE("concentration mirrors distribution") {
  HanoiGraph g(3, 3);
  auto kids = SubgraphHandle::whole(g).partition_by_largest();
  const SubgraphHandle& h1 = kids[0];
  Facet f = facet(h1, 1, 2);
  Rational delta(9, 1);
  auto conc = solve_concentration(h1, f, delta);
  auto dist = solve_distribution(h1, f, delta);
  CHECK(conc.same_amounts(dist.reversed()));
  auto pi = MsfProblem<Rational>::uniform(handle_vertices(h1), Rational(1),
                                          f.vertices, delta);
  CHECK(validate_msf(conc, pi, edge_of(g)).ok());

  // A K_3 child: concentration onto the single boundary vertex gathers all
  // three units (one of them its own).
  auto inner = h1.partition_by_largest();
  Facet fi = facet(inner[0], 1, 2);
  REQUIRE(fi.size() == 1);
  auto conc3 = solve_concentration(inner[0], fi, Rational(3));
  auto pi3 = MsfProblem<Rational>::uniform(handle_vertices(inner[0]),
                                           Rational(1), fi.vertices,
                                           Rational(3));
  CHECK(validate_msf(conc3, pi3, edge_of(g)).ok());
}

TEST_CASE("routing base case in a clique") {
  // Facets sharing p-3 vertices: shared vertices keep their unit, the one
  // unshared source sends along the direct edge to the one unshared sink.
  HanoiGraph g(4, 1);
  auto top = SubgraphHandle::whole(g);
  Facet from = facet(top, 1, 2);  // vertices on pegs {3,4}
  Facet to = facet(top, 1, 3);    // vertices on pegs {2,4}
  auto rout = solve_routing(top, from, to, Rational(5));
  REQUIRE(rout.arc_count() == 1);
  CHECK(rout.at(2, 1) == Rational(5));  // peg 3 -> peg 2, zero-based indices
  auto pi = MsfProblem<Rational>::uniform(from.vertices, Rational(5),
                                          to.vertices, Rational(5));
  CHECK(validate_msf(rout, pi, edge_of(g)).ok());
}

TEST_CASE("routing: identical facets need no flow") {
  HanoiGraph g(4, 2);
  auto top = SubgraphHandle::whole(g);
  Facet f = facet(top, 1, 2);
  CHECK(solve_routing(top, f, f, Rational(3)).empty());
}

TEST_CASE("routing recursion: validity and the no-gain bound") {
  // Inside a two-free-disc copy of H_4^3 and across disjoint peg pairs in
  // H_5^2, routing validates and never loads an edge above the amount.
  {
    HanoiGraph g(4, 3);
    auto kids = SubgraphHandle::whole(g).partition_by_largest();
    const SubgraphHandle& h = kids[2];
    Facet from = facet(h, 1, 2);
    Facet to = facet(h, 3, 1);
    Rational amount(7, 3);
    auto rout = solve_routing(h, from, to, amount);
    auto pi =
        MsfProblem<Rational>::uniform(from.vertices, amount, to.vertices, amount);
    REQUIRE(validate_msf(rout, pi, edge_of(g)).ok());
    REQUIRE(max_arc(rout) <= amount);
  }
  {
    HanoiGraph g(5, 2);
    auto top = SubgraphHandle::whole(g);
    Facet from = facet(top, 1, 2);
    Facet to = facet(top, 3, 4);  // disjoint avoided pairs
    Rational amount(2);
    auto rout = solve_routing(top, from, to, amount);
    auto pi =
        MsfProblem<Rational>::uniform(from.vertices, amount, to.vertices, amount);
    REQUIRE(validate_msf(rout, pi, edge_of(g)).ok());
    REQUIRE(max_arc(rout) <= amount);
  }
  {
    HanoiGraph g(4, 2);
    auto top = SubgraphHandle::whole(g);
    CHECK_THROWS_AS(solve_routing(top, facet(top, 1, 2), facet(top.child(1), 1, 3),
                                  Rational(1)),
                    std::invalid_argument);
  }
}

TEST_CASE("shuffle solves pi_shuf and degenerates to empty") {
  HanoiGraph g(3, 2);
  auto kids = SubgraphHandle::whole(g).partition_by_largest();
  const SubgraphHandle& h1 = kids[0];
  for (Vertex s : handle_vertices(h1)) {
    auto shuf = solve_shuffle<Rational>(h1, s);
    auto pi = MsfProblem<Rational>::uniform({s}, Rational(3),
                                            handle_vertices(h1), Rational(1));
    REQUIRE(validate_msf(shuf, pi, edge_of(g)).ok());
  }
  // Zero free discs: a single vertex sends nothing.
  auto leaf = h1.child(1);
  CHECK(per_source_uniform_flow<Rational>(leaf, leaf.base()).empty());
  CHECK_THROWS_AS(per_source_uniform_flow<Rational>(h1, 99),
                  std::invalid_argument);
}

TEST_CASE("per-source flows sum to the aggregate") {
  for (auto [p, n] : {std::pair<int, int>{3, 2}, {4, 2}, {3, 3}}) {
    HanoiGraph g(p, n);
    auto whole = SubgraphHandle::whole(g);
    ArcFlow<Rational> total;
    for (Vertex s = 0; s < g.vertex_count(); ++s)
      total += per_source_uniform_flow<Rational>(whole, s);
    auto built = build_uniform_mcf<Rational>(p, n);
    REQUIRE(total.same_amounts(built.aggregate));
  }
}

TEST_CASE("stage chain composes to pi_s") {
  HanoiGraph g(3, 2);
  auto kids = SubgraphHandle::whole(g).partition_by_largest();
  const SubgraphHandle& h1 = kids[0];
  const SubgraphHandle& h2 = kids[2];
  Facet f1 = facet(h1, 1, 3);
  Facet f2 = facet(h2, 1, 3);
  Rational iface(3, 1);
  auto conc = solve_concentration(h1, f1, iface);
  auto tran = solve_transmission(h1, h2, iface);
  auto dist = solve_distribution(h2, f2, iface);
  auto vi = handle_vertices(h1);
  auto vj = handle_vertices(h2);
  auto pi_conc = MsfProblem<Rational>::uniform(vi, Rational(1), f1.vertices, iface);
  auto pi_tran = MsfProblem<Rational>::uniform(f1.vertices, iface, f2.vertices, iface);
  auto pi_dist = MsfProblem<Rational>::uniform(f2.vertices, iface, vj, Rational(1));
  for (Vertex s : vi) {
    auto shuf = solve_shuffle<Rational>(h1, s);
    auto pi_shuf = MsfProblem<Rational>::uniform({s}, Rational(3), vi, Rational(1));
    auto c1 = compose(shuf, pi_shuf, conc, pi_conc);
    auto c2 = compose(c1.first, c1.second, tran, pi_tran);
    auto c3 = compose(c2.first, c2.second, dist, pi_dist);
    auto pi_s = MsfProblem<Rational>::uniform({s}, Rational(3), vj, Rational(1));
    CHECK(c3.second.same_as(pi_s));
    CHECK(validate_msf(c3.first, pi_s, edge_of(g)).ok());
  }
}

TEST_CASE("congestion baselines and the recurrence ledger") {
  auto b32 = build_uniform_mcf<Rational>(3, 2);
  CHECK(b32.report.normalized_congestion == Rational(1));  // measured baseline
  CHECK(b32.report.max_arc_load == Rational(9));

  auto b33 = build_uniform_mcf<Rational>(3, 3);
  CHECK(b33.report.normalized_congestion == Rational(3));

  auto b42 = build_uniform_mcf<Rational>(4, 2);
  CHECK(b42.report.normalized_congestion == Rational(1, 2));

  // Increments stay under the fitted constant times (p/(p-2))^m, and the
  // single-stage terms match their closed forms.
  for (int p : {3, 4}) {
    auto ledger = recurrence_ledger<Rational>(p, 5);
    REQUIRE(ledger.levels.size() == 5);
    CHECK(Rational(0) < ledger.fitted_c);
    for (const auto& lt : ledger.levels) {
      if (lt.level < 2) continue;
      CHECK(lt.increment <= ledger.fitted_c * ratio_pow(p, lt.level));
      // Transmission term: |V_{m-1}|^2 / (|bdry| * |V_m|).
      long long vprev = 1, bdry = 1, vm = p;
      for (int t = 0; t < lt.level - 1; ++t) {
        vprev *= p;
        bdry *= p - 2;
        vm *= p;
      }
      CHECK(lt.transmission_term ==
            Rational(vprev, bdry) * Rational(vprev, vm));
      // The concentration+distribution term stays within the aggregate
      // distribution bound (p-1 incoming and p-1 outgoing stages, each at
      // most |V_{m-1}| * sigma_dist per edge).
      CHECK(lt.concdist_term <=
            Rational(2 * (p - 1)) * Rational(vprev, bdry) * Rational(vprev, vm));
      // rho is nondecreasing.
      CHECK(Rational(0) <= lt.increment);
    }
  }

  // p = 3 increments are exactly 2/27 * 3^m: rho(3,n) = 3^{n-1}.
  auto l3 = recurrence_ledger<Rational>(3, 5);
  CHECK(l3.fitted_c == Rational(2, 27));
  CHECK(l3.levels.back().rho == Rational(27));
}

TEST_CASE("aggregate conserves flow across peg counts") {
  for (auto [p, n] : {std::pair<int, int>{3, 4}, {4, 3}, {5, 3}}) {
    HanoiGraph g(p, n);
    auto built = build_uniform_mcf<Rational>(p, n);
    MsfProblem<Rational> zero;
    REQUIRE(validate_msf(built.aggregate, zero,
                         [&g](Vertex u, Vertex v) { return g.adjacent(u, v); })
                .ok());
  }
}

TEST_CASE("aggregate mode is deterministic") {
  auto a = build_uniform_mcf<Rational>(4, 3);
  auto b = build_uniform_mcf<Rational>(4, 3);
  CHECK(a.report.normalized_congestion == b.report.normalized_congestion);
  CHECK(a.aggregate.same_amounts(b.aggregate));
  CHECK(a.ledger.fitted_c == b.ledger.fitted_c);
}

TEST_CASE("budget guards") {
  CHECK_THROWS_AS(build_uniform_mcf<double>(3, 9, 100), std::length_error);
  CHECK_THROWS_AS(audit_uniform_mcf<Rational>(3, 5), std::length_error);
}

TEST_CASE("per-commodity audits pass on tiny graphs") {
  for (auto [p, n] : {std::pair<int, int>{3, 2}, {4, 2}, {5, 2}}) {
    auto audit = audit_uniform_mcf<Rational>(p, n);
    INFO("p=" << p << " n=" << n);
    for (const auto& f : audit.failures) INFO(f);
    REQUIRE(audit.ok());
  }
  // Floating mode: p = 5 makes interface amounts non-dyadic (thirds), so
  // every tolerance comparison in the audit is genuinely exercised.
  auto fp = audit_uniform_mcf<double>(5, 2);
  for (const auto& f : fp.failures) INFO(f);
  REQUIRE(fp.ok());
}
