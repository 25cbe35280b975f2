#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "hanoiflow/expansion_oracle.hpp"
#include "hanoiflow/flow_builder.hpp"
#include "hanoiflow/hanoi_graph.hpp"
#include "hanoiflow/small_graph.hpp"
#include "hanoiflow/treewidth_oracle.hpp"

using namespace hanoiflow;

namespace {

SmallGraph cycle(int k) {
  SmallGraph g(k);
  for (int v = 0; v < k; ++v) g.add_edge(v, (v + 1) % k);
  return g;
}

SmallGraph grid3x3() {
  SmallGraph g(9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i + 1 < 3) g.add_edge(i * 3 + j, (i + 1) * 3 + j);
      if (j + 1 < 3) g.add_edge(i * 3 + j, i * 3 + j + 1);
    }
  return g;
}

}  // namespace

TEST_CASE("small graph builders") {
  CHECK(SmallGraph::clique(5).edge_count() == 10);
  CHECK(SmallGraph::star(4).edge_count() == 4);
  CHECK(SmallGraph::path(6).edge_count() == 5);
  CHECK(SmallGraph::clique(5).connected());
  CHECK_FALSE(SmallGraph(3).connected());
  auto h32 = SmallGraph::from_hanoi(HanoiGraph(3, 2));
  CHECK(h32.n == 9);
  CHECK(h32.edge_count() == 12);
  CHECK(h32.max_degree() == 3);
  CHECK_THROWS_AS(SmallGraph::from_hanoi(HanoiGraph(3, 4)), std::length_error);
}

TEST_CASE("exact edge expansion on cliques") {
  auto k3 = exact_edge_expansion(SmallGraph::clique(3));
  CHECK(k3.value == Rational(2));
  CHECK(k3.witness.vertices == std::vector<int>{0});  // singleton, lex-least

  auto k4 = exact_edge_expansion(SmallGraph::clique(4));
  CHECK(k4.value == Rational(2));
  CHECK(k4.witness.vertices == std::vector<int>{0, 1});  // any pair works
  CHECK(k4.witness.boundary == 4);
}

TEST_CASE("exact edge expansion on Hanoi graphs") {
  auto h32 = exact_edge_expansion(SmallGraph::from_hanoi(HanoiGraph(3, 2)));
  CHECK(h32.value == Rational(2, 3));
  CHECK(h32.witness.vertices == std::vector<int>{0, 1, 2});  // child triangle
  CHECK(h32.witness.boundary == 2);

  auto h33 = exact_edge_expansion(SmallGraph::from_hanoi(HanoiGraph(3, 3)));
  CHECK(h33.value == Rational(2, 9));
  CHECK(h33.witness.vertices.size() == 9);

  auto h42 = exact_edge_expansion(SmallGraph::from_hanoi(HanoiGraph(4, 2)));
  CHECK(h42.value == Rational(1));

  CHECK_THROWS_AS(
      exact_edge_expansion(SmallGraph::from_hanoi(HanoiGraph(3, 3)), 20),
      std::length_error);
  CHECK_THROWS_AS(exact_edge_expansion(SmallGraph(3)), std::invalid_argument);
}

TEST_CASE("exact vertex expansion") {
  CHECK(exact_vertex_expansion(SmallGraph::clique(3)).value == Rational(2));
  CHECK(exact_vertex_expansion(SmallGraph::clique(4)).value == Rational(1));

  // Two leaves of a star share their hub: the optimal witness is
  // disconnected, which is exactly why this oracle enumerates all subsets.
  auto star = exact_vertex_expansion(SmallGraph::star(4));
  CHECK(star.value == Rational(1, 2));
  CHECK(star.witness.vertices == std::vector<int>{1, 2});

  CHECK(exact_vertex_expansion(SmallGraph::from_hanoi(HanoiGraph(3, 2))).value ==
        Rational(1, 2));
  CHECK(exact_vertex_expansion(SmallGraph::from_hanoi(HanoiGraph(4, 2))).value ==
        Rational(5, 8));
}

namespace {

// A witness must actually cut what it claims; ratios can tie between a
// connected and a disconnected set, so sets themselves need not match.
void require_valid_witness(const SmallGraph& g, const ExpansionResult& r) {
  long long bdry = 0;
  std::uint64_t mask = 0;
  for (int v : r.witness.vertices) mask |= SmallGraph::bit(v);
  for (int v : r.witness.vertices)
    bdry += std::popcount(g.adj[static_cast<std::size_t>(v)] & ~mask);
  REQUIRE(bdry == r.witness.boundary);
  REQUIRE(Rational(bdry, static_cast<long long>(r.witness.vertices.size())) ==
          r.value);
  REQUIRE(r.witness.vertices.size() <= static_cast<std::size_t>(g.n / 2));
}

}  // namespace

TEST_CASE("connected-restricted enumeration matches exhaustive for edges") {
  std::mt19937_64 rng(0);
  for (int i = 0; i < 10; ++i) {
    int n = 4 + i % 9;
    SmallGraph g = SmallGraph::random_connected(n, 0.35 + 0.05 * (i % 4), rng);
    auto fast = exact_edge_expansion(g);
    auto slow = edge_expansion_all_subsets(g);
    REQUIRE(fast.value == slow.value);
    require_valid_witness(g, fast);
    require_valid_witness(g, slow);
  }
  // Known instances as well.
  for (const SmallGraph& g :
       {SmallGraph::clique(4), SmallGraph::from_hanoi(HanoiGraph(3, 2)),
        cycle(8), grid3x3()}) {
    auto fast = exact_edge_expansion(g);
    auto slow = edge_expansion_all_subsets(g);
    REQUIRE(fast.value == slow.value);
    require_valid_witness(g, fast);
    require_valid_witness(g, slow);
  }
}

TEST_CASE("parallel enumeration returns the sequential answer") {
  auto g = SmallGraph::from_hanoi(HanoiGraph(3, 3));
  auto seq = exact_edge_expansion(g, 30, 1);
  auto par = exact_edge_expansion(g, 30, 4);
  CHECK(seq.value == par.value);
  CHECK(seq.witness.vertices == par.witness.vertices);
}

TEST_CASE("witness cut bound dominates the exact expansion") {
  CHECK(witness_cut_bound(3, 2) == Rational(2, 3));
  CHECK(witness_cut_bound(3, 3) == Rational(2, 9));
  CHECK(witness_cut_bound(4, 2) == Rational(3, 2));
  struct Inst {
    int p, n;
  };
  for (Inst in : {Inst{3, 1}, Inst{3, 2}, Inst{3, 3}, Inst{4, 1}, Inst{4, 2}}) {
    auto h = exact_edge_expansion(SmallGraph::from_hanoi(HanoiGraph(in.p, in.n)));
    REQUIRE(h.value <= witness_cut_bound(in.p, in.n));
  }
}

TEST_CASE("exact treewidth on known families") {
  for (int p = 3; p <= 8; ++p) {
    auto cert = exact_treewidth(SmallGraph::clique(p));
    CHECK(cert.width == p - 1);
    CHECK(cert.exhaustive);
    CHECK(replay_elimination_width(SmallGraph::clique(p),
                                   cert.elimination_order) == p - 1);
  }
  std::mt19937_64 rng(0);
  for (int i = 0; i < 10; ++i) {
    SmallGraph t = SmallGraph::random_tree(2 + static_cast<int>(rng() % 13), rng);
    auto cert = exact_treewidth(t);
    CHECK(cert.width == 1);
    CHECK(replay_elimination_width(t, cert.elimination_order) == 1);
  }
  CHECK(exact_treewidth(SmallGraph::path(7)).width == 1);
  CHECK(exact_treewidth(cycle(6)).width == 2);
  CHECK(exact_treewidth(grid3x3()).width == 3);
}

TEST_CASE("exact treewidth on Hanoi graphs: regression constants") {
  auto g32 = SmallGraph::from_hanoi(HanoiGraph(3, 2));
  auto c32 = exact_treewidth(g32);
  CHECK(c32.width == 2);
  CHECK(replay_elimination_width(g32, c32.elimination_order) == 2);

  auto g42 = SmallGraph::from_hanoi(HanoiGraph(4, 2));
  auto c42 = exact_treewidth(g42);
  CHECK(c42.width == 5);
  CHECK(replay_elimination_width(g42, c42.elimination_order) == 5);

  CHECK_THROWS_AS(exact_treewidth(SmallGraph::from_hanoi(HanoiGraph(3, 3))),
                  std::length_error);
}

TEST_CASE("certificate replay rejects bad orders") {
  // Eliminating the hub of a star first forms a clique on its leaves.
  SmallGraph star = SmallGraph::star(4);
  std::vector<int> bad{0, 1, 2, 3, 4};
  CHECK(replay_elimination_width(star, bad) == 4);
  auto cert = exact_treewidth(star);
  CHECK(cert.width == 1);
  CHECK_THROWS_AS(replay_elimination_width(star, {0, 1}),
                  std::invalid_argument);
}

TEST_CASE("inequality chain between expansion and treewidth") {
  CHECK(check_relations(Rational(2), Rational(2), 2, 2, 3).empty());  // K_3
  // A fabricated violation is reported.
  auto bad = check_relations(Rational(1), Rational(2), 2, 0, 10);
  CHECK_FALSE(bad.empty());
}

TEST_CASE("flow congestion implies a treewidth lower bound") {
  // Rearranging h <= 3*D*(t+1)/|V| with h >= 1/(2 rho) gives
  // t >= |V| / (6 * D * rho) - 1; exact treewidth must respect it.
  struct Inst {
    int p, n;
  };
  for (Inst in : {Inst{3, 2}, Inst{4, 2}}) {
    HanoiGraph g(in.p, in.n);
    auto built = build_uniform_mcf<Rational>(in.p, in.n);
    Rational rho = built.report.normalized_congestion;
    auto sg = SmallGraph::from_hanoi(g);
    auto cert = exact_treewidth(sg);
    Rational implied =
        Rational(static_cast<long long>(g.vertex_count())) /
            (Rational(6) * Rational(sg.max_degree()) * rho) -
        Rational(1);
    REQUIRE(implied <= Rational(cert.width));
  }
}
