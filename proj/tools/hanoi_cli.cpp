// Command-line surface: structural reports, flow construction with
// congestion accounting, exact oracles, and the end-to-end verification
// suite. All output is deterministic: fixed orders, fixed number rendering.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hanoiflow/expansion_oracle.hpp"
#include "hanoiflow/flow_builder.hpp"
#include "hanoiflow/hanoi_graph.hpp"
#include "hanoiflow/msf.hpp"
#include "hanoiflow/rational.hpp"
#include "hanoiflow/small_graph.hpp"
#include "hanoiflow/subgraph.hpp"
#include "hanoiflow/treewidth_oracle.hpp"
#include "hanoiflow/verification.hpp"

namespace {

using hanoiflow::Rational;
using hanoiflow::Vertex;
using ordered_json = nlohmann::ordered_json;

constexpr int kExpansionBudget = 30;
constexpr int kTreewidthBudget = 20;
constexpr std::uint64_t kBuildBudget = 1'000'000;

constexpr int kExitFailure = 1;
constexpr int kExitRefusal = 2;

struct NRange {
  int lo = 1;
  int hi = 1;
};

NRange parse_n_range(const std::string& spec) {
  NRange r;
  auto dots = spec.find("..");
  try {
    if (dots == std::string::npos) {
      r.lo = r.hi = std::stoi(spec);
    } else {
      r.lo = std::stoi(spec.substr(0, dots));
      r.hi = std::stoi(spec.substr(dots + 2));
    }
  } catch (const std::exception&) {
    throw CLI::ValidationError("--n", "expected an integer or a range a..b");
  }
  if (r.lo < 1 || r.hi < r.lo)
    throw CLI::ValidationError("--n", "need 1 <= a <= b");
  return r;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// Writes to --out when given, stdout otherwise.
struct Sink {
  std::unique_ptr<std::ofstream> file;
  std::ostream* os = &std::cout;

  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file = std::make_unique<std::ofstream>(path);
      if (!file->is_open())
        throw std::runtime_error("cannot open output file: " + path);
      os = file.get();
    }
  }
  std::ostream& out() { return *os; }
};

int default_workers() {
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// ---------------------------------------------------------------------------
// graph
// ---------------------------------------------------------------------------

int cmd_graph(int p, const NRange& nr, std::uint64_t budget,
              const std::string& format, const std::string& out_path) {
  Sink sink(out_path);
  ordered_json jout = ordered_json::array();
  if (format == "csv")
    sink.out() << "p,n,vertices,edges,max_degree,matching_size,facet_size,"
                  "degree_histogram\n";
  for (int n = nr.lo; n <= nr.hi; ++n) {
    hanoiflow::HanoiGraph g(p, n);
    if (g.vertex_count() > budget) {
      std::cerr << "refusal: H_" << p << "^" << n << " has "
                << g.vertex_count() << " vertices, over the budget of "
                << budget << "; raise --budget-vertices to enumerate it\n";
      return kExitRefusal;
    }
    std::map<int, std::uint64_t> hist;
    for (Vertex v = 0; v < g.vertex_count(); ++v) ++hist[g.degree(v)];
    auto top = hanoiflow::SubgraphHandle::whole(g);
    auto children = top.partition_by_largest();
    std::uint64_t matching = hanoiflow::boundary(children[0], children[1]).size();
    std::uint64_t facet_size = hanoiflow::facet(top, 1, 2).size();
    if (format == "json") {
      ordered_json row;
      row["p"] = p;
      row["n"] = n;
      row["vertices"] = g.vertex_count();
      row["edges"] = g.edge_count();
      row["max_degree"] = g.max_degree();
      row["matching_size"] = matching;
      row["facet_size"] = facet_size;
      ordered_json h = ordered_json::object();
      for (const auto& [deg, count] : hist) h[std::to_string(deg)] = count;
      row["degree_histogram"] = h;
      jout.push_back(row);
    } else {
      std::string h;
      for (const auto& [deg, count] : hist) {
        if (!h.empty()) h += ';';
        h += std::to_string(deg) + ":" + std::to_string(count);
      }
      sink.out() << p << ',' << n << ',' << g.vertex_count() << ','
                 << g.edge_count() << ',' << g.max_degree() << ',' << matching
                 << ',' << facet_size << ',' << h << '\n';
    }
  }
  if (format == "json") sink.out() << jout.dump(2) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// flow
// ---------------------------------------------------------------------------

template <class A>
int run_flow(int p, const NRange& nr, bool per_commodity,
             std::uint64_t budget, std::uint64_t commodity_budget,
             const std::string& format, const std::string& out_path,
             const std::string& dump_path, int workers) {
  Sink sink(out_path);
  ordered_json jout = ordered_json::array();
  if (format == "csv")
    sink.out() << "p,n,rho,lower_bound,exact_h,witness_bound,theta_ratio\n";
  int exit_code = 0;
  for (int n = nr.lo; n <= nr.hi; ++n) {
    hanoiflow::HanoiGraph g(p, n);
    if (g.vertex_count() > budget) {
      std::cerr << "refusal: H_" << p << "^" << n << " has "
                << g.vertex_count()
                << " vertices, over the flow budget of " << budget << '\n';
      return kExitRefusal;
    }
    auto built = hanoiflow::build_uniform_mcf<A>(p, n, budget);
    A rho = built.report.normalized_congestion;
    A lower = hanoiflow::expansion_lower_bound(rho);
    Rational witness = hanoiflow::witness_cut_bound(p, n);
    bool oracle_ok = g.vertex_count() <= kExpansionBudget;
    Rational h_exact;
    Rational theta;
    if (oracle_ok) {
      auto h = hanoiflow::exact_edge_expansion(
          hanoiflow::SmallGraph::from_hanoi(g), kExpansionBudget, workers);
      h_exact = h.value;
      Rational scale(1);
      for (int t = 0; t < n; ++t) scale = scale * Rational(p, p - 2);
      theta = h_exact * scale;
    }
    auto render = [](const A& v) { return hanoiflow::amount_traits<A>::str(v); };
    if (format == "json") {
      ordered_json row;
      row["p"] = p;
      row["n"] = n;
      row["rho"] = render(rho);
      row["lower_bound"] = render(lower);
      if (oracle_ok) {
        row["exact_h"] = h_exact.str();
        row["theta_ratio"] = theta.str();
      } else {
        row["exact_h"] = nullptr;
        row["theta_ratio"] = nullptr;
      }
      row["witness_upper_bound"] = witness.str();
      ordered_json levels = ordered_json::array();
      for (const auto& lt : built.ledger.levels) {
        ordered_json l;
        l["level"] = lt.level;
        l["shuffle_term"] = render(lt.shuffle_term);
        l["transmission_term"] = render(lt.transmission_term);
        l["concdist_term"] = render(lt.concdist_term);
        l["rho"] = render(lt.rho);
        l["increment"] = render(lt.increment);
        levels.push_back(l);
      }
      row["levels"] = levels;
      row["fitted_c"] = render(built.ledger.fitted_c);
      if (per_commodity) {
        if (g.vertex_count() > commodity_budget) {
          std::cerr << "refusal: per-commodity mode needs "
                    << g.vertex_count() << " vertices <= budget "
                    << commodity_budget << '\n';
          return kExitRefusal;
        }
        auto audit = hanoiflow::audit_uniform_mcf<A>(p, n, commodity_budget);
        row["per_commodity"] = ordered_json{
            {"chains_validated", audit.chains_validated},
            {"stages_validated", audit.stages_validated},
            {"aggregate_divergence_free", audit.aggregate_divergence_free},
            {"aggregate_matches_commodity_sum",
             audit.aggregate_matches_commodity_sum},
            {"failures", audit.failures}};
        if (!audit.ok()) exit_code = kExitFailure;
      }
      jout.push_back(row);
    } else {
      sink.out() << p << ',' << n << ',' << render(rho) << ','
                 << render(lower) << ','
                 << (oracle_ok ? h_exact.str() : std::string()) << ','
                 << witness.str() << ','
                 << (oracle_ok ? theta.str() : std::string()) << '\n';
      if (per_commodity) {
        if (g.vertex_count() > commodity_budget) {
          std::cerr << "refusal: per-commodity mode needs "
                    << g.vertex_count() << " vertices <= budget "
                    << commodity_budget << '\n';
          return kExitRefusal;
        }
        auto audit = hanoiflow::audit_uniform_mcf<A>(p, n, commodity_budget);
        if (!audit.ok()) {
          exit_code = kExitFailure;
          for (const auto& f : audit.failures)
            std::cerr << "per-commodity failure: " << f << '\n';
        }
      }
    }
    if (!dump_path.empty()) {
      std::string path = dump_path;
      if (nr.hi != nr.lo)
        path += "." + std::to_string(p) + "." + std::to_string(n);
      std::ofstream df(path);
      if (!df.is_open())
        throw std::runtime_error("cannot open flow dump file: " + path);
      hanoiflow::dump_flow(built.aggregate, df);
    }
  }
  if (format == "json") sink.out() << jout.dump(2) << '\n';
  return exit_code;
}

// ---------------------------------------------------------------------------
// expansion / treewidth
// ---------------------------------------------------------------------------

int cmd_expansion(int p, const NRange& nr, int budget,
                  const std::string& format, const std::string& out_path,
                  int workers) {
  Sink sink(out_path);
  ordered_json jout = ordered_json::array();
  if (format == "csv")
    sink.out() << "p,n,h,h_witness_boundary,h_witness,h_v,hv_witness,"
                  "witness_bound\n";
  for (int n = nr.lo; n <= nr.hi; ++n) {
    hanoiflow::HanoiGraph g(p, n);
    if (g.vertex_count() > static_cast<std::uint64_t>(budget)) {
      std::cerr << "refusal: exact oracle budget exceeded (H_" << p << "^"
                << n << " has " << g.vertex_count() << " vertices, budget "
                << budget << "); use `flow` for bounds instead\n";
      return kExitRefusal;
    }
    auto sg = hanoiflow::SmallGraph::from_hanoi(g);
    auto h = hanoiflow::exact_edge_expansion(sg, budget, workers);
    auto hv = hanoiflow::exact_vertex_expansion(sg, budget);
    Rational bound = hanoiflow::witness_cut_bound(p, n);
    if (format == "json") {
      ordered_json row;
      row["p"] = p;
      row["n"] = n;
      row["h"] = h.value.str();
      row["h_witness"] = h.witness.vertices;
      row["h_witness_boundary"] = h.witness.boundary;
      row["h_v"] = hv.value.str();
      row["hv_witness"] = hv.witness.vertices;
      row["witness_bound"] = bound.str();
      jout.push_back(row);
    } else {
      auto join = [](const std::vector<int>& xs) {
        std::string s;
        for (int x : xs) {
          if (!s.empty()) s += ';';
          s += std::to_string(x);
        }
        return s;
      };
      sink.out() << p << ',' << n << ',' << h.value.str() << ','
                 << h.witness.boundary << ',' << join(h.witness.vertices)
                 << ',' << hv.value.str() << ',' << join(hv.witness.vertices)
                 << ',' << bound.str() << '\n';
    }
  }
  if (format == "json") sink.out() << jout.dump(2) << '\n';
  return 0;
}

int cmd_treewidth(int p, const NRange& nr, int budget,
                  const std::string& format, const std::string& out_path) {
  Sink sink(out_path);
  ordered_json jout = ordered_json::array();
  if (format == "csv") sink.out() << "p,n,treewidth,exhaustive,elimination_order\n";
  for (int n = nr.lo; n <= nr.hi; ++n) {
    hanoiflow::HanoiGraph g(p, n);
    if (g.vertex_count() > static_cast<std::uint64_t>(budget)) {
      std::cerr << "refusal: treewidth DP needs 2^" << g.vertex_count()
                << " states (H_" << p << "^" << n << "), budget is " << budget
                << " vertices; raising --budget-vertices is a deliberate "
                   "opt-in\n";
      return kExitRefusal;
    }
    auto sg = hanoiflow::SmallGraph::from_hanoi(g);
    auto tw = hanoiflow::exact_treewidth(sg, budget);
    if (format == "json") {
      ordered_json row;
      row["p"] = p;
      row["n"] = n;
      row["treewidth"] = tw.width;
      row["exhaustive"] = tw.exhaustive;
      row["elimination_order"] = tw.elimination_order;
      jout.push_back(row);
    } else {
      std::string order;
      for (int v : tw.elimination_order) {
        if (!order.empty()) order += ';';
        order += std::to_string(v);
      }
      sink.out() << p << ',' << n << ',' << tw.width << ','
                 << (tw.exhaustive ? 1 : 0) << ',' << order << '\n';
    }
  }
  if (format == "json") sink.out() << jout.dump(2) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

int cmd_verify(bool quick, bool has_instance, int p, const NRange& nr,
               std::uint64_t seed, int workers, const std::string& format,
               const std::string& out_path) {
  Sink sink(out_path);
  hanoiflow::VerifyOptions opt;
  opt.seed = seed;
  opt.workers = workers;
  std::vector<hanoiflow::CheckResult> results;
  if (has_instance) {
    // Targeted verification of one instance: structure plus the expansion
    // sandwich, which needs the exact oracle.
    for (int n = nr.lo; n <= nr.hi; ++n) {
      hanoiflow::HanoiGraph g(p, n);
      if (g.vertex_count() > kExpansionBudget) {
        std::cerr << "refusal: exact oracle budget exceeded (H_" << p << "^"
                  << n << " has " << g.vertex_count()
                  << " vertices, budget " << kExpansionBudget
                  << "); run `flow --p " << p << " --n " << n
                  << "` for bounds-only mode\n";
        return kExitRefusal;
      }
      hanoiflow::CheckResult c;
      c.id = 0;
      c.name = "instance p=" + std::to_string(p) + " n=" + std::to_string(n);
      auto built = hanoiflow::build_uniform_mcf<Rational>(p, n);
      Rational rho = built.report.normalized_congestion;
      Rational lower = hanoiflow::expansion_lower_bound(rho);
      auto h = hanoiflow::exact_edge_expansion(
          hanoiflow::SmallGraph::from_hanoi(g), kExpansionBudget, workers);
      Rational upper = hanoiflow::witness_cut_bound(p, n);
      c.passed = lower <= h.value && h.value <= upper;
      c.details.push_back("rho=" + rho.str() + " lower=" + lower.str() +
                          " h=" + h.value.str() + " witness=" + upper.str());
      results.push_back(c);
    }
  } else {
    results = quick ? hanoiflow::run_quick(opt) : hanoiflow::run_acceptance(opt);
  }
  bool all = true;
  if (format == "json") {
    ordered_json jout = ordered_json::array();
    for (const auto& c : results) {
      all = all && c.passed;
      ordered_json row;
      row["id"] = c.id;
      row["name"] = c.name;
      row["passed"] = c.passed;
      row["seconds"] = fmt_double(c.seconds);
      row["details"] = c.details;
      jout.push_back(row);
    }
    sink.out() << jout.dump(2) << '\n';
  } else {
    for (const auto& c : results) {
      all = all && c.passed;
      sink.out() << (c.passed ? "[PASS] " : "[FAIL] ")
                 << (c.id > 0 ? std::to_string(c.id) + " " : std::string())
                 << c.name << " (" << fmt_double(c.seconds) << "s)\n";
      for (const auto& d : c.details) sink.out() << "    " << d << '\n';
    }
    sink.out() << (all ? "all checks passed\n" : "CHECK FAILURES\n");
  }
  return all ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hanoi graph flows: recursive multicommodity-flow "
               "construction, congestion ledgers, and exact "
               "expansion/treewidth oracles"};
  app.require_subcommand(1);

  int p = 3;
  std::string n_spec = "1";
  bool exact = false;
  bool per_commodity = false;
  std::uint64_t budget_vertices = 0;
  std::uint64_t seed = 0;
  int workers = 0;
  std::string format = "csv";
  std::string out_path;
  std::string dump_path;
  bool quick = false;
  bool full = false;

  auto add_common = [&](CLI::App* cmd, bool with_n = true) {
    cmd->add_option("--p", p, "peg count (>= 3)")->check(CLI::Range(3, 16));
    if (with_n)
      cmd->add_option("--n", n_spec, "disc count, single or range a..b");
    cmd->add_option("--budget-vertices", budget_vertices,
                    "override the command's vertex budget");
    cmd->add_option("--seed", seed, "seed for randomized helpers");
    cmd->add_option("--workers", workers,
                    "parallel workers (default: all cores)");
    cmd->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", out_path, "write output to this file");
  };

  CLI::App* graph = app.add_subcommand("graph", "structural report");
  add_common(graph);

  CLI::App* flow = app.add_subcommand(
      "flow", "build the uniform multicommodity flow and its ledger");
  add_common(flow);
  flow->add_flag("--exact", exact, "exact rational arithmetic");
  flow->add_flag("--per-commodity", per_commodity,
                 "validate every per-source chain (tiny graphs only)");
  flow->add_option("--dump-flow", dump_path,
                   "write the aggregate arc records to this file");

  CLI::App* verify = app.add_subcommand("verify", "run the verification suite");
  add_common(verify);
  verify->add_flag("--quick", quick, "structure and codec invariants only");
  verify->add_flag("--full", full, "the complete suite (default)");

  CLI::App* expansion =
      app.add_subcommand("expansion", "exact edge and vertex expansion");
  add_common(expansion);

  CLI::App* treewidth =
      app.add_subcommand("treewidth", "exact treewidth with certificate");
  add_common(treewidth);

  CLI11_PARSE(app, argc, argv);

  if (workers <= 0) workers = default_workers();

  try {
    NRange nr = parse_n_range(n_spec);
    if (graph->parsed())
      return cmd_graph(p, nr,
                       budget_vertices ? budget_vertices
                                       : hanoiflow::HanoiGraph::kDefaultCacheBudget,
                       format, out_path);
    if (flow->parsed()) {
      std::uint64_t commodity_budget =
          budget_vertices ? budget_vertices : hanoiflow::kPerCommodityBudget;
      std::uint64_t build_budget =
          budget_vertices ? budget_vertices : kBuildBudget;
      if (exact)
        return run_flow<Rational>(p, nr, per_commodity, build_budget,
                                  commodity_budget, format, out_path,
                                  dump_path, workers);
      return run_flow<double>(p, nr, per_commodity, build_budget,
                              commodity_budget, format, out_path, dump_path,
                              workers);
    }
    if (verify->parsed()) {
      bool has_instance = verify->count("--p") > 0 || verify->count("--n") > 0;
      return cmd_verify(quick && !full, has_instance, p, nr, seed, workers,
                        format, out_path);
    }
    if (expansion->parsed())
      return cmd_expansion(
          p, nr,
          budget_vertices ? static_cast<int>(budget_vertices)
                          : kExpansionBudget,
          format, out_path, workers);
    if (treewidth->parsed())
      return cmd_treewidth(p, nr,
                           budget_vertices ? static_cast<int>(budget_vertices)
                                           : kTreewidthBudget,
                           format, out_path);
  } catch (const std::length_error& e) {
    std::cerr << "refusal: " << e.what() << '\n';
    return kExitRefusal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRefusal;
  }
  return 0;
}
