// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Needs only the library and the fixture directory.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "crossinspect/ir_text.hpp"
#include "crossinspect/pipeline.hpp"
#include "crossinspect/report.hpp"
#include "fig7_graph.hpp"
#include "oracles.hpp"
#include "random_program.hpp"
#include "taint_setup.hpp"

using namespace crossinspect;

namespace {

const std::string kFixtures = CROSSINSPECT_FIXTURES;
const std::vector<std::string> kManifests = {"dispatcher_2fn.json", "empty.json",        "fig10.json",
                                             "fig11.json",          "fig11_noloop.json", "fig2.json",
                                             "fig2_bytecode.json",  "fig9.json"};
const std::vector<std::string> kIrFixtures = {"fig2.ir", "fig9.ir", "fig10.ir", "fig11.ir", "fig11_noloop.ir"};

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

Report analyze(const std::string& name, PipelineConfig cfg = {}) {
  const auto m = load_manifest(kFixtures + "/" + name);
  return run_manifest(m, config_from_manifest(m, cfg));
}

const Finding* find(const std::vector<Finding>& fs, Rule rule, const std::string& fn) {
  for (const auto& f : fs)
    if (f.rule == rule && f.function == fn) return &f;
  return nullptr;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

// A check records why it failed; the first failure wins.
struct Check {
  bool ok = true;
  std::string why;
  void expect(bool cond, const std::string& msg) {
    if (!cond && ok) {
      ok = false;
      why = msg;
    }
  }
};

int failures = 0;

void criterion(const std::string& name, const std::function<std::string(Check&)>& body) {
  Check c;
  std::string detail;
  try {
    detail = body(c);
  } catch (const std::exception& e) {
    c.expect(false, std::string("exception: ") + e.what());
  }
  if (!c.ok) ++failures;
  std::printf("%s  %-30s %s\n", c.ok ? "PASS" : "FAIL", name.c_str(), (c.ok ? detail : c.why).c_str());
}

// The pipeline's search graph for a universe: ICFG without return edges,
// entries at public functions, targets at indicators and exit blocks.
struct SearchCase {
  SearchGraph g;
  std::vector<std::size_t> entries, targets;
};

SearchCase search_case(const Universe& u) {
  const ProgramIndex idx(u);
  const auto cg = build_callgraph(idx);
  const auto icfg = build_icfg(idx, cg);
  SearchCase s;
  s.g.out.resize(icfg.node_count);
  for (const auto& e : icfg.edges)
    if (e.kind != IcfgEdgeKind::InterReturn) s.g.out[e.src].push_back(e.dst);
  for (auto& o : s.g.out) {
    std::sort(o.begin(), o.end());
    o.erase(std::unique(o.begin(), o.end()), o.end());
  }
  for (std::size_t f = 0; f < idx.function_count(); ++f)
    if (idx.fn(f).function->visibility == Visibility::Public && idx.fn(f).block_count)
      s.entries.push_back(idx.entry_block(f));
  for (const auto& i : detect_indicators(idx, cg)) s.targets.push_back(i.block);
  for (std::size_t b = 0; b < idx.block_count(); ++b)
    if (is_exit_block(*idx.block(b).block)) s.targets.push_back(b);
  return s;
}

}  // namespace

int main() {
  criterion("fig2-end-to-end", [](Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = analyze("fig2.json");
    const auto ms = ms_since(t0);
    const auto* ts = find(r.findings, Rule::Timestamp, "FundsHandler.recordBid");
    c.expect(ts != nullptr, "no Timestamp finding in recordBid");
    if (ts) {
      c.expect(ts->evidence == Evidence::Confirmed, "Timestamp finding not confirmed");
      c.expect(ts->path == "Auction.bid→FundsHandler.recordBid→[refunds]→FundsHandler.finalizeAuction→[seller,itemOwner]",
               "path was " + ts->path);
    }
    const auto* re = find(r.findings, Rule::Reentrancy, "FundsHandler.finalizeAuction");
    c.expect(re && re->block == "FundsHandler.finalizeAuction.b8", "no Reentrancy at finalizeAuction.b8");
    c.expect(ms < 1000, "took " + std::to_string(ms) + " ms");
    std::ostringstream os;
    os << r.findings.size() << " findings in " << ms << " ms";
    return os.str();
  });

  criterion("fig9-suppression", [](Check& c) {
    const auto on = analyze("fig9.json");
    c.expect(on.findings.empty(), "finding reported with labels");
    c.expect(on.suppressed.size() == 1 && on.suppressed[0].rule == Rule::Overflow, "Overflow not suppressed");
    const auto m = load_manifest(kFixtures + "/fig9.json");
    auto cfg = config_from_manifest(m);
    set_semantics(cfg, "off");
    const auto off = run_manifest(m, cfg);
    c.expect(find(off.findings, Rule::Overflow, "FreezableToken.balanceOf") != nullptr,
             "Overflow missing with semantics off");
    return "suppressed by " + (on.suppressed.empty() ? std::string("-") : *on.suppressed[0].suppressed_by) +
           "; reported with semantics off";
  });

  criterion("fig11-dos", [](Check& c) {
    const auto r = analyze("fig11.json");
    const auto* dos = find(r.findings, Rule::DoS, "Test2.bet");
    c.expect(dos && dos->block == "Test2.bet.b1", "no DoS at Test2.bet.b1");
    const auto mutated = analyze("fig11_noloop.json");
    c.expect(mutated.findings.empty(), "mutation still reports findings");
    return std::string("loop flagged, mutation clean");
  });

  criterion("serial-parallel-equivalence", [](Check& c) {
    std::vector<SearchCase> graphs;
    std::vector<Universe> programs;
    for (const auto& f : kIrFixtures) {
      programs.push_back(parse_ir(read_file(kFixtures + "/" + f)));
      graphs.push_back(search_case(programs.back()));
    }
    for (const auto* f : {"fig2_bytecode.json", "dispatcher_2fn.json"}) {
      programs.push_back(load_program(load_manifest(kFixtures + "/" + f)).universe);
      graphs.push_back(search_case(programs.back()));
    }
    const auto f7 = fig7::graph();
    graphs.push_back({f7.g, f7.entries, f7.targets});
    std::mt19937 rng(4242);
    for (int i = 0; i < 50; ++i) {
      const bool dag = i % 2 == 0;
      const std::size_t n = 2 + rng() % 39;
      SearchCase s;
      s.g = oracle::random_graph(rng, n, dag ? 0.12 : 0.06, dag);
      s.entries = oracle::sample(rng, n, 1 + rng() % 6);
      s.targets = oracle::sample(rng, n, 1 + rng() % 6);
      graphs.push_back(std::move(s));
      testgen::ProgramOptions o;
      o.loops = i % 2;
      programs.push_back(parse_ir(testgen::random_program(rng, o)));
    }
    std::size_t runs = 0;
    for (std::size_t k = 0; k < graphs.size(); ++k) {
      const auto& s = graphs[k];
      const auto serial = oracle::nonempty(find_paths_serial(s.g, s.entries, s.targets, {.max_paths_per_pair = 16}));
      for (std::size_t w : {1u, 2u, 4u, 8u})
        for (std::uint64_t seed = 0; seed < 10; ++seed, ++runs) {
          const auto par = find_paths_parallel(s.g, s.entries, s.targets,
                                               {.max_paths_per_pair = 16, .workers = w, .schedule_seed = seed});
          c.expect(oracle::nonempty(par) == serial, "paths differ on graph " + std::to_string(k));
        }
    }
    for (std::size_t k = 0; k < programs.size(); ++k) {
      const testgen::TaintSetup t(programs[k]);
      const auto serial = t.serial().state;
      for (std::size_t w : {1u, 2u, 4u, 8u})
        for (std::uint64_t seed = 0; seed < 10; ++seed, ++runs)
          c.expect(t.parallel(w, seed).state == serial, "taint differs on program " + std::to_string(k));
    }
    return std::to_string(graphs.size()) + " graphs, " + std::to_string(programs.size()) + " programs, " +
           std::to_string(runs) + " parallel runs";
  });

  criterion("memo-work-reduction", [](Check& c) {
    const auto f = fig7::graph();
    const auto serial = find_paths_serial(f.g, f.entries, f.targets);
    const auto par = find_paths_parallel(f.g, f.entries, f.targets, {.workers = 2});
    c.expect(oracle::nonempty(par) == oracle::nonempty(serial), "results differ");
    c.expect(par.counters.block_expansions < serial.counters.block_expansions, "no reduction");
    c.expect(par.counters.expansions_per_block[fig7::B8] == 1, "shared suffix expanded " +
                                                                   std::to_string(par.counters.expansions_per_block[fig7::B8]) +
                                                                   " times");
    return "expansions " + std::to_string(par.counters.block_expansions) + " < " +
           std::to_string(serial.counters.block_expansions) + ", B8 once (serial " +
           std::to_string(serial.counters.expansions_per_block[fig7::B8]) + ")";
  });

  criterion("sd-edge-ablation", [](Check& c) {
    PipelineConfig off;
    off.sd_edges = false;
    const auto with = analyze("fig2.json"), without = analyze("fig2.json", off);
    c.expect(without.counters.finding_tainted_functions < with.counters.finding_tainted_functions,
             "tainted function count did not drop");
    const auto* a = find(with.findings, Rule::Timestamp, "FundsHandler.recordBid");
    const auto* b = find(without.findings, Rule::Timestamp, "FundsHandler.recordBid");
    c.expect(a && b, "recordBid finding missing");
    if (a && b) {
      c.expect(contains(a->tainted_functions, "FundsHandler.finalizeAuction") &&
                   !contains(b->tainted_functions, "FundsHandler.finalizeAuction"),
               "finalizeAuction not lost");
      c.expect(contains(a->tainted_state_vars, "FundsHandler.itemOwner") &&
                   !contains(b->tainted_state_vars, "FundsHandler.itemOwner"),
               "itemOwner not lost");
    }
    return "tainted functions " + std::to_string(with.counters.finding_tainted_functions) + " -> " +
           std::to_string(without.counters.finding_tainted_functions);
  });

  criterion("oracle-equivalence", [](Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937 rng(9001);
    for (int i = 0; i < 100; ++i) {
      const std::size_t n = 2 + rng() % 39;
      const auto g = oracle::random_graph(rng, n, 0.15, true);
      const auto entries = oracle::sample(rng, n / 2 + 1, 3), targets = oracle::sample(rng, n, 4);
      const std::size_t cap = i % 3 == 0 ? 3 : 100000;
      const auto want = oracle::brute_force_paths(g, entries, targets, cap);
      c.expect(oracle::nonempty(find_paths_serial(g, entries, targets, {.max_paths_per_pair = cap})) == want,
               "serial paths differ on DAG " + std::to_string(i));
      c.expect(oracle::nonempty(find_paths_parallel(g, entries, targets, {.max_paths_per_pair = cap})) == want,
               "parallel paths differ on DAG " + std::to_string(i));
    }
    for (int i = 0; i < 100; ++i)
      c.expect(oracle::taint_matches(parse_ir(testgen::random_program(rng))), "taint differs on program " + std::to_string(i));
    for (int i = 0; i < 200; ++i) {
      const std::size_t n = 1 + rng() % 30;
      CallGraph cg;
      std::vector<std::pair<std::size_t, std::size_t>> edges;
      for (std::size_t k = 0, m = rng() % (2 * n); k < m; ++k) {
        const std::size_t a = rng() % n, b = rng() % (n + 1);
        edges.push_back({a, b == n ? kNone : b});
        cg.edges[edges.back()] = CallEdgeKind::CrossContract;
      }
      std::set<std::size_t> entries, ind;
      for (std::size_t f = 0; f < n; ++f) {
        if (rng() % 4 == 0) entries.insert(f);
        if (rng() % 5 == 0) ind.insert(f);
      }
      c.expect(prune_wcc(n, cg, entries, ind) == oracle::wcc_keep(n, edges, entries, ind),
               "pruning differs on graph " + std::to_string(i));
    }
    const auto ms = ms_since(t0);
    c.expect(ms < 60000, "took " + std::to_string(ms) + " ms");
    std::ostringstream os;
    os << "100 DAGs, 100 programs, 200 call graphs in " << ms << " ms";
    return os.str();
  });

  criterion("determinism", [](Check& c) {
    for (const auto& name : kManifests) {
      const auto a = render_json(analyze(name)), b = render_json(analyze(name));
      c.expect(a == b, name + " differs between runs");
      PipelineConfig serial;
      serial.serial = true;
      c.expect(render_json(analyze(name, serial)) == render_json(analyze(name, serial)), name + " serial differs");
    }
    return std::to_string(kManifests.size()) + " manifests byte-identical";
  });

  return failures == 0 ? 0 : 1;
}
