#include <gtest/gtest.h>

#include <random>

#include "crossinspect/ir_text.hpp"
#include "crossinspect/manifest.hpp"
#include "crossinspect/taint.hpp"
#include "oracles.hpp"
#include "random_program.hpp"
#include "taint_setup.hpp"

using namespace crossinspect;

namespace {

Universe fixture_universe(const std::string& name) {
  return parse_ir(read_file(std::string(CROSSINSPECT_FIXTURES) + "/" + name));
}

using oracle::Key;
using oracle::named;

// Public parameters and environment reads of public functions, plus the
// parameters of anything called from another contract.
std::set<Key> oracle_sources(const Universe& u) {
  std::set<Key> out;
  std::set<std::string> cross;
  for (const auto& c : u.contracts)
    for (const auto& f : c.functions)
      for (const auto& b : f.blocks)
        for (const auto& in : b.instructions)
          if (is_call(in.op) && in.op != Opcode::INTERNALCALL && in.target->contract != c.name)
            cross.insert(in.target->contract + "." + in.target->function);
  for (const auto& c : u.contracts)
    for (const auto& f : c.functions) {
      const auto fid = function_id(c, f);
      const bool pub = f.visibility == Visibility::Public;
      if (pub || cross.count(fid))
        for (const auto& p : f.params) out.insert({fid, p.name});
      if (!pub) continue;
      for (const auto& b : f.blocks)
        for (const auto& in : b.instructions)
          if (in.op == Opcode::CALLDATALOAD || in.op == Opcode::CALLVALUE || in.op == Opcode::CALLER)
            out.insert({fid, *in.result});
    }
  return out;
}

std::set<std::string> state_ids(const ProgramIndex& idx, const std::set<std::size_t>& s) {
  std::set<std::string> out;
  for (auto v : s) out.insert(idx.state(v).id);
  return out;
}

}  // namespace

TEST(TaintSources, MatchScanOracle) {
  std::mt19937 rng(31);
  for (int iter = 0; iter < 20; ++iter) {
    const auto u = parse_ir(testgen::random_program(rng));
    const ProgramIndex idx(u);
    EXPECT_EQ(named(idx, seed_sources(idx, build_callgraph(idx))), oracle_sources(u)) << "iteration " << iter;
  }
}

TEST(TaintSources, Fig2SeedsIncludeCrossContractParameter) {
  const auto u = fixture_universe("fig2.ir");
  const ProgramIndex idx(u);
  const auto s = named(idx, seed_sources(idx, build_callgraph(idx)));
  EXPECT_TRUE(s.count({"FundsHandler.recordBid", "bidder"}));
  EXPECT_TRUE(s.count({"Auction.bid", "v"}));
  EXPECT_TRUE(s.count({"Auction.bid", "a"}));
  EXPECT_FALSE(s.count({"Auction.bid", "hb"}));
}

// With every function active and no revert edges, the closure equals a plain
// fixpoint over the instruction semantics.
TEST(TaintClosure, MatchesFixpointOracleOnLoopFreePrograms) {
  std::mt19937 rng(17);
  TaintConfig cfg;
  cfg.revert_edges = false;
  for (int iter = 0; iter < 60; ++iter) {
    const auto u = parse_ir(testgen::random_program(rng));
    const ProgramIndex idx(u);
    const auto cg = build_callgraph(idx);
    const TaintGraph g(idx, cg, {}, cfg);
    const auto src = seed_sources(idx, cg);
    std::set<std::size_t> all;
    for (std::size_t f = 0; f < idx.function_count(); ++f) all.insert(f);
    const auto r = propagate_serial(g, make_seeds(g, src, all), cfg);
    const auto want = oracle::taint_closure(u, named(idx, src));
    std::set<Key> got;
    for (std::size_t n = 0; n < g.size(); ++n)
      if (r.state.tainted[n] && g.node(n).kind == TaintNodeKind::Value) got.insert({idx.fn(g.node(n).fn).id, g.node(n).value});
    EXPECT_EQ(got, want.values) << "iteration " << iter;
    EXPECT_EQ(state_ids(idx, tainted_state_vars(g, r.state)), want.state) << "iteration " << iter;
    EXPECT_TRUE(r.diagnostics.empty());
  }
}

TEST(TaintClosure, NoSeedsNoTaint) {
  const auto u = fixture_universe("fig2.ir");
  const ProgramIndex idx(u);
  const auto cg = build_callgraph(idx);
  const TaintGraph g(idx, cg, extract_revert_deps(idx, extract_rw_deps(idx)).deps);
  const auto r = propagate_serial(g, make_seeds(g, {}, {}));
  EXPECT_EQ(r.state.tainted_count(), 0u);
  EXPECT_EQ(r.counters.fired_edges, 0u);
}

TEST(TaintClosure, InactiveGuardBlocksEdges) {
  const auto u = fixture_universe("fig10.ir");
  const ProgramIndex idx(u);
  const auto cg = build_callgraph(idx);
  const TaintGraph g(idx, cg, {});
  const auto v1 = idx.find_fn("Flow.v1");
  // x flows into `a` only while v1 is active.
  auto r = propagate_serial(g, make_seeds(g, {{v1, "x"}}, {}));
  EXPECT_EQ(r.state.tainted_count(), 1u);
  r = propagate_serial(g, make_seeds(g, {{v1, "x"}}, {v1}));
  EXPECT_EQ(state_ids(idx, tainted_state_vars(g, r.state)), (std::set<std::string>{"Flow.a"}));
  r = propagate_serial(g, make_seeds(g, {{v1, "x"}}, {v1, idx.find_fn("Flow.v2")}));
  EXPECT_EQ(state_ids(idx, tainted_state_vars(g, r.state)), (std::set<std::string>{"Flow.a", "Flow.b", "Flow.c"}));
}

TEST(TaintClosure, IterationLimitIsReported) {
  const auto u = fixture_universe("fig2.ir");
  testgen::TaintSetup s(u, {.iteration_limit = 1});
  const auto r = s.serial();
  ASSERT_FALSE(r.diagnostics.empty());
  EXPECT_EQ(r.diagnostics[0].code, "IterationLimit");
  EXPECT_LT(r.state.tainted_count(), testgen::TaintSetup(u).serial().state.tainted_count());
}

TEST(TaintRevert, EdgesCarryTaintIntoGuardedFunction) {
  const auto u = fixture_universe("fig2.ir");
  const ProgramIndex idx(u);
  const auto cg = build_callgraph(idx);
  const auto rv = extract_revert_deps(idx, extract_rw_deps(idx)).deps;
  const auto bid = idx.find_fn("Auction.bid");
  const auto fin = idx.find_fn("FundsHandler.finalizeAuction");
  const TaintGraph with(idx, cg, rv);
  TaintConfig off;
  off.revert_edges = false;
  const TaintGraph without(idx, cg, rv, off);
  const auto a = propagate_serial(with, entry_seeds(with, cg, bid));
  const auto b = propagate_serial(without, entry_seeds(without, cg, bid), off);
  EXPECT_TRUE(a.state.active[fin]);
  EXPECT_FALSE(b.state.active[fin]);
  const auto sa = state_ids(idx, tainted_state_vars(with, a.state));
  const auto sb = state_ids(idx, tainted_state_vars(without, b.state));
  EXPECT_TRUE(sa.count("FundsHandler.itemOwner"));
  EXPECT_TRUE(sa.count("FundsHandler.seller"));
  EXPECT_FALSE(sb.count("FundsHandler.itemOwner"));
  EXPECT_TRUE(sb.count("FundsHandler.refunds"));
  EXPECT_TRUE(std::includes(sa.begin(), sa.end(), sb.begin(), sb.end()));
}

TEST(TaintRevert, FormatPathFollowsTheHop) {
  const auto u = fixture_universe("fig2.ir");
  const ProgramIndex idx(u);
  const auto cg = build_callgraph(idx);
  const auto rv = extract_revert_deps(idx, extract_rw_deps(idx)).deps;
  const TaintGraph g(idx, cg, rv);
  const auto st = propagate_serial(g, entry_seeds(g, cg, idx.find_fn("Auction.bid"))).state;
  const Path p{idx.find_block("Auction.bid.b0"), idx.find_block("FundsHandler.recordBid.b0"),
               idx.find_block("FundsHandler.recordBid.b2")};
  EXPECT_EQ(format_path(g, st, p, rv),
            "Auction.bid→FundsHandler.recordBid→[refunds]→FundsHandler.finalizeAuction→[seller,itemOwner]");
  // Without taint on the hop's state the path stops at the chain.
  const auto none = propagate_serial(g, make_seeds(g, {}, {})).state;
  EXPECT_EQ(format_path(g, none, p, rv), "Auction.bid→FundsHandler.recordBid");
}

TEST(TaintParallel, Fig10NeedsMergeRounds) {
  const auto u = fixture_universe("fig10.ir");
  const testgen::TaintSetup s(u);
  const auto serial = s.serial();
  const auto par = s.parallel(2, 0);
  EXPECT_EQ(par.state, serial.state);
  EXPECT_GT(par.counters.merge_iterations, 0u);
  EXPECT_GT(par.counters.pending_edges, 0u);
  EXPECT_EQ(tainted_state_vars(*s.graph, par.state).size(), 3u);
}

TEST(TaintParallel, EqualsSerialAcrossSchedules) {
  std::vector<Universe> cases;
  for (const auto* f : {"fig2.ir", "fig9.ir", "fig10.ir", "fig11.ir", "fig11_noloop.ir"})
    cases.push_back(fixture_universe(f));
  std::mt19937 rng(2024);
  for (int iter = 0; iter < 50; ++iter) {
    testgen::ProgramOptions o;
    o.loops = iter % 2;
    cases.push_back(parse_ir(testgen::random_program(rng, o)));
  }
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const testgen::TaintSetup s(cases[c]);
    const auto serial = s.serial();
    for (std::size_t w : {1u, 2u, 4u, 8u})
      for (std::uint64_t seed = 0; seed < 10; ++seed)
        ASSERT_EQ(s.parallel(w, seed).state, serial.state) << "case " << c << " workers " << w << " seed " << seed;
  }
}
