#include <gtest/gtest.h>

#include <random>

#include "crossinspect/detect.hpp"
#include "crossinspect/ir_text.hpp"
#include "crossinspect/manifest.hpp"
#include "oracles.hpp"

using namespace crossinspect;

namespace {

Universe fixture_universe(const std::string& name) {
  return parse_ir(read_file(std::string(CROSSINSPECT_FIXTURES) + "/" + name));
}

std::set<std::pair<std::string, std::string>> indicators_of(const Universe& u) {
  const ProgramIndex idx(u);
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& i : detect_indicators(idx, build_callgraph(idx)))
    out.insert({std::string(rule_name(i.rule)), idx.block(i.block).id});
  return out;
}

Universe one_function(const std::string& body, const std::string& vars = "") {
  return parse_ir("ir-version 1\ncontract A\n" + vars + "function f public(x:uint256)\n" + body);
}

}  // namespace

TEST(Indicators, Fig2ExactSet) {
  const auto got = indicators_of(fixture_universe("fig2.ir"));
  EXPECT_TRUE(got.count({"Timestamp", "FundsHandler.recordBid.b2"}));
  EXPECT_TRUE(got.count({"Timestamp", "FundsHandler.finalizeAuction.b2"}));
  EXPECT_TRUE(got.count({"Reentrancy", "FundsHandler.finalizeAuction.b8"}));
  // Both arithmetic sites in FundsHandler carry the generated check.
  for (const auto& [rule, block] : got) EXPECT_NE(rule, "Overflow") << block;
  EXPECT_EQ(got.size(), 3u);
}

TEST(Indicators, Fig11DosAndMutation) {
  EXPECT_EQ(indicators_of(fixture_universe("fig11.ir")),
            (std::set<std::pair<std::string, std::string>>{{"DoS", "Test2.bet.b1"}}));
  EXPECT_TRUE(indicators_of(fixture_universe("fig11_noloop.ir")).empty());
}

TEST(Indicators, ReentrancyNeedsAnExternalCall) {
  // Value transfer to a contract in the same universe is still external.
  const auto u = parse_ir(
      "ir-version 1\ncontract A\nfunction f public()\nblock b0\n  CALLVALUECALL 1 B.g\n  STOP\n"
      "contract B\nfunction g public()\nblock b0\n  STOP\n");
  EXPECT_EQ(indicators_of(u), (std::set<std::pair<std::string, std::string>>{{"Reentrancy", "A.f.b0"}}));
  // A self call is not.
  const auto self = parse_ir(
      "ir-version 1\ncontract A\nfunction f public()\nblock b0\n  CALLVALUECALL 1 A.g\n  STOP\n"
      "function g public()\nblock b0\n  STOP\n");
  EXPECT_TRUE(indicators_of(self).empty());
}

TEST(Indicators, TimestampOnlyWhenItDecidesABranch) {
  EXPECT_TRUE(indicators_of(one_function("block b0\n  t = TIMESTAMP\n  SSTORE s t\n  STOP\n",
                                         "statevar s slot=0 kind=scalar\n"))
                  .empty());
  EXPECT_EQ(indicators_of(one_function("block b0\n  n = NUMBER\n  c = ISZERO n\n  JUMPI c b1 b2\n"
                                       "block b1\n  STOP\nblock b2\n  STOP\n")),
            (std::set<std::pair<std::string, std::string>>{{"Timestamp", "A.f.b0"}}));
}

TEST(Indicators, OverflowCheckPattern) {
  const std::string checked =
      "block b0\n  y = ADD x 5\n  bad = LT y x\n  JUMPI bad b1 b2\nblock b1\n  REVERT\nblock b2\n  RETURN y\n";
  EXPECT_TRUE(indicators_of(one_function(checked)).empty());
  // Lifted code copies the condition before branching.
  const std::string copied =
      "block b0\n  y = ADD x 5\n  bad = LT y x\n  ok = ISZERO bad\n  c = PHI ok\n  JUMPI c b2 b1\n"
      "block b1\n  REVERT\nblock b2\n  RETURN y\n";
  EXPECT_TRUE(indicators_of(one_function(copied)).empty());
  // Comparison against an unrelated value is not the generated check.
  const std::string unrelated =
      "block b0\n  y = ADD x 5\n  bad = LT y 7\n  JUMPI bad b1 b2\nblock b1\n  REVERT\nblock b2\n  RETURN y\n";
  EXPECT_EQ(indicators_of(one_function(unrelated)),
            (std::set<std::pair<std::string, std::string>>{{"Overflow", "A.f.b0"}}));
  // A check that does not guard a revert does not count.
  const std::string no_revert =
      "block b0\n  y = MUL x x\n  bad = LT y x\n  JUMPI bad b1 b2\nblock b1\n  STOP\nblock b2\n  RETURN y\n";
  EXPECT_EQ(indicators_of(one_function(no_revert)),
            (std::set<std::pair<std::string, std::string>>{{"Overflow", "A.f.b0"}}));
}

TEST(Loops, NaturalLoopBodies) {
  const auto u = one_function(
      "block b0\n  JUMP b1\nblock b1\n  c = CALLER\n  JUMPI c b2 b4\nblock b2\n  JUMPI c b3 b1\n"
      "block b3\n  JUMP b1\nblock b4\n  STOP\n");
  const ProgramIndex idx(u);
  const auto loops = find_loops(idx, 0);
  ASSERT_EQ(loops.size(), 1u);
  EXPECT_EQ(idx.block(loops[0].header).id, "A.f.b1");
  std::set<std::string> body;
  for (auto b : loops[0].body) body.insert(idx.block(b).id);
  EXPECT_EQ(body, (std::set<std::string>{"A.f.b1", "A.f.b2", "A.f.b3"}));
}

TEST(Loops, SelfLoopAndStraightLine) {
  const auto u = one_function("block b0\n  c = CALLER\n  JUMPI c b0 b1\nblock b1\n  STOP\n");
  const ProgramIndex idx(u);
  const auto loops = find_loops(idx, 0);
  ASSERT_EQ(loops.size(), 1u);
  EXPECT_EQ(loops[0].body, (std::set<std::size_t>{0}));
  EXPECT_TRUE(find_loops(ProgramIndex(one_function("block b0\n  STOP\n")), 0).empty());
}

TEST(Pruning, DisjointComponents) {
  CallGraph cg;
  cg.edges[{0, 1}] = CallEdgeKind::CrossContract;
  cg.edges[{2, 3}] = CallEdgeKind::CrossContract;
  cg.edges[{4, kNone}] = CallEdgeKind::CrossContract;
  EXPECT_EQ(prune_wcc(5, cg, {0, 2}, {1, 4}), (std::set<std::size_t>{0, 1}));
  EXPECT_EQ(prune_wcc(5, cg, {4}, {4}), (std::set<std::size_t>{4}));
  EXPECT_TRUE(prune_wcc(5, cg, {}, {0}).empty());
}

TEST(Pruning, Fig2KeepsAllFunctions) {
  const auto u = fixture_universe("fig2.ir");
  const ProgramIndex idx(u);
  const auto cg = build_callgraph(idx);
  std::set<std::size_t> entries{0, 1, 2, 3}, ind;
  for (const auto& i : detect_indicators(idx, cg)) ind.insert(idx.block(i.block).fn);
  EXPECT_EQ(prune_wcc(idx.function_count(), cg, entries, ind), entries);
}

TEST(Pruning, MatchesUnionFindOracle) {
  std::mt19937 rng(99);
  for (int iter = 0; iter < 200; ++iter) {
    const std::size_t n = 1 + rng() % 30;
    CallGraph cg;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    const auto m = rng() % (2 * n);
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t a = rng() % n, b = rng() % (n + 1);
      edges.push_back({a, b == n ? kNone : b});
      cg.edges[edges.back()] = CallEdgeKind::CrossContract;
    }
    std::set<std::size_t> entries, ind;
    for (std::size_t f = 0; f < n; ++f) {
      if (rng() % 4 == 0) entries.insert(f);
      if (rng() % 5 == 0) ind.insert(f);
    }
    EXPECT_EQ(prune_wcc(n, cg, entries, ind), oracle::wcc_keep(n, edges, entries, ind)) << "iteration " << iter;
  }
}

TEST(Indicators, DeterministicAndSorted) {
  const auto u = fixture_universe("fig2.ir");
  const ProgramIndex idx(u);
  const auto cg = build_callgraph(idx);
  const auto a = detect_indicators(idx, cg), b = detect_indicators(idx, cg);
  EXPECT_EQ(a, b);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end(), [](const Indicator& x, const Indicator& y) {
    return std::tie(x.block, x.first_instr) < std::tie(y.block, y.first_instr);
  }));
}
