#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "crossinspect/evm.hpp"
#include "crossinspect/evm_lift.hpp"
#include "crossinspect/ir_validate.hpp"
#include "crossinspect/keccak.hpp"
#include "crossinspect/manifest.hpp"

using namespace crossinspect;
using namespace crossinspect::evm;

namespace {

std::string fixture(const std::string& name) { return read_file(std::string(CROSSINSPECT_FIXTURES) + "/" + name); }

Cfg cfg_of(const Bytes& code, const std::string& name = "T") {
  auto d = disassemble({name, code});
  return recover_blocks(d.ops);
}

}  // namespace

TEST(Keccak, KnownVectors) {
  EXPECT_EQ(encode_hex(keccak256(std::string_view(""))),
            "c5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470");
  EXPECT_EQ(encode_hex(keccak256(std::string_view("abc"))),
            "4e03657aea45a94fc7d47ba826c8d667c0d1e6e33a64a036ec44f58fa12d6c45");
  EXPECT_EQ(function_selector("transfer(address,uint256)"), 0xa9059cbbu);
  EXPECT_EQ(function_selector("balanceOf(address)"), 0x70a08231u);
  EXPECT_EQ(selector_hex(0xa9059cbb), "0xa9059cbb");
}

TEST(Keccak, MultiBlockInput) {
  // 200 bytes spans two 136-byte rate blocks.
  const std::string a(200, 'a');
  EXPECT_EQ(encode_hex(keccak256(std::string_view(a))).size(), 64u);
  EXPECT_NE(keccak256(std::string_view(a)), keccak256(std::string_view(a.substr(1))));
}

TEST(Hex, DecodeAcceptsPrefixAndWhitespace) {
  EXPECT_EQ(decode_hex("0x60 01\n56"), (Bytes{0x60, 0x01, 0x56}));
  EXPECT_EQ(encode_hex(decode_hex("DEADbeef")), "deadbeef");
}

TEST(Hex, RejectsMalformed) {
  EXPECT_THROW(decode_hex("0x123"), Error);
  EXPECT_THROW(decode_hex("zz"), Error);
}

TEST(Disassembler, EmptyCodeIsAnError) {
  EXPECT_THROW(disassemble({"E", {}}), Error);
}

TEST(Disassembler, RoundTripsRandomBytecode) {
  std::mt19937 rng(7);
  for (int iter = 0; iter < 50; ++iter) {
    Bytes code(1 + rng() % 300);
    for (auto& b : code) b = static_cast<std::uint8_t>(rng());
    const auto d = disassemble({"R", code});
    EXPECT_EQ(serialize(d.ops), code) << "iteration " << iter;
    std::size_t off = 0;
    for (const auto& op : d.ops) {
      ASSERT_EQ(op.offset, off);
      off += op.size();
    }
    EXPECT_EQ(off, code.size());
  }
}

TEST(Disassembler, TruncatedPushIsPaddedWithWarning) {
  const auto d = disassemble({"T", {0x60, 0x01, 0x62, 0xaa}});
  ASSERT_EQ(d.ops.size(), 2u);
  EXPECT_EQ(d.ops[1].immediate, (Bytes{0xaa, 0x00, 0x00}));
  EXPECT_EQ(d.ops[1].missing, 2u);
  ASSERT_EQ(d.diagnostics.size(), 1u);
  EXPECT_EQ(d.diagnostics[0].code, "TruncatedPush");
  EXPECT_EQ(serialize(d.ops), (Bytes{0x60, 0x01, 0x62, 0xaa}));
}

TEST(Assembler, FixtureHexMatchesSource) {
  for (const std::string name : {"dispatcher_2fn", "fig2_auction", "fig2_fundshandler"}) {
    auto hex = fixture(name + ".hex");
    EXPECT_EQ(decode_hex(hex), assemble(fixture(name + ".asm"))) << name;
  }
}

TEST(Assembler, RejectsUnknownMnemonicAndLabel) {
  EXPECT_THROW(assemble("FROB"), Error);
  EXPECT_THROW(assemble("PUSH2 @nowhere JUMP"), Error);
}

// Random programs of JUMPDEST-headed blocks whose jump targets are built from
// pushed constants, sometimes shuffled through DUP/SWAP/POP. The generator
// knows every edge; recovery must find exactly those from reachable blocks.
TEST(BlockRecovery, MatchesGeneratorEdgesOnPushJumpPrograms) {
  std::mt19937 rng(11);
  for (int iter = 0; iter < 30; ++iter) {
    const std::size_t n = 3 + rng() % 10;
    std::ostringstream src;
    std::set<std::pair<std::size_t, std::size_t>> expected;
    for (std::size_t i = 0; i < n; ++i) {
      src << "L" << i << ": JUMPDEST\n";
      if (i + 1 == n) {
        src << "STOP\n";
        continue;
      }
      const std::size_t t = rng() % n;
      switch (rng() % 4) {
        case 0:
          src << "PUSH2 @L" << t << " JUMP\n";
          expected.insert({i, t});
          break;
        case 1:
          src << "CALLVALUE PUSH2 @L" << t << " JUMPI\n";
          expected.insert({i, t});
          expected.insert({i, i + 1});
          break;
        case 2:
          src << "PUSH2 @L" << t << " PUSH1 7 SWAP1 DUP2 POP SWAP1 POP JUMP\n";
          expected.insert({i, t});
          break;
        default:
          src << "PUSH1 1 POP\n";  // falls through
          expected.insert({i, i + 1});
      }
    }
    const auto cfg = cfg_of(assemble(src.str()));
    ASSERT_EQ(cfg.blocks.size(), n) << src.str();
    std::set<std::size_t> reach{0};
    std::vector<std::size_t> work{0};
    while (!work.empty()) {
      auto b = work.back();
      work.pop_back();
      for (const auto& [s, d] : expected)
        if (s == b && reach.insert(d).second) work.push_back(d);
    }
    std::set<std::pair<std::size_t, std::size_t>> got, want;
    for (const auto& e : cfg.edges())
      if (reach.count(e.first)) got.insert(e);
    for (const auto& e : expected)
      if (reach.count(e.first)) want.insert(e);
    EXPECT_EQ(got, want) << "iteration " << iter << "\n" << src.str();
  }
}

TEST(BlockRecovery, UnknownJumpTargetIsReported) {
  const auto cfg = cfg_of(assemble("PUSH1 0 CALLDATALOAD JUMP\nJUMPDEST STOP"));
  EXPECT_TRUE(cfg.blocks[0].unknown_target);
}

TEST(Dispatcher, RecognizesTwoSelectorsAndFallback) {
  const auto cfg = cfg_of(decode_hex(fixture("dispatcher_2fn.hex")), "Token");
  const auto t = identify_functions(cfg, {{0xa9059cbb, "transfer"}, {0x70a08231, "balanceOf"}});
  EXPECT_FALSE(t.no_dispatcher);
  ASSERT_EQ(t.entries.size(), 2u);
  EXPECT_EQ(t.entries[0].function_name, "transfer");
  EXPECT_EQ(t.entries[0].selector, 0xa9059cbbu);
  EXPECT_EQ(t.entries[1].function_name, "balanceOf");
  ASSERT_TRUE(t.fallback.has_value());
  EXPECT_EQ(t.fallback->function_name, "fallback");
}

TEST(Dispatcher, UnnamedSelectorUsesHex) {
  const auto cfg = cfg_of(decode_hex(fixture("dispatcher_2fn.hex")), "Token");
  const auto t = identify_functions(cfg);
  ASSERT_EQ(t.entries.size(), 2u);
  EXPECT_EQ(t.entries[0].function_name, "0xa9059cbb");
}

TEST(Dispatcher, NoCalldataMeansSingleFunction) {
  const auto cfg = cfg_of(assemble("PUSH1 1 PUSH1 0 SSTORE STOP"));
  const auto t = identify_functions(cfg);
  EXPECT_TRUE(t.no_dispatcher);
  ASSERT_EQ(t.all().size(), 1u);
  EXPECT_EQ(t.fallback->entry_block, 0u);
  ASSERT_FALSE(t.diagnostics.empty());
  EXPECT_EQ(t.diagnostics[0].code, "NoDispatcher");
}

namespace {

LiftResult lift_fixture(const std::string& hex, const std::string& name, const NameMap& names) {
  RawBytecode raw{name, decode_hex(fixture(hex))};
  const auto cfg = recover_blocks(disassemble(raw).ops);
  return lift_to_ir(cfg, identify_functions(cfg, names), raw, {names});
}

std::size_t count_op(const Function& f, Opcode op) {
  std::size_t n = 0;
  for (const auto& b : f.blocks)
    for (const auto& i : b.instructions) n += i.op == op;
  return n;
}

}  // namespace

TEST(Lifter, DispatcherFunctionsValidate) {
  const auto r = lift_fixture("dispatcher_2fn.hex", "Token", {{0xa9059cbb, "transfer"}, {0x70a08231, "balanceOf"}});
  std::set<std::string> names;
  for (const auto& f : r.contract.functions) names.insert(f.name);
  EXPECT_EQ(names, (std::set<std::string>{"transfer", "balanceOf", "fallback"}));
  Universe u{{r.contract}};
  canonicalize(u);
  for (const auto& d : validate(u)) EXPECT_NE(d.severity, Diagnostic::Severity::Error) << d.code << " " << d.message;
}

TEST(Lifter, MappingAccessesNormalizeToSlot) {
  const auto r = lift_fixture("dispatcher_2fn.hex", "Token", {{0xa9059cbb, "transfer"}, {0x70a08231, "balanceOf"}});
  const auto* sv = r.contract.find_state_var("stor_0");
  ASSERT_NE(sv, nullptr);
  EXPECT_EQ(sv->kind, StateKind::Mapping);
  for (const auto& f : r.contract.functions)
    for (const auto& b : f.blocks)
      for (const auto& i : b.instructions)
        if (i.op == Opcode::SLOAD || i.op == Opcode::SSTORE) {
          EXPECT_EQ(i.state_ref, "stor_0") << f.name;
          EXPECT_NE(i.storage_key(), nullptr) << f.name;
        }
}

// Storage and call instructions are neither lost nor invented by lifting.
TEST(Lifter, ConservesStorageAndCallOps) {
  for (const auto& [hex, name] : std::vector<std::pair<std::string, std::string>>{
           {"dispatcher_2fn.hex", "Token"}, {"fig2_auction.hex", "Auction"}, {"fig2_fundshandler.hex", "FundsHandler"}}) {
    RawBytecode raw{name, decode_hex(fixture(hex))};
    const auto cfg = recover_blocks(disassemble(raw).ops);
    const auto r = lift_to_ir(cfg, identify_functions(cfg), raw);
    for (const auto& f : r.contract.functions) {
      std::size_t sload = 0, sstore = 0, calls = 0;
      for (auto bi : r.function_blocks.at(f.name)) {
        if (r.unanalyzable.count({f.name, bi})) continue;
        for (auto k = cfg.blocks[bi].first_op; k < cfg.blocks[bi].end_op; ++k) {
          const auto m = cfg.ops[k].mnemonic();
          sload += m == "SLOAD";
          sstore += m == "SSTORE";
          calls += m == "CALL" || m == "STATICCALL" || m == "DELEGATECALL";
        }
      }
      EXPECT_EQ(count_op(f, Opcode::SLOAD), sload) << name << "." << f.name;
      EXPECT_EQ(count_op(f, Opcode::SSTORE), sstore) << name << "." << f.name;
      EXPECT_EQ(count_op(f, Opcode::CALL) + count_op(f, Opcode::CALLVALUECALL) + count_op(f, Opcode::STATICCALL) +
                    count_op(f, Opcode::DELEGATECALL),
                calls)
          << name << "." << f.name;
    }
  }
}

TEST(Lifter, MappingKeyHashedInEarlierBlockKeepsSlot) {
  const auto r = lift_fixture("fig2_fundshandler.hex", "FundsHandler",
                              {{0x99562d5b, "recordBid"}, {0x75b0b625, "finalizeAuction"}});
  const auto* f = r.contract.find_function("recordBid");
  ASSERT_NE(f, nullptr);
  bool wrote_refunds = false;
  for (const auto& b : f->blocks)
    for (const auto& i : b.instructions)
      if (i.op == Opcode::SSTORE) {
        EXPECT_NE(i.state_ref, "stor_dynamic");
        if (i.state_ref == "stor_3" && i.storage_key()) wrote_refunds = true;
      }
  EXPECT_TRUE(wrote_refunds);
}
