#include <gtest/gtest.h>

#include <random>

#include "crossinspect/ir_text.hpp"
#include "crossinspect/manifest.hpp"
#include "random_program.hpp"

using namespace crossinspect;

namespace {

std::string fig2_text() { return read_file(std::string(CROSSINSPECT_FIXTURES) + "/fig2.ir"); }

std::string first_error(const std::string& text) {
  auto u = parse_ir(text, {.validate = false});
  auto d = validate(u);
  return d.empty() ? "" : d.front().code;
}

std::string replace_once(std::string s, const std::string& from, const std::string& to) {
  auto at = s.find(from);
  EXPECT_NE(at, std::string::npos) << from;
  if (at != std::string::npos) s.replace(at, from.size(), to);
  return s;
}

}  // namespace

TEST(IrText, Fig2ParsesAndValidates) {
  const auto u = parse_ir(fig2_text());
  ASSERT_EQ(u.contracts.size(), 2u);
  EXPECT_EQ(u.contracts[0].name, "Auction");
  const auto* fh = u.find_contract("FundsHandler");
  ASSERT_NE(fh, nullptr);
  EXPECT_EQ(fh->find_state_var("refunds")->kind, StateKind::Mapping);
  const auto* rb = fh->find_function("recordBid");
  ASSERT_NE(rb, nullptr);
  ASSERT_EQ(rb->params.size(), 1u);
  EXPECT_EQ(rb->params[0].name, "bidder");
  EXPECT_EQ(rb->params[0].type, "address");
  EXPECT_TRUE(validate(u).empty());
}

TEST(IrText, Fig2RoundTrips) {
  const auto u = parse_ir(fig2_text());
  const auto text = serialize_ir(u);
  EXPECT_EQ(parse_ir(text), u);
  EXPECT_EQ(serialize_ir(parse_ir(text)), text);
}

TEST(IrText, RandomProgramsRoundTrip) {
  std::mt19937 rng(3);
  for (int iter = 0; iter < 40; ++iter) {
    testgen::ProgramOptions o;
    o.loops = iter % 2;
    const auto src = testgen::random_program(rng, o);
    Universe u;
    ASSERT_NO_THROW(u = parse_ir(src)) << src;
    const auto text = serialize_ir(u);
    EXPECT_EQ(parse_ir(text), u) << src;
    EXPECT_EQ(serialize_ir(parse_ir(text)), text);
  }
}

TEST(IrText, CanonicalizeSortsAndRenumbers) {
  const auto u = parse_ir(
      "ir-version 1\n"
      "contract Z\nstatevar b slot=1 kind=scalar\nstatevar a slot=0 kind=scalar\n"
      "function g public()\nblock b1\n  STOP\nblock b0\n  x = CALLER\n  JUMP b1\n"
      "contract A\nfunction f public()\nblock b0\n  STOP\n");
  EXPECT_EQ(u.contracts[0].name, "A");
  const auto& z = u.contracts[1];
  EXPECT_EQ(z.state_vars[0].name, "a");
  EXPECT_EQ(z.functions[0].blocks[0].label, "b0");
  EXPECT_EQ(z.functions[0].blocks[0].instructions[0].id, 0u);
  EXPECT_EQ(z.functions[0].blocks[1].instructions[0].id, 2u);
}

TEST(IrText, CallTargetsParse) {
  const auto u = parse_ir(
      "ir-version 1\ncontract A\nstatevar t slot=0 kind=scalar\n"
      "function f public(x:uint256)\nblock b0\n"
      "  a = SLOAD t\n  r = CALL *a.g x\n  CALLVALUECALL 5 *a\n  INTERNALCALL h\n  STOP\n"
      "function h private()\nblock b0\n  RETURN\n");
  const auto& ins = u.contracts[0].functions[0].blocks[0].instructions;
  EXPECT_EQ(ins[1].target->address_value, "a");
  EXPECT_EQ(ins[1].target->function, "g");
  EXPECT_EQ(ins[2].operands[0], Operand::literal("5"));
  EXPECT_EQ(ins[3].target->function, "h");
  EXPECT_EQ(u.contracts[0].functions[1].visibility, Visibility::Private);
}

TEST(IrText, SyntaxErrorsCarryLineNumbers) {
  try {
    parse_ir("ir-version 1\ncontract A\nfunction f public()\nblock b0\n  x = FROB 1\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code(), "UnknownOpcode");
    EXPECT_EQ(e.line(), 5u);
  }
  EXPECT_THROW(parse_ir("ir-version 2\n"), ParseError);
  EXPECT_THROW(parse_ir("contract A\n"), ParseError);
  EXPECT_THROW(parse_ir("ir-version 1\nblock b0\n"), ParseError);
  EXPECT_THROW(parse_ir("ir-version 1\ncontract A\nfunction f public()\nblock b0\n  JUMP b1 b2\n"), ParseError);
}

// Each mutation of fig2 breaks exactly one invariant.
TEST(IrValidate, MutationsAreRejected) {
  const auto base = fig2_text();
  EXPECT_EQ(first_error(base), "");
  EXPECT_EQ(first_error(replace_once(base, "  SSTORE bidders a\n  STOP\n", "  SSTORE bidders a\n")),
            "MissingTerminator");
  EXPECT_EQ(first_error(replace_once(base, "c = GT v hb", "c = GT v nope")), "UndefinedValueUse");
  EXPECT_EQ(first_error(replace_once(base, "JUMPI c b2 b3", "JUMPI c b2 b9")), "UnknownBlock");
  EXPECT_EQ(first_error(replace_once(base, "hb = SLOAD highestBid", "hb = SLOAD lowestBid")), "UnknownStateVar");
  EXPECT_EQ(first_error(replace_once(base, "statevar bidders slot=4", "statevar owner slot=4")), "DuplicateStateVar");
  EXPECT_EQ(first_error(replace_once(base, "statevar bidders slot=4", "statevar bidders slot=3")), "DuplicateSlot");
  try {
    parse_ir(replace_once(base, "kind=array", "kind=array label=Bogus"), {.validate = false});
    ADD_FAILURE() << "unknown category accepted";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code(), "UnknownCategory");
    EXPECT_EQ(e.line(), 7u);
  }
  EXPECT_EQ(first_error(replace_once(base, "  JUMP b1\nblock b1", "  STOP\nblock b1")), "UnreachableBlock");
  EXPECT_EQ(first_error(replace_once(base, "v = CALLVALUE", "CALLVALUE")), "MissingResult");
  EXPECT_EQ(first_error(replace_once(base, "SSTORE bidders a", "x = SSTORE bidders a")), "UnexpectedResult");
  EXPECT_EQ(first_error(replace_once(base, "c = GT v hb", "c = GT v")), "BadOperandCount");
}

TEST(IrValidate, UseMustBeDefinedOnEveryPath) {
  const std::string src =
      "ir-version 1\ncontract A\nfunction f public()\n"
      "block b0\n  c = CALLER\n  JUMPI c b1 b2\n"
      "block b1\n  x = CALLVALUE\n  JUMP b2\n"
      "block b2\n  RETURN x\n";
  EXPECT_EQ(first_error(src), "UndefinedValueUse");
  EXPECT_THROW(parse_ir(src), Error);
}

TEST(IrValidate, ValidatorThrowsThroughParse) {
  try {
    parse_ir(replace_once(fig2_text(), "hb = SLOAD highestBid", "hb = SLOAD lowestBid"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "UnknownStateVar");
    EXPECT_EQ(e.stage(), "ir");
  }
}
