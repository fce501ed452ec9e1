#pragma once

// Three-address IR shared by every analysis stage.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace crossinspect {

enum class Opcode : std::uint8_t {
  CONST, ADD, SUB, MUL, DIV, LT, GT, EQ, ISZERO, AND, OR, SHA3,
  SLOAD, SSTORE, MLOAD, MSTORE, CALLDATALOAD, CALLER, CALLVALUE,
  TIMESTAMP, NUMBER, CALL, CALLVALUECALL, STATICCALL, DELEGATECALL,
  JUMP, JUMPI, RETURN, REVERT, STOP, PHI, INTERNALCALL,
};

inline constexpr std::array<std::string_view, 32> kOpcodeNames = {
    "CONST", "ADD", "SUB", "MUL", "DIV", "LT", "GT", "EQ", "ISZERO", "AND", "OR", "SHA3",
    "SLOAD", "SSTORE", "MLOAD", "MSTORE", "CALLDATALOAD", "CALLER", "CALLVALUE",
    "TIMESTAMP", "NUMBER", "CALL", "CALLVALUECALL", "STATICCALL", "DELEGATECALL",
    "JUMP", "JUMPI", "RETURN", "REVERT", "STOP", "PHI", "INTERNALCALL",
};

inline std::string_view opcode_name(Opcode op) { return kOpcodeNames[static_cast<std::size_t>(op)]; }

inline std::optional<Opcode> opcode_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kOpcodeNames.size(); ++i)
    if (kOpcodeNames[i] == name) return static_cast<Opcode>(i);
  return std::nullopt;
}

inline bool is_terminator(Opcode op) {
  return op == Opcode::JUMP || op == Opcode::JUMPI || op == Opcode::RETURN ||
         op == Opcode::REVERT || op == Opcode::STOP;
}

inline bool is_external_call(Opcode op) {
  return op == Opcode::CALL || op == Opcode::CALLVALUECALL || op == Opcode::STATICCALL ||
         op == Opcode::DELEGATECALL;
}

inline bool is_call(Opcode op) { return is_external_call(op) || op == Opcode::INTERNALCALL; }

inline bool is_arithmetic(Opcode op) {
  return op == Opcode::ADD || op == Opcode::SUB || op == Opcode::MUL;
}

inline bool is_comparison(Opcode op) {
  return op == Opcode::LT || op == Opcode::GT || op == Opcode::EQ || op == Opcode::ISZERO;
}

struct Operand {
  enum class Kind : std::uint8_t { Value, Literal };
  Kind kind = Kind::Value;
  std::string text;

  static Operand value(std::string v) { return {Kind::Value, std::move(v)}; }
  static Operand literal(std::string v) { return {Kind::Literal, std::move(v)}; }
  bool is_value() const { return kind == Kind::Value; }
  friend bool operator==(const Operand&, const Operand&) = default;
};

/// Destination of a call instruction. Exactly one of `contract` (explicit
/// name) or `address_value` (a value holding the callee address) is set for
/// external calls; internal calls only carry `function`.
struct CallTarget {
  std::string contract;
  std::string function;
  std::string address_value;
  friend bool operator==(const CallTarget&, const CallTarget&) = default;
};

struct Instruction {
  std::uint32_t id = 0;
  Opcode op = Opcode::STOP;
  std::optional<std::string> result;
  std::vector<Operand> operands;
  std::optional<std::string> state_ref;  // SLOAD / SSTORE
  std::optional<CallTarget> target;      // call opcodes
  std::vector<std::string> successors;   // JUMP / JUMPI block labels
  friend bool operator==(const Instruction&, const Instruction&) = default;

  // SSTORE carries (value, key?); SLOAD carries (key?).
  const Operand* storage_key() const {
    if (op == Opcode::SLOAD) return operands.empty() ? nullptr : &operands[0];
    if (op == Opcode::SSTORE) return operands.size() < 2 ? nullptr : &operands[1];
    return nullptr;
  }
};

enum class TerminatorKind : std::uint8_t { None, Jump, Branch, Return, Revert, Stop };

struct BasicBlock {
  std::string label;  // "b<N>", scoped to its function
  std::vector<Instruction> instructions;
  friend bool operator==(const BasicBlock&, const BasicBlock&) = default;

  TerminatorKind terminator() const {
    if (instructions.empty()) return TerminatorKind::None;
    switch (instructions.back().op) {
      case Opcode::JUMP: return TerminatorKind::Jump;
      case Opcode::JUMPI: return TerminatorKind::Branch;
      case Opcode::RETURN: return TerminatorKind::Return;
      case Opcode::REVERT: return TerminatorKind::Revert;
      case Opcode::STOP: return TerminatorKind::Stop;
      default: return TerminatorKind::None;
    }
  }
  const std::vector<std::string>& successors() const {
    static const std::vector<std::string> none;
    return instructions.empty() ? none : instructions.back().successors;
  }
};

enum class Visibility : std::uint8_t { Public, Private };

struct Param {
  std::string name;
  std::string type;
  friend bool operator==(const Param&, const Param&) = default;
};

struct Function {
  std::string name;
  Visibility visibility = Visibility::Public;
  std::vector<Param> params;
  std::vector<BasicBlock> blocks;  // sorted by block number; front() is the entry
  friend bool operator==(const Function&, const Function&) = default;

  const BasicBlock& entry() const { return blocks.front(); }
  const BasicBlock* find_block(std::string_view label) const {
    for (const auto& b : blocks)
      if (b.label == label) return &b;
    return nullptr;
  }
};

enum class StateKind : std::uint8_t { Scalar, Mapping, Array };

inline std::string_view state_kind_name(StateKind k) {
  switch (k) {
    case StateKind::Scalar: return "scalar";
    case StateKind::Mapping: return "mapping";
    case StateKind::Array: return "array";
  }
  return "scalar";
}

inline std::optional<StateKind> state_kind_from_name(std::string_view s) {
  if (s == "scalar") return StateKind::Scalar;
  if (s == "mapping") return StateKind::Mapping;
  if (s == "array") return StateKind::Array;
  return std::nullopt;
}

struct StateVar {
  std::string name;
  std::uint64_t slot = 0;
  StateKind kind = StateKind::Scalar;
  std::optional<std::string> label;  // semantic category name
  friend bool operator==(const StateVar&, const StateVar&) = default;
};

struct Contract {
  std::string name;
  std::optional<std::string> address;
  std::vector<StateVar> state_vars;
  std::vector<Function> functions;
  friend bool operator==(const Contract&, const Contract&) = default;

  const Function* find_function(std::string_view fn) const {
    for (const auto& f : functions)
      if (f.name == fn) return &f;
    return nullptr;
  }
  const StateVar* find_state_var(std::string_view var) const {
    for (const auto& s : state_vars)
      if (s.name == var) return &s;
    return nullptr;
  }
  StateVar* find_state_var(std::string_view var) {
    for (auto& s : state_vars)
      if (s.name == var) return &s;
    return nullptr;
  }
};

struct Universe {
  std::vector<Contract> contracts;
  friend bool operator==(const Universe&, const Universe&) = default;

  const Contract* find_contract(std::string_view name) const {
    for (const auto& c : contracts)
      if (c.name == name) return &c;
    return nullptr;
  }
  Contract* find_contract(std::string_view name) {
    for (auto& c : contracts)
      if (c.name == name) return &c;
    return nullptr;
  }
};

/// Numeric part of a "b<N>" label, or -1 when malformed.
inline long block_number(std::string_view label) {
  if (label.size() < 2 || label[0] != 'b') return -1;
  long n = 0;
  for (char c : label.substr(1)) {
    if (c < '0' || c > '9') return -1;
    n = n * 10 + (c - '0');
    if (n > 100000000) return -1;
  }
  return n;
}

/// Sorts contracts, functions, state variables and blocks into canonical order
/// and renumbers instruction ids.
inline void canonicalize(Universe& u) {
  std::sort(u.contracts.begin(), u.contracts.end(),
            [](const Contract& a, const Contract& b) { return a.name < b.name; });
  for (auto& c : u.contracts) {
    std::sort(c.state_vars.begin(), c.state_vars.end(), [](const StateVar& a, const StateVar& b) {
      if (a.slot != b.slot) return a.slot < b.slot;
      return a.name < b.name;
    });
    std::sort(c.functions.begin(), c.functions.end(),
              [](const Function& a, const Function& b) { return a.name < b.name; });
    for (auto& f : c.functions) {
      std::stable_sort(f.blocks.begin(), f.blocks.end(), [](const BasicBlock& a, const BasicBlock& b) {
        return block_number(a.label) < block_number(b.label);
      });
      std::uint32_t id = 0;
      for (auto& b : f.blocks)
        for (auto& ins : b.instructions) ins.id = id++;
    }
  }
}

inline std::string function_id(const Contract& c, const Function& f) { return c.name + "." + f.name; }

inline std::string block_id(const Contract& c, const Function& f, const BasicBlock& b) {
  return c.name + "." + f.name + "." + b.label;
}

inline std::string state_var_id(const Contract& c, const StateVar& s) { return c.name + "." + s.name; }

}  // namespace crossinspect
