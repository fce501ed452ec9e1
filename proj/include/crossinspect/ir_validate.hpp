#pragma once

#include <map>
#include <set>
#include <string>

#include "category.hpp"
#include "diagnostics.hpp"
#include "ir.hpp"

namespace crossinspect {

namespace detail {

struct Arity {
  int min_operands;
  int max_operands;
  int result;  // 1 required, 0 forbidden, -1 optional
};

inline Arity arity_of(Opcode op) {
  switch (op) {
    case Opcode::CONST: return {1, 1, 1};
    case Opcode::ADD: case Opcode::SUB: case Opcode::MUL: case Opcode::DIV:
    case Opcode::LT: case Opcode::GT: case Opcode::EQ: case Opcode::AND: case Opcode::OR:
      return {2, 2, 1};
    case Opcode::ISZERO: case Opcode::MLOAD: case Opcode::CALLDATALOAD: return {1, 1, 1};
    case Opcode::SHA3: return {1, 3, 1};
    case Opcode::SLOAD: return {0, 1, 1};
    case Opcode::SSTORE: return {1, 2, 0};
    case Opcode::MSTORE: return {2, 2, 0};
    case Opcode::CALLER: case Opcode::CALLVALUE: case Opcode::TIMESTAMP: case Opcode::NUMBER:
      return {0, 0, 1};
    case Opcode::CALL: case Opcode::STATICCALL: case Opcode::DELEGATECALL: case Opcode::INTERNALCALL:
      return {0, 3, -1};
    case Opcode::CALLVALUECALL: return {1, 3, -1};
    case Opcode::JUMP: return {0, 0, 0};
    case Opcode::JUMPI: return {1, 1, 0};
    case Opcode::RETURN: return {0, 1, 0};
    case Opcode::REVERT: case Opcode::STOP: return {0, 0, 0};
    case Opcode::PHI: return {1, 3, 1};
  }
  return {0, 3, -1};
}

class Validator {
 public:
  Diagnostics run(const Universe& u) {
    std::set<std::string> contract_names;
    for (const auto& c : u.contracts) {
      if (!contract_names.insert(c.name).second) report("DuplicateContract", c.name);
      check_contract(c);
    }
    return std::move(out_);
  }

 private:
  void report(const std::string& code, const std::string& msg) {
    out_.push_back({Diagnostic::Severity::Error, "ir", code, msg});
  }

  void check_contract(const Contract& c) {
    std::set<std::string> names;
    std::set<std::uint64_t> slots;
    for (const auto& s : c.state_vars) {
      if (!names.insert(s.name).second) report("DuplicateStateVar", c.name + "." + s.name);
      if (!slots.insert(s.slot).second)
        report("DuplicateSlot", c.name + " slot " + std::to_string(s.slot));
      if (s.label && !category_from_name(*s.label))
        report("UnknownCategory", c.name + "." + s.name + " label " + *s.label);
    }
    std::set<std::string> fns;
    for (const auto& f : c.functions) {
      if (!fns.insert(f.name).second) report("DuplicateFunction", c.name + "." + f.name);
      check_function(c, f);
    }
  }

  void check_function(const Contract& c, const Function& f) {
    const std::string fid = function_id(c, f);
    if (f.blocks.empty()) {
      report("EmptyFunction", fid);
      return;
    }
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < f.blocks.size(); ++i) {
      const auto& b = f.blocks[i];
      if (block_number(b.label) < 0) report("BadBlockLabel", fid + "." + b.label);
      if (!index.emplace(b.label, i).second) report("DuplicateBlockId", fid + "." + b.label);
    }

    std::vector<std::vector<std::size_t>> preds(f.blocks.size());
    for (std::size_t i = 0; i < f.blocks.size(); ++i) {
      const auto& b = f.blocks[i];
      const std::string bid = fid + "." + b.label;
      if (b.instructions.empty()) {
        report("MissingTerminator", bid);
        continue;
      }
      int terminators = 0;
      for (const auto& ins : b.instructions) {
        if (is_terminator(ins.op)) ++terminators;
        check_instruction(c, f, bid, ins);
      }
      if (!is_terminator(b.instructions.back().op)) report("MissingTerminator", bid);
      if (terminators > 1) report("MultipleTerminators", bid);
      for (const auto& s : b.successors()) {
        auto it = index.find(s);
        if (it == index.end())
          report("UnknownBlock", bid + " -> " + s);
        else
          preds[it->second].push_back(i);
      }
    }

    // Reachability from the entry block.
    std::vector<bool> seen(f.blocks.size(), false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      auto i = stack.back();
      stack.pop_back();
      for (const auto& s : f.blocks[i].successors()) {
        auto it = index.find(s);
        if (it != index.end() && !seen[it->second]) {
          seen[it->second] = true;
          stack.push_back(it->second);
        }
      }
    }
    for (std::size_t i = 0; i < f.blocks.size(); ++i)
      if (!seen[i]) report("UnreachableBlock", fid + "." + f.blocks[i].label);

    check_definitions(fid, f, index, preds, seen);
  }

  void check_instruction(const Contract& c, const Function& f, const std::string& bid,
                         const Instruction& ins) {
    const auto a = arity_of(ins.op);
    const int n = static_cast<int>(ins.operands.size());
    const std::string where = bid + " " + std::string(opcode_name(ins.op));
    if (n > 3) report("TooManyOperands", where);
    if (n < a.min_operands || n > a.max_operands) {
      if (ins.op == Opcode::CALLVALUECALL && n == 0)
        report("MissingValueOperand", where);
      else
        report("BadOperandCount", where);
    }
    if (a.result == 1 && !ins.result) report("MissingResult", where);
    if (a.result == 0 && ins.result) report("UnexpectedResult", where);
    if (ins.op == Opcode::SLOAD || ins.op == Opcode::SSTORE) {
      if (!ins.state_ref)
        report("MissingStateRef", where);
      else if (!c.find_state_var(*ins.state_ref))
        report("UnknownStateVar", where + " " + *ins.state_ref);
    }
    if (ins.op == Opcode::CONST && n == 1 && ins.operands[0].is_value()) report("BadOperandKind", where);
    if (is_call(ins.op) && !ins.target) report("MissingCallTarget", where);
    if (ins.op == Opcode::INTERNALCALL && ins.target && !c.find_function(ins.target->function))
      report("UnknownFunction", where + " " + ins.target->function);
    if (ins.op == Opcode::JUMP && ins.successors.size() != 1) report("BadJumpTargets", where);
    if (ins.op == Opcode::JUMPI && ins.successors.size() != 2) report("BadJumpTargets", where);
    (void)f;
  }

  // Must-defined forward analysis; a use is valid only when its value is
  // defined along every path from the entry. PHI operands only need a
  // definition somewhere in the function.
  void check_definitions(const std::string& fid, const Function& f,
                         const std::map<std::string, std::size_t>& index,
                         const std::vector<std::vector<std::size_t>>& preds,
                         const std::vector<bool>& reachable) {
    std::set<std::string> all_defs;
    for (const auto& p : f.params) all_defs.insert(p.name);
    for (const auto& b : f.blocks)
      for (const auto& ins : b.instructions)
        if (ins.result) all_defs.insert(*ins.result);

    const std::size_t n = f.blocks.size();
    std::vector<std::set<std::string>> out(n, all_defs);  // optimistic top
    std::vector<std::set<std::string>> in(n);
    std::set<std::string> params;
    for (const auto& p : f.params) params.insert(p.name);

    auto transfer = [&](std::size_t i, std::set<std::string> defs) {
      for (const auto& ins : f.blocks[i].instructions)
        if (ins.result) defs.insert(*ins.result);
      return defs;
    };
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (!reachable[i]) continue;
        std::set<std::string> cur;
        if (i == 0) {
          cur = params;
        } else {
          bool first = true;
          for (auto p : preds[i]) {
            if (!reachable[p]) continue;
            if (first) {
              cur = out[p];
              first = false;
            } else {
              std::set<std::string> meet;
              std::set_intersection(cur.begin(), cur.end(), out[p].begin(), out[p].end(),
                                    std::inserter(meet, meet.begin()));
              cur = std::move(meet);
            }
          }
        }
        auto next = transfer(i, cur);
        in[i] = std::move(cur);
        if (next != out[i]) {
          out[i] = std::move(next);
          changed = true;
        }
      }
    }
    (void)index;

    for (std::size_t i = 0; i < n; ++i) {
      if (!reachable[i]) continue;
      auto defs = in[i];
      const auto& b = f.blocks[i];
      for (const auto& ins : b.instructions) {
        auto check = [&](const std::string& v) {
          bool ok = ins.op == Opcode::PHI ? all_defs.count(v) > 0 : defs.count(v) > 0;
          if (!ok) report("UndefinedValueUse", fid + "." + b.label + " uses " + v);
        };
        for (const auto& op : ins.operands)
          if (op.is_value()) check(op.text);
        if (ins.target && !ins.target->address_value.empty()) check(ins.target->address_value);
        if (ins.result) defs.insert(*ins.result);
      }
    }
  }

  Diagnostics out_;
};

}  // namespace detail

/// Returns every invariant violation in `u`; an empty list means the
/// universe is analyzable.
inline Diagnostics validate(const Universe& u) { return detail::Validator{}.run(u); }

}  // namespace crossinspect
