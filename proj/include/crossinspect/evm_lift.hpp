#pragma once

// Public-function recovery from the selector dispatcher, and lifting of the
// stack machine blocks of each function into three-address IR.

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "diagnostics.hpp"
#include "evm.hpp"
#include "ir.hpp"
#include "keccak.hpp"

namespace crossinspect::evm {

struct DispatchEntry {
  std::optional<std::uint32_t> selector;  // empty for the fallback entry
  std::size_t entry_block = 0;
  std::string function_name;
  friend bool operator==(const DispatchEntry&, const DispatchEntry&) = default;
};

struct FunctionTable {
  std::vector<DispatchEntry> entries;      // one per matched selector, in dispatch order
  std::optional<DispatchEntry> fallback;   // default path, or block 0 without a dispatcher
  std::set<std::size_t> dispatcher_blocks;
  bool no_dispatcher = false;
  Diagnostics diagnostics;

  std::vector<DispatchEntry> all() const {
    auto v = entries;
    if (fallback) v.push_back(*fallback);
    return v;
  }
};

using NameMap = std::map<std::uint32_t, std::string>;

inline std::string name_for_selector(std::uint32_t sel, const NameMap& names) {
  auto it = names.find(sel);
  return it == names.end() ? selector_hex(sel) : it->second;
}

/// Recognizes `selector == PUSH4 c` comparisons feeding a JUMPI with a
/// constant target, using the abstract entry stacks from block recovery.
inline FunctionTable identify_functions(const Cfg& cfg, const NameMap& names = {}) {
  FunctionTable t;
  std::set<std::uint32_t> seen;
  bool has_calldataload = false;
  for (const auto& op : cfg.ops)
    if (op.mnemonic() == "CALLDATALOAD") has_calldataload = true;

  if (has_calldataload) {
    for (std::size_t bi = 0; bi < cfg.blocks.size(); ++bi) {
      const auto& b = cfg.blocks[bi];
      if (!b.entry_stack) continue;
      const auto& last = cfg.ops[b.end_op - 1];
      if (last.opcode != OP_JUMPI) continue;
      AbsStack st = *b.entry_stack;
      for (auto k = b.first_op; k + 1 < b.end_op; ++k) abs_step(cfg.ops[k], st);
      if (st.size() < 2) continue;
      const auto target = st[st.size() - 1], cond = st[st.size() - 2];
      if (cond.kind != AbsValue::Kind::SelectorEq || !target.is_const()) continue;
      auto tb = cfg.block_at_offset(target.value);
      if (!tb) continue;
      t.dispatcher_blocks.insert(bi);
      const auto sel = static_cast<std::uint32_t>(cond.value);
      if (!seen.insert(sel).second) {
        t.diagnostics.push_back({Diagnostic::Severity::Warning, "frontend", "DuplicateSelector", selector_hex(sel)});
        continue;
      }
      t.entries.push_back({sel, *tb, name_for_selector(sel, names)});
    }
  }
  if (t.entries.empty()) {
    t.no_dispatcher = true;
    t.fallback = DispatchEntry{std::nullopt, 0, "fallback"};
    t.diagnostics.push_back({Diagnostic::Severity::Note, "frontend", "NoDispatcher",
                             "no selector dispatcher; treating the contract as one function"});
    return t;
  }
  const auto last_dispatch = *t.dispatcher_blocks.rbegin();
  if (auto ft = cfg.blocks[last_dispatch].fallthrough) t.fallback = DispatchEntry{std::nullopt, *ft, "fallback"};
  return t;
}

struct LiftOptions {
  NameMap names;
};

struct LiftResult {
  Contract contract;
  Diagnostics diagnostics;
  // (function name, evm block index) pairs lowered to a bare STOP.
  std::set<std::pair<std::string, std::size_t>> unanalyzable;
  // function name -> evm block indices included in that function.
  std::map<std::string, std::vector<std::size_t>> function_blocks;
};

namespace detail {

struct Sym {
  enum class Tag : std::uint8_t { None, MapRef, ArrayBase, ArrayElem, SelectorConst };
  Operand operand;
  Tag tag = Tag::None;
  std::uint64_t slot = 0;
  std::optional<Operand> key;
  std::uint32_t selector = 0;

  static Sym literal(std::string text) { return {Operand::literal(std::move(text)), Tag::None, 0, std::nullopt, 0}; }
  static Sym value(std::string name) { return {Operand::value(std::move(name)), Tag::None, 0, std::nullopt, 0}; }
  std::optional<std::uint64_t> const_value() const {
    if (operand.is_value() || operand.text.size() > 20) return std::nullopt;
    try {
      return std::stoull(operand.text, nullptr, 0);
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
};

struct StackUnderflow {};

inline std::string literal_text(const AbsValue& v) { return std::to_string(v.value); }

inline std::string immediate_literal(const EvmOp& op) {
  std::size_t first = 0;
  while (first < op.immediate.size() && op.immediate[first] == 0) ++first;
  if (first == op.immediate.size()) return "0";
  auto imm = std::span<const std::uint8_t>(op.immediate).subspan(first);
  if (imm.size() <= 8) {
    std::uint64_t v = 0;
    for (auto b : imm) v = (v << 8) | b;
    return std::to_string(v);
  }
  return "0x" + encode_hex(imm);
}

class FunctionLifter {
 public:
  FunctionLifter(const Cfg& cfg, const DispatchEntry& entry, const std::set<std::size_t>& stop,
                 const LiftOptions& opts, std::map<std::uint64_t, StateVar>& vars, LiftResult& out)
      : cfg_(cfg), entry_(entry), stop_(stop), opts_(opts), vars_(vars), out_(out) {}

  Function run() {
    collect_blocks();
    Function f;
    f.name = entry_.function_name;
    f.visibility = Visibility::Public;
    for (auto bi : order_) {
      BasicBlock bb;
      bb.label = "b" + std::to_string(local_.at(bi));
      try {
        lift_block(bi, bb);
      } catch (const StackUnderflow&) {
        bb.instructions.clear();
        Instruction stop;
        stop.op = Opcode::STOP;
        bb.instructions.push_back(stop);
        out_.unanalyzable.insert({f.name, bi});
        out_.diagnostics.push_back({Diagnostic::Severity::Warning, "frontend", "StackUnderflow",
                                    out_.contract.name + "." + f.name + "." + bb.label + " (offset " +
                                        std::to_string(cfg_.blocks[bi].start_offset) + ") is unanalyzable"});
      }
      f.blocks.push_back(std::move(bb));
    }
    out_.function_blocks[f.name] = order_;
    return f;
  }

 private:
  void collect_blocks() {
    std::set<std::size_t> seen{entry_.entry_block};
    std::deque<std::size_t> q{entry_.entry_block};
    while (!q.empty()) {
      auto bi = q.front();
      q.pop_front();
      order_.push_back(bi);
      for (auto s : cfg_.blocks[bi].successors) {
        if (s == kUnresolved || stop_.count(s) || !seen.insert(s).second) continue;
        q.push_back(s);
      }
    }
    std::sort(order_.begin() + 1, order_.end());
    for (std::size_t i = 0; i < order_.size(); ++i) local_[order_[i]] = i;
    for (auto bi : order_)
      for (auto s : cfg_.blocks[bi].successors)
        if (local_.count(s)) preds_[s].insert(bi);
  }

  std::string fresh() { return "v" + std::to_string(next_value_++); }

  // Entry stack of block `bi`: constant slots stay literals, other slots are
  // named per block and assigned by predecessors before they branch.
  std::vector<Sym> entry_stack(std::size_t bi) {
    std::vector<Sym> st;
    const auto& es = cfg_.blocks[bi].entry_stack;
    if (!es) return st;
    for (std::size_t i = 0; i < es->size(); ++i) {
      const auto& v = (*es)[i];
      if (v.is_const()) {
        st.push_back(Sym::literal(literal_text(v)));
        continue;
      }
      auto sym = Sym::value(slot_name(bi, i));
      // Keep a storage tag only when every predecessor handed over the same one.
      auto it = incoming_.find({bi, i});
      if (it != incoming_.end() && it->second.size() == preds_[bi].size() && it->second.front() &&
          std::all_of(it->second.begin(), it->second.end(), [&](const auto& t) { return t == it->second.front(); })) {
        const auto& t = *it->second.front();
        sym.tag = t.tag;
        sym.slot = t.slot;
        if (t.has_key) sym.key = Operand::value(slot_name(bi, i) + "k");
      }
      st.push_back(std::move(sym));
    }
    return st;
  }

  struct StorageTag {
    Sym::Tag tag;
    std::uint64_t slot;
    bool has_key;
    friend bool operator==(const StorageTag&, const StorageTag&) = default;
  };

  std::string slot_name(std::size_t bi, std::size_t i) const {
    return "b" + std::to_string(local_.at(bi)) + "_s" + std::to_string(i);
  }

  void emit(BasicBlock& bb, Opcode op, std::optional<std::string> result, std::vector<Operand> operands) {
    Instruction ins;
    ins.op = op;
    ins.result = std::move(result);
    ins.operands = std::move(operands);
    bb.instructions.push_back(std::move(ins));
  }

  Sym emit_value(BasicBlock& bb, Opcode op, std::vector<Operand> operands) {
    auto name = fresh();
    emit(bb, op, name, std::move(operands));
    return Sym::value(name);
  }

  StateVar& state_var(std::uint64_t slot, StateKind kind) {
    auto [it, inserted] = vars_.try_emplace(slot);
    if (inserted) {
      it->second.slot = slot;
      it->second.kind = kind;
      it->second.name = slot == kDynamicSlot ? "stor_dynamic" : "stor_" + std::to_string(slot);
    } else if (static_cast<int>(kind) > static_cast<int>(it->second.kind)) {
      it->second.kind = kind;
    }
    return it->second;
  }

  // Resolves a storage address to (state var, optional key).
  std::pair<std::string, std::optional<Operand>> storage_ref(const Sym& addr) {
    using T = Sym::Tag;
    if (addr.tag == T::MapRef) return {state_var(addr.slot, StateKind::Mapping).name, addr.key};
    if (addr.tag == T::ArrayBase || addr.tag == T::ArrayElem)
      return {state_var(addr.slot, StateKind::Array).name, addr.key};
    if (auto c = addr.const_value(); c && *c != kDynamicSlot) return {state_var(*c, StateKind::Scalar).name, std::nullopt};
    return {state_var(kDynamicSlot, StateKind::Mapping).name, addr.operand};
  }

  void lift_block(std::size_t bi, BasicBlock& bb) {
    const auto& blk = cfg_.blocks[bi];
    std::vector<Sym> st;
    if (bi == entry_.entry_block) {
      // Values left by the dispatcher: constants stay literal, the rest derive from calldata.
      const auto& es = blk.entry_stack;
      if (es)
        for (const auto& v : *es)
          st.push_back(v.is_const() ? Sym::literal(literal_text(v)) : emit_value(bb, Opcode::CALLDATALOAD, {Operand::literal("0")}));
    } else {
      st = entry_stack(bi);
    }
    std::map<std::uint64_t, Sym> mem;  // constant-offset memory words written in this block
    std::optional<std::uint32_t> call_selector;

    auto pop = [&]() {
      if (st.empty()) throw StackUnderflow{};
      auto v = std::move(st.back());
      st.pop_back();
      return v;
    };
    auto binary = [&](Opcode op) {
      auto a = pop(), b = pop();
      st.push_back(emit_value(bb, op, {a.operand, b.operand}));
    };

    bool terminated = false;
    for (auto k = blk.first_op; k < blk.end_op && !terminated; ++k) {
      const auto& op = cfg_.ops[k];
      const auto b = op.opcode;
      const auto name = op.mnemonic();
      if (b == OP_PUSH0) {
        st.push_back(Sym::literal("0"));
      } else if (is_push(b)) {
        auto s = Sym::literal(immediate_literal(op));
        auto abs = abs_from_immediate(op.immediate);
        if (abs.kind == AbsValue::Kind::SelectorConst) {
          s.tag = Sym::Tag::SelectorConst;
          s.selector = static_cast<std::uint32_t>(abs.value);
        }
        st.push_back(std::move(s));
      } else if (b >= OP_DUP1 && b < OP_DUP1 + 16) {
        std::size_t n = b - OP_DUP1 + 1u;
        if (st.size() < n) throw StackUnderflow{};
        st.push_back(st[st.size() - n]);
      } else if (b >= OP_SWAP1 && b < OP_SWAP1 + 16) {
        std::size_t n = b - OP_SWAP1 + 1u;
        if (st.size() < n + 1) throw StackUnderflow{};
        std::swap(st[st.size() - 1], st[st.size() - 1 - n]);
      } else if (name == "POP") {
        pop();
      } else if (name == "JUMPDEST") {
      } else if (name == "ADD") {
        auto a = pop(), c = pop();
        // Element address inside a mapping value or array: keep the storage tag.
        auto tagged = a.tag != Sym::Tag::None && a.tag != Sym::Tag::SelectorConst ? &a
                    : c.tag != Sym::Tag::None && c.tag != Sym::Tag::SelectorConst ? &c : nullptr;
        if (tagged) {
          const auto& other = tagged == &a ? c : a;
          auto s = emit_value(bb, Opcode::SHA3, {a.operand, c.operand});
          s.tag = tagged->tag == Sym::Tag::ArrayBase ? Sym::Tag::ArrayElem : tagged->tag;
          s.slot = tagged->slot;
          s.key = tagged->tag == Sym::Tag::ArrayBase ? std::optional<Operand>(other.operand) : tagged->key;
          st.push_back(std::move(s));
        } else {
          st.push_back(emit_value(bb, Opcode::ADD, {a.operand, c.operand}));
        }
      } else if (name == "SUB") {
        binary(Opcode::SUB);
      } else if (name == "MUL") {
        binary(Opcode::MUL);
      } else if (name == "DIV" || name == "SDIV" || name == "MOD" || name == "SMOD" || name == "SAR") {
        binary(Opcode::DIV);
      } else if (name == "SHR") {
        auto shift = pop(), val = pop();
        st.push_back(emit_value(bb, Opcode::DIV, {val.operand, shift.operand}));
      } else if (name == "SHL") {
        auto shift = pop(), val = pop();
        auto s = emit_value(bb, Opcode::AND, {val.operand, shift.operand});
        auto sc = shift.const_value(), vc = val.const_value();
        if (sc && *sc == 224 && vc && *vc <= 0xffffffffu) {
          s.tag = Sym::Tag::SelectorConst;
          s.selector = static_cast<std::uint32_t>(*vc);
        }
        st.push_back(std::move(s));
      } else if (name == "LT" || name == "SLT") {
        binary(Opcode::LT);
      } else if (name == "GT" || name == "SGT") {
        binary(Opcode::GT);
      } else if (name == "EQ") {
        binary(Opcode::EQ);
      } else if (name == "AND" || name == "XOR" || name == "BYTE" || name == "SIGNEXTEND" || name == "EXP") {
        binary(name == "XOR" ? Opcode::OR : Opcode::AND);
      } else if (name == "OR") {
        binary(Opcode::OR);
      } else if (name == "ISZERO") {
        auto a = pop();
        st.push_back(emit_value(bb, Opcode::ISZERO, {a.operand}));
      } else if (name == "NOT") {
        auto a = pop();
        st.push_back(emit_value(bb, Opcode::OR, {a.operand, Operand::literal("0")}));
      } else if (name == "ADDMOD" || name == "MULMOD") {
        auto a = pop(), c = pop(), m = pop();
        auto t = emit_value(bb, Opcode::AND, {a.operand, c.operand});
        st.push_back(emit_value(bb, Opcode::AND, {t.operand, m.operand}));
      } else if (name == "SHA3") {
        auto off = pop(), len = pop();
        auto s = emit_value(bb, Opcode::SHA3, {off.operand, len.operand});
        auto o = off.const_value(), l = len.const_value();
        if (o && l && *o == 0 && *l == 64 && mem.count(0) && mem.count(32) && mem.at(32).const_value()) {
          s.tag = Sym::Tag::MapRef;
          s.slot = *mem.at(32).const_value();
          s.key = mem.at(0).operand;
          bb.instructions.back().operands = {mem.at(0).operand, mem.at(32).operand};
        } else if (o && l && *l == 32 && mem.count(*o) && mem.at(*o).const_value()) {
          s.tag = Sym::Tag::ArrayBase;
          s.slot = *mem.at(*o).const_value();
        }
        st.push_back(std::move(s));
      } else if (name == "CALLER" || name == "ORIGIN") {
        st.push_back(emit_value(bb, Opcode::CALLER, {}));
      } else if (name == "CALLVALUE") {
        st.push_back(emit_value(bb, Opcode::CALLVALUE, {}));
      } else if (name == "TIMESTAMP") {
        st.push_back(emit_value(bb, Opcode::TIMESTAMP, {}));
      } else if (name == "NUMBER") {
        st.push_back(emit_value(bb, Opcode::NUMBER, {}));
      } else if (name == "CALLDATALOAD") {
        auto off = pop();
        st.push_back(emit_value(bb, Opcode::CALLDATALOAD, {off.operand}));
      } else if (name == "CALLDATACOPY") {
        auto dest = pop(), off = pop();
        pop();
        auto v = emit_value(bb, Opcode::CALLDATALOAD, {off.operand});
        emit(bb, Opcode::MSTORE, std::nullopt, {dest.operand, v.operand});
        mem.clear();
      } else if (name == "MLOAD" || name == "TLOAD") {
        auto off = pop();
        if (auto o = off.const_value(); o && mem.count(*o)) {
          st.push_back(mem.at(*o));
          continue;
        }
        st.push_back(emit_value(bb, Opcode::MLOAD, {off.operand}));
      } else if (name == "MSTORE" || name == "MSTORE8" || name == "TSTORE") {
        auto off = pop(), val = pop();
        emit(bb, Opcode::MSTORE, std::nullopt, {off.operand, val.operand});
        if (auto o = off.const_value(); o && name == "MSTORE") {
          mem[*o] = val;
          if (val.tag == Sym::Tag::SelectorConst) call_selector = val.selector;
        } else {
          mem.clear();
        }
      } else if (name == "SLOAD") {
        auto addr = pop();
        auto [var, key] = storage_ref(addr);
        Instruction ins;
        ins.op = Opcode::SLOAD;
        ins.result = fresh();
        ins.state_ref = var;
        if (key) ins.operands.push_back(*key);
        st.push_back(Sym::value(*ins.result));
        bb.instructions.push_back(std::move(ins));
      } else if (name == "SSTORE") {
        auto addr = pop(), val = pop();
        auto [var, key] = storage_ref(addr);
        Instruction ins;
        ins.op = Opcode::SSTORE;
        ins.state_ref = var;
        ins.operands.push_back(val.operand);
        if (key) ins.operands.push_back(*key);
        bb.instructions.push_back(std::move(ins));
      } else if (name == "CALL" || name == "CALLCODE" || name == "DELEGATECALL" || name == "STATICCALL") {
        pop();  // gas
        auto addr = pop();
        std::optional<Sym> value;
        if (name == "CALL" || name == "CALLCODE") value = pop();
        pop();  // in offset
        auto in_len = pop();
        pop();
        pop();
        CallTarget target;
        if (addr.operand.is_value()) {
          target.address_value = addr.operand.text;
        } else {
          target.address_value = emit_value(bb, Opcode::CONST, {addr.operand}).operand.text;
        }
        auto len = in_len.const_value();
        if (call_selector && !(len && *len == 0)) target.function = name_for_selector(*call_selector, opts_.names);
        Instruction ins;
        ins.result = fresh();
        ins.target = target;
        const bool sends_value = name == "CALL" && value && !(value->const_value() && *value->const_value() == 0);
        if (sends_value) {
          ins.op = Opcode::CALLVALUECALL;
          ins.operands.push_back(value->operand);
        } else {
          ins.op = name == "STATICCALL" ? Opcode::STATICCALL
                 : name == "CALL"       ? Opcode::CALL
                                        : Opcode::DELEGATECALL;
        }
        st.push_back(Sym::value(*ins.result));
        bb.instructions.push_back(std::move(ins));
        call_selector.reset();
        mem.clear();
      } else if (name == "RETURN") {
        auto off = pop();
        pop();
        auto v = emit_value(bb, Opcode::MLOAD, {off.operand});
        emit(bb, Opcode::RETURN, std::nullopt, {v.operand});
        terminated = true;
      } else if (name == "REVERT") {
        pop();
        pop();
        emit(bb, Opcode::REVERT, std::nullopt, {});
        terminated = true;
      } else if (name == "STOP" || name == "SELFDESTRUCT") {
        if (name == "SELFDESTRUCT") pop();
        emit(bb, Opcode::STOP, std::nullopt, {});
        terminated = true;
      } else if (name == "INVALID") {
        emit(bb, Opcode::REVERT, std::nullopt, {});
        terminated = true;
      } else if (name == "JUMP") {
        pop();
        finish_jump(bi, bb, st, blk.jump_target, std::nullopt, std::nullopt);
        terminated = true;
      } else if (name == "JUMPI") {
        pop();
        auto cond = pop();
        finish_jump(bi, bb, st, blk.jump_target, blk.fallthrough, cond);
        terminated = true;
      } else {
        // Remaining environment and creation ops: keep data flow from inputs, value unknown.
        const auto& info = op_info(b);
        std::vector<Operand> ins;
        for (int i = 0; i < info.pops; ++i) ins.push_back(pop().operand);
        for (int i = 0; i < info.pushes; ++i) {
          if (ins.empty())
            st.push_back(emit_value(bb, Opcode::CONST, {Operand::literal("0")}));
          else
            st.push_back(emit_value(bb, Opcode::AND, {ins.front(), Operand::literal("0")}));
        }
      }
    }
    if (!terminated) finish_jump(bi, bb, st, blk.fallthrough, std::nullopt, std::nullopt);
  }

  bool in_function(std::optional<std::size_t> b) const { return b && local_.count(*b); }

  void copy_into(BasicBlock& bb, const std::vector<Sym>& st, std::size_t succ) {
    const auto& es = cfg_.blocks[succ].entry_stack;
    if (!es) return;
    const auto h = es->size();
    for (std::size_t i = 0; i < h; ++i) {
      if ((*es)[i].is_const()) continue;
      const auto dst = slot_name(succ, i);
      const Sym* from = st.size() >= h - i ? &st[st.size() - h + i] : nullptr;
      std::optional<StorageTag> tag;
      if (from && (from->tag == Sym::Tag::MapRef || from->tag == Sym::Tag::ArrayBase || from->tag == Sym::Tag::ArrayElem)) {
        tag = StorageTag{from->tag, from->slot, from->key.has_value()};
        if (from->key && !(from->key->is_value() && from->key->text == dst + "k")) emit(bb, Opcode::PHI, dst + "k", {*from->key});
      }
      incoming_[{succ, i}].push_back(tag);
      const Operand src = from ? from->operand : Operand::literal("0");
      if (src.is_value() && src.text == dst) continue;
      emit(bb, Opcode::PHI, dst, {src});
    }
  }

  void finish_jump(std::size_t bi, BasicBlock& bb, const std::vector<Sym>& st, std::optional<std::size_t> taken,
                   std::optional<std::size_t> fall, std::optional<Sym> cond) {
    std::optional<Operand> c;
    if (cond) {
      // Materialize so successor slot copies cannot clobber the condition.
      c = emit_value(bb, cond->operand.is_value() ? Opcode::PHI : Opcode::CONST, {cond->operand}).operand;
    }
    const bool t_ok = in_function(taken), f_ok = in_function(fall);
    if (t_ok) copy_into(bb, st, *taken);
    if (f_ok && fall != taken) copy_into(bb, st, *fall);
    Instruction ins;
    if (cond && t_ok && f_ok) {
      ins.op = Opcode::JUMPI;
      ins.operands = {*c};
      ins.successors = {label(*taken), label(*fall)};
    } else if (t_ok || f_ok) {
      ins.op = Opcode::JUMP;
      ins.successors = {label(t_ok ? *taken : *fall)};
    } else {
      ins.op = Opcode::STOP;
      if (taken || fall || cfg_.blocks[bi].unknown_target)
        out_.diagnostics.push_back({Diagnostic::Severity::Note, "frontend", "JumpOutOfFunction",
                                    out_.contract.name + "." + entry_.function_name + ": jump at offset " +
                                        std::to_string(cfg_.ops[cfg_.blocks[bi].end_op - 1].offset) +
                                        " leaves the function or is unresolved; lowered to STOP"});
    }
    bb.instructions.push_back(std::move(ins));
  }

  std::string label(std::size_t bi) const { return "b" + std::to_string(local_.at(bi)); }

  static constexpr std::uint64_t kDynamicSlot = ~std::uint64_t{0};

  const Cfg& cfg_;
  const DispatchEntry& entry_;
  const std::set<std::size_t>& stop_;
  const LiftOptions& opts_;
  std::map<std::uint64_t, StateVar>& vars_;
  LiftResult& out_;
  std::vector<std::size_t> order_;
  std::map<std::size_t, std::size_t> local_;
  std::map<std::size_t, std::set<std::size_t>> preds_;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::optional<StorageTag>>> incoming_;
  std::size_t next_value_ = 0;
};

}  // namespace detail

/// Lifts every dispatched function (plus fallback) into an IR contract. Blocks
/// reachable from several entries are cloned into each function.
inline LiftResult lift_to_ir(const Cfg& cfg, const FunctionTable& table, const RawBytecode& raw,
                             const LiftOptions& opts = {}) {
  LiftResult out;
  out.contract.name = raw.contract_name;
  std::set<std::size_t> entry_blocks;
  for (const auto& e : table.all()) entry_blocks.insert(e.entry_block);
  std::map<std::uint64_t, StateVar> vars;
  for (const auto& e : table.all()) {
    std::set<std::size_t> stop = table.dispatcher_blocks;
    for (auto b : entry_blocks)
      if (b != e.entry_block) stop.insert(b);
    stop.erase(e.entry_block);
    out.contract.functions.push_back(detail::FunctionLifter(cfg, e, stop, opts, vars, out).run());
  }
  for (auto& [slot, v] : vars) out.contract.state_vars.push_back(v);
  out.diagnostics.insert(out.diagnostics.begin(), table.diagnostics.begin(), table.diagnostics.end());
  return out;
}

}  // namespace crossinspect::evm
