#pragma once

// Vulnerability indicators and call-graph pruning.

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "graphs.hpp"

namespace crossinspect {

enum class Rule : std::uint8_t { Reentrancy, Timestamp, DoS, Overflow };

inline std::string_view rule_name(Rule r) {
  switch (r) {
    case Rule::Reentrancy: return "Reentrancy";
    case Rule::Timestamp: return "Timestamp";
    case Rule::DoS: return "DoS";
    case Rule::Overflow: return "Overflow";
  }
  return "Reentrancy";
}

inline std::optional<Rule> rule_from_name(std::string_view s) {
  for (auto r : {Rule::Reentrancy, Rule::Timestamp, Rule::DoS, Rule::Overflow})
    if (rule_name(r) == s) return r;
  return std::nullopt;
}

struct Indicator {
  Rule rule = Rule::Reentrancy;
  std::size_t block = 0;       // global block index
  std::size_t first_instr = 0; // span within the block (inclusive)
  std::size_t last_instr = 0;
  std::string detail;
  friend auto operator<=>(const Indicator&, const Indicator&) = default;
};

struct Loop {
  std::size_t header = 0;
  std::set<std::size_t> body;  // global block indices, header included
};

/// Natural loops of function f from DFS back edges. Bodies of back edges
/// sharing a header are merged.
inline std::vector<Loop> find_loops(const ProgramIndex& idx, std::size_t f) {
  const auto& fi = idx.fn(f);
  std::map<std::size_t, std::set<std::size_t>> bodies;
  if (fi.block_count == 0) return {};
  enum : std::uint8_t { White, Grey, Black };
  std::map<std::size_t, std::uint8_t> color;
  struct Frame {
    std::size_t b;
    std::size_t next;
  };
  std::vector<Frame> stack{{fi.first_block, 0}};
  color[fi.first_block] = Grey;
  std::vector<std::pair<std::size_t, std::size_t>> back;
  while (!stack.empty()) {
    auto& fr = stack.back();
    const auto& succ = idx.successors(fr.b);
    if (fr.next < succ.size()) {
      auto s = succ[fr.next++];
      auto c = color[s];
      if (c == Grey)
        back.push_back({fr.b, s});
      else if (c == White) {
        color[s] = Grey;
        stack.push_back({s, 0});
      }
    } else {
      color[fr.b] = Black;
      stack.pop_back();
    }
  }
  for (auto [tail, head] : back) {
    auto& body = bodies[head];
    body.insert(head);
    std::vector<std::size_t> work{tail};
    while (!work.empty()) {
      auto b = work.back();
      work.pop_back();
      if (!body.insert(b).second) continue;
      for (auto p : idx.predecessors(b)) work.push_back(p);
    }
  }
  std::vector<Loop> out;
  for (auto& [h, body] : bodies) out.push_back({h, std::move(body)});
  return out;
}

namespace detail {

inline bool is_external_site(const CallSite& s) { return is_external_call(s.op) && !s.self_target; }

// Does `value` reach a JUMPI with a REVERT side through ISZERO and copies only?
inline bool guards_revert(const ProgramIndex& idx, const DefUse& du, const std::string& value) {
  std::set<std::string> seen{value};
  std::vector<std::string> work{value};
  while (!work.empty()) {
    auto v = work.back();
    work.pop_back();
    auto it = du.uses.find(v);
    if (it == du.uses.end()) continue;
    for (auto [b, i] : it->second) {
      const auto& use = idx.block(b).block->instructions[i];
      if (use.op == Opcode::JUMPI) {
        for (auto s : idx.successors(b))
          if (reaches_revert(idx, s)) return true;
      } else if ((use.op == Opcode::ISZERO || use.op == Opcode::PHI) && use.result && seen.insert(*use.result).second) {
        work.push_back(*use.result);
      }
    }
  }
  return false;
}

// The arithmetic result is compared against one of its own operands (or, for
// MUL, divided back by one operand and compared with the other), and that
// comparison guards a revert.
inline bool overflow_checked(const ProgramIndex& idx, const DefUse& du, const Instruction& arith) {
  const auto& r = *arith.result;
  std::set<std::string> own;
  for (const auto& o : arith.operands)
    if (o.is_value()) own.insert(o.text);
  auto it = du.uses.find(r);
  if (it == du.uses.end()) return false;
  auto compares_with = [&](const Instruction& c, const std::string& x, const std::set<std::string>& others) {
    if ((c.op != Opcode::LT && c.op != Opcode::GT && c.op != Opcode::EQ) || c.operands.size() != 2 || !c.result) return false;
    const auto& a = c.operands[0];
    const auto& b = c.operands[1];
    const bool hit = (a.is_value() && a.text == x && b.is_value() && others.count(b.text)) ||
                     (b.is_value() && b.text == x && a.is_value() && others.count(a.text));
    return hit && guards_revert(idx, du, *c.result);
  };
  for (auto [b, i] : it->second) {
    const auto& use = idx.block(b).block->instructions[i];
    if (compares_with(use, r, own)) return true;
    if (arith.op == Opcode::MUL && use.op == Opcode::DIV && use.result && use.operands.size() == 2 &&
        use.operands[0].is_value() && use.operands[0].text == r && use.operands[1].is_value() &&
        own.count(use.operands[1].text)) {
      std::set<std::string> other = own;
      if (own.size() > 1) other.erase(use.operands[1].text);
      if (auto dit = du.uses.find(*use.result); dit != du.uses.end())
        for (auto [b2, i2] : dit->second)
          if (compares_with(idx.block(b2).block->instructions[i2], *use.result, other)) return true;
    }
  }
  return false;
}

}  // namespace detail

/// Applies the four indicator rules to every function of the universe.
inline std::vector<Indicator> detect_indicators(const ProgramIndex& idx, const CallGraph& cg) {
  std::vector<Indicator> out;
  std::map<std::size_t, std::vector<const CallSite*>> sites_by_fn;
  for (const auto& s : cg.sites) sites_by_fn[s.caller].push_back(&s);

  for (std::size_t f = 0; f < idx.function_count(); ++f) {
    const auto& fi = idx.fn(f);
    const auto& sites = sites_by_fn[f];
    const auto du = detail::def_use(idx, f);

    // Reentrancy: an external call plus a value transfer in the same function.
    const bool has_external = std::any_of(sites.begin(), sites.end(), [](auto* s) { return detail::is_external_site(*s); });
    if (has_external)
      for (const auto* s : sites)
        if (s->op == Opcode::CALLVALUECALL)
          out.push_back({Rule::Reentrancy, s->block, s->instr, s->instr, "value transfer in a function making external calls"});

    // DoS: external call inside a loop body.
    const auto loops = find_loops(idx, f);
    for (const auto* s : sites) {
      if (!detail::is_external_site(*s)) continue;
      for (const auto& l : loops)
        if (l.body.count(s->block)) {
          out.push_back({Rule::DoS, s->block, s->instr, s->instr,
                         "external call inside loop headed by " + idx.block(l.header).block->label});
          break;
        }
    }

    std::set<std::pair<std::size_t, std::size_t>> timestamp_branches;
    for (std::size_t k = 0; k < fi.block_count; ++k) {
      const auto gb = fi.first_block + k;
      const auto& ins = idx.block(gb).block->instructions;
      for (std::size_t i = 0; i < ins.size(); ++i) {
        const auto& in = ins[i];
        // Timestamp: block time or number decides a branch.
        if ((in.op == Opcode::TIMESTAMP || in.op == Opcode::NUMBER) && in.result)
          for (const auto& site : detail::forward_slice(idx, du, *in.result))
            if (idx.block(site.first).block->instructions[site.second].op == Opcode::JUMPI)
              timestamp_branches.insert(site);
        // Overflow: arithmetic without the generated check.
        if (is_arithmetic(in.op) && in.result && !detail::overflow_checked(idx, du, in))
          out.push_back({Rule::Overflow, gb, i, i, std::string(opcode_name(in.op)) + " without overflow check"});
      }
    }
    for (auto [b, i] : timestamp_branches)
      out.push_back({Rule::Timestamp, b, i, i, "branch condition depends on block timestamp or number"});
  }
  std::sort(out.begin(), out.end(), [](const Indicator& a, const Indicator& b) {
    return std::tie(a.block, a.first_instr, a.rule) < std::tie(b.block, b.first_instr, b.rule);
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Functions in every weakly connected call-graph component that contains
/// both an entry function and an indicator function.
inline std::set<std::size_t> prune_wcc(std::size_t function_count, const CallGraph& cg,
                                       const std::set<std::size_t>& entry_fns,
                                       const std::set<std::size_t>& indicator_fns) {
  std::vector<std::size_t> parent(function_count);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [e, kind] : cg.edges)
    if (e.second != kNone) parent[find(e.first)] = find(e.second);
  std::set<std::size_t> with_entry, with_indicator;
  for (auto f : entry_fns) with_entry.insert(find(f));
  for (auto f : indicator_fns) with_indicator.insert(find(f));
  std::set<std::size_t> out;
  for (std::size_t f = 0; f < function_count; ++f) {
    auto r = find(f);
    if (with_entry.count(r) && with_indicator.count(r)) out.insert(f);
  }
  return out;
}

}  // namespace crossinspect
