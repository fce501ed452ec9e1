#pragma once

// Call graph, inter-contract CFG, and the state dependency graph built on top
// of it (state read/write edges plus state-revert edges).

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "diagnostics.hpp"
#include "ir.hpp"

namespace crossinspect {

inline constexpr std::size_t kNone = static_cast<std::size_t>(-1);

/// Dense numbering of functions, blocks and state variables in canonical
/// order. Holds pointers into the universe, which must outlive it.
class ProgramIndex {
 public:
  struct FnInfo {
    std::size_t contract = 0;
    const Function* function = nullptr;
    std::string id;
    std::size_t first_block = 0;
    std::size_t block_count = 0;
  };
  struct BlockInfo {
    std::size_t fn = 0;
    const BasicBlock* block = nullptr;
    std::string id;
  };
  struct StateInfo {
    std::size_t contract = 0;
    const StateVar* var = nullptr;
    std::string id;
  };

  explicit ProgramIndex(const Universe& u) : u_(&u) {
    for (std::size_t ci = 0; ci < u.contracts.size(); ++ci) {
      const auto& c = u.contracts[ci];
      for (const auto& s : c.state_vars) {
        state_by_id_[state_var_id(c, s)] = states_.size();
        states_.push_back({ci, &s, state_var_id(c, s)});
      }
      for (const auto& f : c.functions) {
        FnInfo fi{ci, &f, function_id(c, f), blocks_.size(), f.blocks.size()};
        fn_by_id_[fi.id] = fns_.size();
        for (const auto& b : f.blocks) {
          block_by_id_[block_id(c, f, b)] = blocks_.size();
          blocks_.push_back({fns_.size(), &b, block_id(c, f, b)});
        }
        fns_.push_back(std::move(fi));
      }
    }
    succ_.resize(blocks_.size());
    pred_.resize(blocks_.size());
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
      const auto& fi = fns_[blocks_[bi].fn];
      std::set<std::size_t> s;
      for (const auto& label : blocks_[bi].block->successors())
        if (auto t = local_block(blocks_[bi].fn, label); t != kNone) s.insert(t);
      succ_[bi].assign(s.begin(), s.end());
      for (auto t : s) pred_[t].push_back(bi);
      (void)fi;
    }
  }

  const Universe& universe() const { return *u_; }
  std::size_t function_count() const { return fns_.size(); }
  std::size_t block_count() const { return blocks_.size(); }
  std::size_t state_count() const { return states_.size(); }
  const FnInfo& fn(std::size_t i) const { return fns_[i]; }
  const BlockInfo& block(std::size_t i) const { return blocks_[i]; }
  const StateInfo& state(std::size_t i) const { return states_[i]; }
  const Contract& contract_of_fn(std::size_t f) const { return u_->contracts[fns_[f].contract]; }
  std::size_t entry_block(std::size_t f) const { return fns_[f].first_block; }

  std::size_t find_fn(const std::string& id) const { return lookup(fn_by_id_, id); }
  std::size_t find_block(const std::string& id) const { return lookup(block_by_id_, id); }
  std::size_t find_state(const std::string& id) const { return lookup(state_by_id_, id); }
  std::size_t find_state(std::size_t contract, const std::string& var) const {
    return find_state(u_->contracts[contract].name + "." + var);
  }
  std::size_t find_fn(std::size_t contract, const std::string& fn) const {
    return find_fn(u_->contracts[contract].name + "." + fn);
  }
  std::size_t find_contract(const std::string& name) const {
    for (std::size_t i = 0; i < u_->contracts.size(); ++i)
      if (u_->contracts[i].name == name) return i;
    return kNone;
  }

  /// Global index of block `label` in function `f`, or kNone.
  std::size_t local_block(std::size_t f, const std::string& label) const {
    const auto& fi = fns_[f];
    for (std::size_t k = 0; k < fi.block_count; ++k)
      if (blocks_[fi.first_block + k].block->label == label) return fi.first_block + k;
    return kNone;
  }

  /// Intra-function successors, ascending.
  const std::vector<std::size_t>& successors(std::size_t b) const { return succ_[b]; }
  const std::vector<std::size_t>& predecessors(std::size_t b) const { return pred_[b]; }

 private:
  static std::size_t lookup(const std::map<std::string, std::size_t>& m, const std::string& k) {
    auto it = m.find(k);
    return it == m.end() ? kNone : it->second;
  }

  const Universe* u_;
  std::vector<FnInfo> fns_;
  std::vector<BlockInfo> blocks_;
  std::vector<StateInfo> states_;
  std::map<std::string, std::size_t> fn_by_id_, block_by_id_, state_by_id_;
  std::vector<std::vector<std::size_t>> succ_, pred_;
};

// ---------------------------------------------------------------------------
// Call graph

/// Maps an address-typed storage slot of `contract` to the contract deployed there.
struct Binding {
  std::string contract;
  std::uint64_t slot = 0;
  std::string target;
  friend bool operator==(const Binding&, const Binding&) = default;
};

enum class CallEdgeKind : std::uint8_t { Internal, CrossContract };

inline std::string_view call_edge_kind_name(CallEdgeKind k) {
  return k == CallEdgeKind::Internal ? "internal" : "cross-contract";
}

struct CallSite {
  std::size_t caller = 0;  // function index
  std::size_t block = 0;   // global block index
  std::size_t instr = 0;   // index within the block
  Opcode op = Opcode::CALL;
  std::size_t callee = kNone;  // kNone: dangling edge to EXTERNAL
  CallEdgeKind kind = CallEdgeKind::CrossContract;
  bool self_target = false;  // external opcode that resolves into the caller's own contract
};

struct CallGraph {
  std::vector<CallSite> sites;  // every call instruction in canonical order
  // Distinct (caller, callee) pairs; callee kNone denotes EXTERNAL.
  std::map<std::pair<std::size_t, std::size_t>, CallEdgeKind> edges;
  Diagnostics diagnostics;
};

namespace detail {

// Definitions of `value` within function f (flow-insensitive).
inline std::vector<const Instruction*> definitions(const Function& f, const std::string& value) {
  std::vector<const Instruction*> out;
  for (const auto& b : f.blocks)
    for (const auto& ins : b.instructions)
      if (ins.result && *ins.result == value) out.push_back(&ins);
  return out;
}

}  // namespace detail

inline CallGraph build_callgraph(const ProgramIndex& idx, const std::vector<Binding>& bindings = {}) {
  CallGraph cg;
  const auto& u = idx.universe();
  std::map<std::pair<std::size_t, std::uint64_t>, std::string> bind;
  for (const auto& b : bindings) {
    auto c = idx.find_contract(b.contract);
    if (c == kNone) {
      cg.diagnostics.push_back({Diagnostic::Severity::Warning, "graphs", "ManifestTargetUnknown",
                                "binding source contract " + b.contract + " is not in the universe"});
      continue;
    }
    bind[{c, b.slot}] = b.target;
  }

  // Contract that value `v` of function f may hold, following PHI copies.
  auto resolve_address = [&](std::size_t f, const std::string& v) -> std::optional<std::string> {
    const auto& fn = *idx.fn(f).function;
    const auto ci = idx.fn(f).contract;
    std::set<std::string> seen;
    std::vector<std::string> work{v};
    while (!work.empty()) {
      auto cur = work.back();
      work.pop_back();
      if (!seen.insert(cur).second) continue;
      for (const auto* d : detail::definitions(fn, cur)) {
        if (d->op == Opcode::SLOAD && d->state_ref) {
          const auto* sv = u.contracts[ci].find_state_var(*d->state_ref);
          if (sv) {
            if (auto it = bind.find({ci, sv->slot}); it != bind.end()) return it->second;
          }
        } else if (d->op == Opcode::CONST && !d->operands.empty()) {
          for (const auto& c : u.contracts)
            if (c.address && *c.address == d->operands[0].text) return c.name;
        } else if (d->op == Opcode::PHI) {
          for (const auto& o : d->operands)
            if (o.is_value()) work.push_back(o.text);
        }
      }
    }
    return std::nullopt;
  };

  for (std::size_t f = 0; f < idx.function_count(); ++f) {
    const auto& fi = idx.fn(f);
    const auto& contract = u.contracts[fi.contract];
    for (std::size_t k = 0; k < fi.block_count; ++k) {
      const auto gb = fi.first_block + k;
      const auto& blk = *idx.block(gb).block;
      for (std::size_t i = 0; i < blk.instructions.size(); ++i) {
        const auto& ins = blk.instructions[i];
        if (!is_call(ins.op) || !ins.target) continue;
        CallSite site;
        site.caller = f;
        site.block = gb;
        site.instr = i;
        site.op = ins.op;
        const auto& t = *ins.target;
        if (ins.op == Opcode::INTERNALCALL) {
          site.kind = CallEdgeKind::Internal;
          site.callee = idx.find_fn(fi.contract, t.function);
        } else {
          std::optional<std::string> target_contract;
          if (!t.contract.empty())
            target_contract = t.contract;
          else if (!t.address_value.empty())
            target_contract = resolve_address(f, t.address_value);
          if (target_contract) {
            const auto tc = idx.find_contract(*target_contract);
            if (tc == kNone) {
              cg.diagnostics.push_back({Diagnostic::Severity::Warning, "graphs", "ManifestTargetUnknown",
                                        fi.id + " calls unknown contract " + *target_contract});
            } else {
              std::string fname = t.function;
              if (fname.empty() && u.contracts[tc].find_function("fallback")) fname = "fallback";
              site.callee = fname.empty() ? kNone : idx.find_fn(tc, fname);
              if (site.callee == kNone)
                cg.diagnostics.push_back({Diagnostic::Severity::Warning, "graphs", "UnknownCallee",
                                          fi.id + " calls " + *target_contract + "." +
                                              (fname.empty() ? "<unknown>" : fname)});
              site.self_target = tc == fi.contract;
              site.kind = site.self_target ? CallEdgeKind::Internal : CallEdgeKind::CrossContract;
            }
          }
        }
        (void)contract;
        cg.edges.emplace(std::make_pair(f, site.callee), site.kind);
        cg.sites.push_back(site);
      }
    }
  }
  return cg;
}

// ---------------------------------------------------------------------------
// ICFG

enum class IcfgEdgeKind : std::uint8_t { Intra, InterCall, InterReturn };

inline std::string_view icfg_edge_kind_name(IcfgEdgeKind k) {
  switch (k) {
    case IcfgEdgeKind::Intra: return "intra-cfg";
    case IcfgEdgeKind::InterCall: return "inter-call";
    case IcfgEdgeKind::InterReturn: return "inter-return";
  }
  return "intra-cfg";
}

struct IcfgEdge {
  std::size_t src = 0, dst = 0;
  IcfgEdgeKind kind = IcfgEdgeKind::Intra;
  std::size_t site = kNone;  // index into CallGraph::sites for inter edges
  friend bool operator==(const IcfgEdge&, const IcfgEdge&) = default;
  friend auto operator<=>(const IcfgEdge&, const IcfgEdge&) = default;
};

struct Icfg {
  std::size_t node_count = 0;
  std::vector<IcfgEdge> edges;                // sorted
  std::vector<std::vector<std::size_t>> out;  // distinct successors, ascending

  std::size_t count(IcfgEdgeKind k) const {
    return static_cast<std::size_t>(std::count_if(edges.begin(), edges.end(), [k](const auto& e) { return e.kind == k; }));
  }
};

inline bool is_exit_block(const BasicBlock& b) {
  const auto t = b.terminator();
  return t == TerminatorKind::Return || t == TerminatorKind::Stop;
}

inline Icfg build_icfg(const ProgramIndex& idx, const CallGraph& cg) {
  Icfg g;
  g.node_count = idx.block_count();
  for (std::size_t b = 0; b < idx.block_count(); ++b)
    for (auto s : idx.successors(b)) g.edges.push_back({b, s, IcfgEdgeKind::Intra, kNone});
  for (std::size_t si = 0; si < cg.sites.size(); ++si) {
    const auto& site = cg.sites[si];
    if (site.callee == kNone) continue;
    const auto& callee = idx.fn(site.callee);
    g.edges.push_back({site.block, callee.first_block, IcfgEdgeKind::InterCall, si});
    for (std::size_t k = 0; k < callee.block_count; ++k) {
      const auto eb = callee.first_block + k;
      if (!is_exit_block(*idx.block(eb).block)) continue;
      for (auto s : idx.successors(site.block)) g.edges.push_back({eb, s, IcfgEdgeKind::InterReturn, si});
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.out.resize(g.node_count);
  for (const auto& e : g.edges) g.out[e.src].push_back(e.dst);
  for (auto& v : g.out) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return g;
}

// ---------------------------------------------------------------------------
// State dependencies

enum class Access : std::uint8_t { Read, Write };

struct RwDep {
  std::size_t block = 0;
  std::size_t state = 0;
  Access access = Access::Read;
  std::size_t instr = 0;  // index within the block
  friend auto operator<=>(const RwDep&, const RwDep&) = default;
};

inline std::vector<RwDep> extract_rw_deps(const ProgramIndex& idx) {
  std::vector<RwDep> out;
  for (std::size_t b = 0; b < idx.block_count(); ++b) {
    const auto ci = idx.fn(idx.block(b).fn).contract;
    const auto& ins = idx.block(b).block->instructions;
    for (std::size_t i = 0; i < ins.size(); ++i) {
      if ((ins[i].op != Opcode::SLOAD && ins[i].op != Opcode::SSTORE) || !ins[i].state_ref) continue;
      auto s = idx.find_state(ci, *ins[i].state_ref);
      if (s == kNone) continue;
      out.push_back({b, s, ins[i].op == Opcode::SSTORE ? Access::Write : Access::Read, i});
    }
  }
  return out;
}

/// A conditional branch whose condition depends on a storage read and with
/// one side falling through unconditional jumps into REVERT.
struct RevertGuard {
  std::size_t branch_block = 0;    // block ending in the JUMPI
  std::size_t revert_succ = 0;     // successor leading to REVERT
  std::size_t continue_succ = kNone;  // the other successor, if it does not revert
  friend auto operator<=>(const RevertGuard&, const RevertGuard&) = default;
};

struct RevertDep {
  std::size_t writer = 0;  // block writing s
  std::size_t dest = 0;    // branch start of the guarded read
  std::size_t state = 0;
  std::size_t read_block = 0;
  std::vector<RevertGuard> guards;
};

namespace detail {

// Follows unconditional jumps from `b`; true when a REVERT is reached
// before any other kind of terminator.
inline bool reaches_revert(const ProgramIndex& idx, std::size_t b) {
  std::set<std::size_t> seen;
  while (seen.insert(b).second) {
    const auto t = idx.block(b).block->terminator();
    if (t == TerminatorKind::Revert) return true;
    if (t != TerminatorKind::Jump || idx.successors(b).size() != 1) return false;
    b = idx.successors(b).front();
  }
  return false;
}

struct DefUse {
  // value -> (block, instr) of instructions using it
  std::map<std::string, std::vector<std::pair<std::size_t, std::size_t>>> uses;
};

inline DefUse def_use(const ProgramIndex& idx, std::size_t f) {
  DefUse du;
  const auto& fi = idx.fn(f);
  for (std::size_t k = 0; k < fi.block_count; ++k) {
    const auto gb = fi.first_block + k;
    const auto& ins = idx.block(gb).block->instructions;
    for (std::size_t i = 0; i < ins.size(); ++i) {
      for (const auto& o : ins[i].operands)
        if (o.is_value()) du.uses[o.text].push_back({gb, i});
      if (ins[i].target && !ins[i].target->address_value.empty()) du.uses[ins[i].target->address_value].push_back({gb, i});
    }
  }
  return du;
}

// Instructions transitively data-dependent on `value` (flow-insensitive).
inline std::set<std::pair<std::size_t, std::size_t>> forward_slice(const ProgramIndex& idx, const DefUse& du,
                                                                   const std::string& value) {
  std::set<std::pair<std::size_t, std::size_t>> reached;
  std::set<std::string> seen{value};
  std::vector<std::string> work{value};
  while (!work.empty()) {
    auto v = work.back();
    work.pop_back();
    auto it = du.uses.find(v);
    if (it == du.uses.end()) continue;
    for (const auto& site : it->second) {
      if (!reached.insert(site).second) continue;
      const auto& ins = idx.block(site.first).block->instructions[site.second];
      if (ins.result && seen.insert(*ins.result).second) work.push_back(*ins.result);
    }
  }
  return reached;
}

}  // namespace detail

struct RevertDepResult {
  std::vector<RevertDep> deps;  // sorted by (writer, dest, state)
  Diagnostics diagnostics;
};

/// Pairs every write of s with each branch start whose revert guard reads s.
inline RevertDepResult extract_revert_deps(const ProgramIndex& idx, const std::vector<RwDep>& rw) {
  RevertDepResult res;
  struct GuardedRead {
    std::size_t read_block, dest, pred_count;
    std::vector<RevertGuard> guards;
  };
  std::map<std::size_t, std::vector<GuardedRead>> guarded;  // state -> reads
  std::set<std::size_t> reported;
  for (std::size_t f = 0; f < idx.function_count(); ++f) {
    const auto du = detail::def_use(idx, f);
    for (const auto& d : rw) {
      if (d.access != Access::Read || idx.block(d.block).fn != f) continue;
      const auto& ins = idx.block(d.block).block->instructions[d.instr];
      if (!ins.result) continue;
      std::set<RevertGuard> guards;
      bool via_memory = false;
      for (const auto& [b, i] : detail::forward_slice(idx, du, *ins.result)) {
        const auto& use = idx.block(b).block->instructions[i];
        if (use.op == Opcode::MSTORE) via_memory = true;
        if (use.op != Opcode::JUMPI) continue;
        const auto& succ = idx.successors(b);
        if (succ.size() != 2) continue;
        const bool r0 = detail::reaches_revert(idx, succ[0]), r1 = detail::reaches_revert(idx, succ[1]);
        if (!r0 && !r1) continue;
        RevertGuard g;
        g.branch_block = b;
        g.revert_succ = r0 ? succ[0] : succ[1];
        if (!(r0 && r1)) g.continue_succ = r0 ? succ[1] : succ[0];
        guards.insert(g);
      }
      if (via_memory && guards.empty())
        res.diagnostics.push_back({Diagnostic::Severity::Note, "graphs", "MemoryRoutedRead",
                                   idx.block(d.block).id + ": read of " + idx.state(d.state).id +
                                       " passes through memory; guards on it are not tracked"});
      if (guards.empty()) continue;
      std::size_t dest = d.block;
      const auto& preds = idx.predecessors(d.block);
      std::set<std::size_t> distinct(preds.begin(), preds.end());
      if (distinct.size() == 1) dest = *distinct.begin();
      guarded[d.state].push_back({d.block, dest, distinct.size(), {guards.begin(), guards.end()}});
    }
  }
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, RevertDep> merged;
  for (const auto& w : rw) {
    if (w.access != Access::Write) continue;
    auto it = guarded.find(w.state);
    if (it == guarded.end()) continue;
    for (const auto& gr : it->second) {
      // A function guarding on its own writes is not a cross-function dependency.
      if (idx.block(w.block).fn == idx.block(gr.read_block).fn) continue;
      if (gr.pred_count > 1 && reported.insert(gr.read_block).second)
        res.diagnostics.push_back({Diagnostic::Severity::Note, "graphs", "BranchStartFallback",
                                   idx.block(gr.read_block).id + " has " + std::to_string(gr.pred_count) +
                                       " predecessors; revert edges target the read block itself"});
      auto& dep = merged[{w.block, gr.dest, w.state}];
      if (dep.guards.empty()) {
        dep.writer = w.block;
        dep.dest = gr.dest;
        dep.state = w.state;
        dep.read_block = gr.read_block;
      } else {
        dep.read_block = std::min(dep.read_block, gr.read_block);
      }
      dep.guards.insert(dep.guards.end(), gr.guards.begin(), gr.guards.end());
      std::sort(dep.guards.begin(), dep.guards.end());
      dep.guards.erase(std::unique(dep.guards.begin(), dep.guards.end(),
                                   [](const auto& a, const auto& b) { return !(a < b) && !(b < a); }),
                       dep.guards.end());
    }
  }
  for (auto& [k, v] : merged) res.deps.push_back(std::move(v));
  return res;
}

// ---------------------------------------------------------------------------
// SDG

enum class SdgEdgeKind : std::uint8_t { Intra, InterCall, InterReturn, StateWrite, StateRead, StateRevert };

inline std::string_view sdg_edge_kind_name(SdgEdgeKind k) {
  switch (k) {
    case SdgEdgeKind::Intra: return "intra-cfg";
    case SdgEdgeKind::InterCall: return "inter-call";
    case SdgEdgeKind::InterReturn: return "inter-return";
    case SdgEdgeKind::StateWrite: return "state-write";
    case SdgEdgeKind::StateRead: return "state-read";
    case SdgEdgeKind::StateRevert: return "state-revert";
  }
  return "intra-cfg";
}

struct SdgNode {
  bool is_state = false;
  std::size_t index = 0;
  friend auto operator<=>(const SdgNode&, const SdgNode&) = default;
};

struct SdgEdge {
  SdgNode src, dst;
  SdgEdgeKind kind = SdgEdgeKind::Intra;
  std::size_t state = kNone;  // tag for state-revert edges
  friend auto operator<=>(const SdgEdge&, const SdgEdge&) = default;
};

struct Sdg {
  std::size_t block_count = 0;
  std::size_t state_count = 0;
  std::vector<SdgEdge> edges;  // multiset, sorted
};

inline Sdg build_sdg(const ProgramIndex& idx, const Icfg& icfg, const std::vector<RwDep>& rw,
                     const std::vector<RevertDep>& revert) {
  Sdg g;
  g.block_count = idx.block_count();
  g.state_count = idx.state_count();
  for (const auto& e : icfg.edges) {
    auto k = e.kind == IcfgEdgeKind::Intra       ? SdgEdgeKind::Intra
           : e.kind == IcfgEdgeKind::InterCall ? SdgEdgeKind::InterCall
                                                : SdgEdgeKind::InterReturn;
    g.edges.push_back({{false, e.src}, {false, e.dst}, k, kNone});
  }
  for (const auto& d : rw) {
    if (d.access == Access::Write)
      g.edges.push_back({{false, d.block}, {true, d.state}, SdgEdgeKind::StateWrite, kNone});
    else
      g.edges.push_back({{true, d.state}, {false, d.block}, SdgEdgeKind::StateRead, kNone});
  }
  for (const auto& d : revert) g.edges.push_back({{false, d.writer}, {false, d.dest}, SdgEdgeKind::StateRevert, d.state});
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

// ---------------------------------------------------------------------------
// Dumps: `src -> dst [kind] [s=var]` edge lists and DOT.

struct GraphText {
  std::vector<std::string> lines;  // edge list
  std::string dot;
};

namespace detail {

inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}

inline GraphText render_edges(const std::string& name,
                              const std::vector<std::tuple<std::string, std::string, std::string, std::string>>& edges) {
  GraphText t;
  std::set<std::string> nodes;
  std::ostringstream dot;
  dot << "digraph " << name << " {\n";
  for (const auto& [src, dst, kind, s] : edges) {
    std::string line = src + " -> " + dst + " [" + kind + "]";
    if (!s.empty()) line += " [s=" + s + "]";
    t.lines.push_back(line);
    nodes.insert(src);
    nodes.insert(dst);
  }
  for (const auto& n : nodes) dot << "  " << dot_quote(n) << ";\n";
  for (const auto& [src, dst, kind, s] : edges) {
    dot << "  " << dot_quote(src) << " -> " << dot_quote(dst) << " [label=" << dot_quote(s.empty() ? kind : kind + " " + s)
        << "];\n";
  }
  dot << "}\n";
  t.dot = dot.str();
  return t;
}

}  // namespace detail

inline GraphText render_callgraph(const ProgramIndex& idx, const CallGraph& cg) {
  std::vector<std::tuple<std::string, std::string, std::string, std::string>> e;
  for (const auto& [k, kind] : cg.edges)
    e.emplace_back(idx.fn(k.first).id, k.second == kNone ? "EXTERNAL" : idx.fn(k.second).id,
                   std::string(call_edge_kind_name(kind)), "");
  return detail::render_edges("callgraph", e);
}

inline GraphText render_icfg(const ProgramIndex& idx, const Icfg& g) {
  std::vector<std::tuple<std::string, std::string, std::string, std::string>> e;
  for (const auto& x : g.edges)
    e.emplace_back(idx.block(x.src).id, idx.block(x.dst).id, std::string(icfg_edge_kind_name(x.kind)), "");
  return detail::render_edges("icfg", e);
}

inline GraphText render_sdg(const ProgramIndex& idx, const Sdg& g) {
  auto name = [&](const SdgNode& n) { return n.is_state ? idx.state(n.index).id : idx.block(n.index).id; };
  std::vector<std::tuple<std::string, std::string, std::string, std::string>> e;
  for (const auto& x : g.edges)
    e.emplace_back(name(x.src), name(x.dst), std::string(sdg_edge_kind_name(x.kind)),
                   x.state == kNone ? "" : idx.state(x.state).var->name);
  return detail::render_edges("sdg", e);
}

}  // namespace crossinspect
