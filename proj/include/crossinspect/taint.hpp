#pragma once

// Taint propagation over the program's data flow, storage and state-revert
// dependencies. Every edge is owned by a guard function and fires only while
// that function is active (reachable from the analyzed entries, or activated
// by a state-revert edge).

#include <algorithm>
#include <atomic>
#include <bitset>
#include <deque>
#include <map>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "detect.hpp"
#include "graphs.hpp"
#include "paths.hpp"

namespace crossinspect {

enum class TaintNodeKind : std::uint8_t { Value, Storage, Access, Mem, Active };

struct TaintNode {
  TaintNodeKind kind = TaintNodeKind::Value;
  std::size_t fn = kNone;
  std::size_t state = kNone;
  std::string value;
  friend auto operator<=>(const TaintNode&, const TaintNode&) = default;
};

enum class TaintEdgeKind : std::uint8_t { DefUse, StorageWrite, StorageRead, AccessMark, Memory, CallArg, CallReturn, Revert };

struct TaintEdge {
  std::size_t src = 0, dst = 0;
  std::size_t guard = 0;  // function index
  TaintEdgeKind kind = TaintEdgeKind::DefUse;
};

struct TaintConfig {
  std::bitset<32> taint_ops = std::bitset<32>().set();  // opcodes whose operands flow into the result
  bool revert_edges = true;
  std::size_t iteration_limit = 10000;  // fired edges per guard function
};

class TaintGraph {
 public:
  TaintGraph(const ProgramIndex& idx, const CallGraph& cg, const std::vector<RevertDep>& revert,
             const TaintConfig& cfg = {})
      : idx_(&idx) {
    build(idx, cg, revert, cfg);
  }

  const ProgramIndex& index() const { return *idx_; }
  std::size_t size() const { return nodes_.size(); }
  const TaintNode& node(std::size_t n) const { return nodes_[n]; }
  const std::vector<TaintEdge>& edges() const { return edges_; }
  const std::vector<std::size_t>& out(std::size_t n) const { return out_[n]; }

  std::size_t find(const TaintNode& n) const {
    auto it = lookup_.find(n);
    return it == lookup_.end() ? kNone : it->second;
  }
  std::size_t value(std::size_t fn, const std::string& v) const { return find({TaintNodeKind::Value, fn, kNone, v}); }
  std::size_t storage(std::size_t s) const { return find({TaintNodeKind::Storage, kNone, s, {}}); }
  std::size_t access(std::size_t s, std::size_t fn) const { return find({TaintNodeKind::Access, fn, s, {}}); }
  std::size_t active(std::size_t fn) const { return find({TaintNodeKind::Active, fn, kNone, {}}); }

 private:
  std::size_t intern(TaintNode n) {
    auto [it, inserted] = lookup_.try_emplace(n, nodes_.size());
    if (inserted) {
      nodes_.push_back(std::move(n));
      out_.emplace_back();
    }
    return it->second;
  }
  std::size_t v(std::size_t fn, const std::string& name) { return intern({TaintNodeKind::Value, fn, kNone, name}); }
  std::size_t stor(std::size_t s) { return intern({TaintNodeKind::Storage, kNone, s, {}}); }
  std::size_t acc(std::size_t s, std::size_t fn) { return intern({TaintNodeKind::Access, fn, s, {}}); }
  std::size_t mem(std::size_t fn) { return intern({TaintNodeKind::Mem, fn, kNone, {}}); }
  std::size_t act(std::size_t fn) { return intern({TaintNodeKind::Active, fn, kNone, {}}); }

  void edge(std::size_t src, std::size_t dst, std::size_t guard, TaintEdgeKind k) {
    out_[src].push_back(edges_.size());
    edges_.push_back({src, dst, guard, k});
  }

  void build(const ProgramIndex& idx, const CallGraph& cg, const std::vector<RevertDep>& revert, const TaintConfig& cfg) {
    const auto& u = idx.universe();
    for (std::size_t f = 0; f < idx.function_count(); ++f) {
      act(f);
      mem(f);
      for (const auto& p : idx.fn(f).function->params) v(f, p.name);
    }
    std::map<std::pair<std::size_t, std::size_t>, const CallSite*> site_at;
    for (const auto& s : cg.sites) site_at[{s.block, s.instr}] = &s;

    for (std::size_t f = 0; f < idx.function_count(); ++f) {
      const auto& fi = idx.fn(f);
      const auto ci = fi.contract;
      for (std::size_t k = 0; k < fi.block_count; ++k) {
        const auto gb = fi.first_block + k;
        const auto& ins = idx.block(gb).block->instructions;
        for (std::size_t i = 0; i < ins.size(); ++i) {
          const auto& in = ins[i];
          if (in.result && cfg.taint_ops.test(static_cast<std::size_t>(in.op))) {
            const auto r = v(f, *in.result);
            for (const auto& o : in.operands)
              if (o.is_value()) edge(v(f, o.text), r, f, TaintEdgeKind::DefUse);
          }
          if ((in.op == Opcode::SLOAD || in.op == Opcode::SSTORE) && in.state_ref) {
            const auto s = idx.find_state(ci, *in.state_ref);
            if (s == kNone) continue;
            if (in.op == Opcode::SLOAD && in.result) {
              const auto r = v(f, *in.result);
              edge(stor(s), r, f, TaintEdgeKind::StorageRead);
              edge(r, acc(s, f), f, TaintEdgeKind::AccessMark);
            } else if (in.op == Opcode::SSTORE) {
              for (const auto& o : in.operands) {
                if (!o.is_value()) continue;
                edge(v(f, o.text), stor(s), f, TaintEdgeKind::StorageWrite);
                edge(v(f, o.text), acc(s, f), f, TaintEdgeKind::AccessMark);
              }
            }
          }
          if (in.op == Opcode::MSTORE)
            for (const auto& o : in.operands)
              if (o.is_value()) edge(v(f, o.text), mem(f), f, TaintEdgeKind::Memory);
          if (in.op == Opcode::MLOAD && in.result) edge(mem(f), v(f, *in.result), f, TaintEdgeKind::Memory);
          if (is_call(in.op)) {
            auto it = site_at.find({gb, i});
            if (it != site_at.end() && it->second->callee != kNone) call_edges(idx, f, in, it->second->callee);
          }
        }
      }
    }
    if (cfg.revert_edges)
      for (const auto& d : revert) revert_edges(idx, d);
    (void)u;
  }

  void call_edges(const ProgramIndex& idx, std::size_t f, const Instruction& in, std::size_t g) {
    const auto& callee = idx.fn(g);
    std::vector<const Operand*> args;
    for (std::size_t k = in.op == Opcode::CALLVALUECALL ? 1 : 0; k < in.operands.size(); ++k) args.push_back(&in.operands[k]);
    const auto& params = callee.function->params;
    for (std::size_t k = 0; k < args.size() && k < params.size(); ++k)
      if (args[k]->is_value()) edge(v(f, args[k]->text), v(g, params[k].name), f, TaintEdgeKind::CallArg);
    for (std::size_t k = 0; k < callee.block_count; ++k) {
      for (const auto& ci : idx.block(callee.first_block + k).block->instructions) {
        // Lifted callees read arguments from calldata rather than parameters.
        if (ci.op == Opcode::CALLDATALOAD && ci.result) {
          edge(mem(f), v(g, *ci.result), f, TaintEdgeKind::CallArg);
          for (const auto* a : args)
            if (a->is_value()) edge(v(f, a->text), v(g, *ci.result), f, TaintEdgeKind::CallArg);
        }
        if (ci.op == Opcode::CALLVALUE && ci.result && in.op == Opcode::CALLVALUECALL && in.operands[0].is_value())
          edge(v(f, in.operands[0].text), v(g, *ci.result), f, TaintEdgeKind::CallArg);
        if (ci.op == Opcode::RETURN && in.result)
          for (const auto& o : ci.operands)
            if (o.is_value()) edge(v(g, o.text), v(f, *in.result), g, TaintEdgeKind::CallReturn);
      }
    }
  }

  // Storage(s) written by the writer activates the guarded function and
  // taints what the guarded region reads and writes.
  void revert_edges(const ProgramIndex& idx, const RevertDep& d) {
    const auto fw = idx.block(d.writer).fn, fd = idx.block(d.dest).fn;
    const auto src = stor(d.state);
    edge(src, act(fd), fw, TaintEdgeKind::Revert);
    const auto ci = idx.fn(fd).contract;
    for (auto b : guarded_region(idx, d)) {
      for (const auto& in : idx.block(b).block->instructions) {
        if (!in.state_ref) continue;
        const auto s = idx.find_state(ci, *in.state_ref);
        if (s == kNone) continue;
        if (in.op == Opcode::SLOAD && in.result) edge(src, v(fd, *in.result), fw, TaintEdgeKind::Revert);
        if (in.op == Opcode::SSTORE) {
          edge(src, stor(s), fw, TaintEdgeKind::Revert);
          edge(src, acc(s, fd), fw, TaintEdgeKind::Revert);
        }
      }
    }
  }

 public:
  /// Blocks reachable from the non-reverting side of each guard of `d`.
  static std::set<std::size_t> guarded_region(const ProgramIndex& idx, const RevertDep& d) {
    std::set<std::size_t> region;
    std::vector<std::size_t> work;
    for (const auto& g : d.guards)
      if (g.continue_succ != kNone) work.push_back(g.continue_succ);
    while (!work.empty()) {
      auto b = work.back();
      work.pop_back();
      if (!region.insert(b).second) continue;
      for (auto s : idx.successors(b)) work.push_back(s);
    }
    return region;
  }

 private:
  const ProgramIndex* idx_;
  std::vector<TaintNode> nodes_;
  std::map<TaintNode, std::size_t> lookup_;
  std::vector<TaintEdge> edges_;
  std::vector<std::vector<std::size_t>> out_;
};

struct TaintState {
  std::vector<std::uint8_t> tainted;  // per node
  std::vector<std::uint8_t> active;   // per function
  friend bool operator==(const TaintState& a, const TaintState& b) {
    return a.tainted == b.tainted && a.active == b.active;
  }
  std::size_t tainted_count() const { return static_cast<std::size_t>(std::count(tainted.begin(), tainted.end(), 1)); }
};

struct TaintSeeds {
  std::vector<std::size_t> nodes;
  std::vector<std::uint8_t> active;  // per function
};

struct TaintCounters {
  std::uint64_t fired_edges = 0;
  std::uint64_t merge_iterations = 0;
  std::uint64_t pending_edges = 0;
};

struct TaintResult {
  TaintState state;
  TaintCounters counters;
  Diagnostics diagnostics;
};

// ---------------------------------------------------------------------------
// Sources

/// Functions reachable from `fn` over resolved call-graph edges, `fn` included.
inline std::set<std::size_t> call_region(const CallGraph& cg, std::size_t fn) {
  std::map<std::size_t, std::vector<std::size_t>> adj;
  for (const auto& [e, kind] : cg.edges)
    if (e.second != kNone) adj[e.first].push_back(e.second);
  std::set<std::size_t> seen{fn};
  std::vector<std::size_t> work{fn};
  while (!work.empty()) {
    auto f = work.back();
    work.pop_back();
    for (auto g : adj[f])
      if (seen.insert(g).second) work.push_back(g);
  }
  return seen;
}

/// (function, value) pairs seeded within `fns`: parameters of public
/// functions and of cross-contract callees, plus calldata, value and caller
/// reads in public functions.
inline std::set<std::pair<std::size_t, std::string>> seed_values(const ProgramIndex& idx, const CallGraph& cg,
                                                                 const std::set<std::size_t>& fns) {
  std::set<std::size_t> cross_callees;
  for (const auto& s : cg.sites)
    if (s.callee != kNone && s.kind == CallEdgeKind::CrossContract) cross_callees.insert(s.callee);
  std::set<std::pair<std::size_t, std::string>> out;
  for (auto f : fns) {
    const auto& fn = *idx.fn(f).function;
    const bool pub = fn.visibility == Visibility::Public;
    if (pub || cross_callees.count(f))
      for (const auto& p : fn.params) out.insert({f, p.name});
    if (!pub) continue;
    for (const auto& b : fn.blocks)
      for (const auto& in : b.instructions)
        if (in.result && (in.op == Opcode::CALLDATALOAD || in.op == Opcode::CALLVALUE || in.op == Opcode::CALLER))
          out.insert({f, *in.result});
  }
  return out;
}

/// Every taint source of the universe.
inline std::set<std::pair<std::size_t, std::string>> seed_sources(const ProgramIndex& idx, const CallGraph& cg) {
  std::set<std::size_t> all;
  for (std::size_t f = 0; f < idx.function_count(); ++f) all.insert(f);
  return seed_values(idx, cg, all);
}

inline TaintSeeds make_seeds(const TaintGraph& g, const std::set<std::pair<std::size_t, std::string>>& values,
                             const std::set<std::size_t>& active_fns) {
  TaintSeeds s;
  s.active.assign(g.index().function_count(), 0);
  for (auto f : active_fns) s.active[f] = 1;
  for (const auto& [f, name] : values)
    if (auto n = g.value(f, name); n != kNone) s.nodes.push_back(n);
  return s;
}

// ---------------------------------------------------------------------------
// Propagation

namespace detail {

class TaintClosure {
 public:
  TaintClosure(const TaintGraph& g, const TaintConfig& cfg, TaintState& st, const std::vector<std::uint8_t>* allowed)
      : g_(g), cfg_(cfg), st_(st), allowed_(allowed), waiting_(st.active.size()), steps_(st.active.size(), 0) {}

  void seed(std::size_t n) { taint(n); }
  void offer(std::size_t e) { try_edge(e); }
  void run() {
    while (!queue_.empty()) {
      auto n = queue_.front();
      queue_.pop_front();
      for (auto e : g_.out(n)) try_edge(e);
    }
  }
  /// Edges that could not fire here: outside the allowed functions, or guarded
  /// by a function that never became active.
  std::vector<std::size_t> leftovers() const {
    auto out = filtered_;
    for (std::size_t f = 0; f < waiting_.size(); ++f)
      if (!st_.active[f]) out.insert(out.end(), waiting_[f].begin(), waiting_[f].end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
  std::uint64_t fired() const { return fired_; }
  Diagnostics take_diagnostics() { return std::move(diags_); }

 private:
  void taint(std::size_t n) {
    if (st_.tainted[n]) return;
    st_.tainted[n] = 1;
    queue_.push_back(n);
    const auto& node = g_.node(n);
    if (node.kind == TaintNodeKind::Active) activate(node.fn);
  }
  void activate(std::size_t f) {
    if (st_.active[f]) return;
    st_.active[f] = 1;
    auto w = std::move(waiting_[f]);
    waiting_[f].clear();
    for (auto e : w) try_edge(e);
  }
  void try_edge(std::size_t ei) {
    const auto& e = g_.edges()[ei];
    if (st_.tainted[e.dst]) return;
    if (allowed_ && !(*allowed_)[e.guard]) {
      filtered_.push_back(ei);
      return;
    }
    if (!st_.active[e.guard]) {
      waiting_[e.guard].push_back(ei);
      return;
    }
    if (steps_[e.guard]++ >= cfg_.iteration_limit) {
      if (steps_[e.guard] == cfg_.iteration_limit + 1)
        diags_.push_back({Diagnostic::Severity::Warning, "taint", "IterationLimit",
                          g_.index().fn(e.guard).id + " exceeded " + std::to_string(cfg_.iteration_limit) +
                              " propagation steps; state is partial"});
      return;
    }
    ++fired_;
    taint(e.dst);
  }

  const TaintGraph& g_;
  const TaintConfig& cfg_;
  TaintState& st_;
  const std::vector<std::uint8_t>* allowed_;
  std::deque<std::size_t> queue_;
  std::vector<std::vector<std::size_t>> waiting_;
  std::vector<std::size_t> filtered_;
  std::vector<std::size_t> steps_;
  std::uint64_t fired_ = 0;
  Diagnostics diags_;
};

inline TaintState empty_state(const TaintGraph& g, const TaintSeeds& seeds) {
  TaintState st;
  st.tainted.assign(g.size(), 0);
  st.active = seeds.active;
  st.active.resize(g.index().function_count(), 0);
  return st;
}

}  // namespace detail

/// Worklist closure from the seeds until no edge fires.
inline TaintResult propagate_serial(const TaintGraph& g, const TaintSeeds& seeds, const TaintConfig& cfg = {}) {
  TaintResult r;
  r.state = detail::empty_state(g, seeds);
  detail::TaintClosure c(g, cfg, r.state, nullptr);
  // Functions already active: their activation edges count as satisfied.
  for (auto n : seeds.nodes) c.seed(n);
  for (std::size_t f = 0; f < r.state.active.size(); ++f)
    if (r.state.active[f]) c.seed(g.active(f));
  c.run();
  r.counters.fired_edges = c.fired();
  r.diagnostics = c.take_diagnostics();
  return r;
}

/// One unit of parallel work: the seeds of one entry, processed in order,
/// restricted to edges owned by the functions of its region.
struct TaintTask {
  std::vector<std::size_t> seeds;
  std::vector<std::uint8_t> region;  // per function
};

struct ParallelTaintOptions {
  std::size_t workers = 0;  // 0: one per task
  std::uint64_t schedule_seed = 0;
};

/// Runs each task on a private state, then merges: union of the states, and
/// the deferred edges of every worker re-examined until nothing fires.
inline TaintResult propagate_parallel(const TaintGraph& g, const TaintSeeds& seeds, const std::vector<TaintTask>& tasks,
                                      const TaintConfig& cfg = {}, const ParallelTaintOptions& opts = {}) {
  struct WorkerOut {
    TaintState state;
    std::vector<std::size_t> pending;
    std::uint64_t fired = 0;
    Diagnostics diags;
  };
  std::vector<WorkerOut> outs(tasks.size());
  auto run_task = [&](std::size_t i) {
    auto& o = outs[i];
    o.state = detail::empty_state(g, seeds);
    detail::TaintClosure c(g, cfg, o.state, &tasks[i].region);
    for (std::size_t f = 0; f < o.state.active.size(); ++f)
      if (o.state.active[f]) c.seed(g.active(f));
    for (auto n : tasks[i].seeds) c.seed(n);
    c.run();
    o.pending = c.leftovers();
    o.fired = c.fired();
    o.diags = c.take_diagnostics();
  };

  std::vector<std::size_t> schedule(tasks.size());
  for (std::size_t i = 0; i < schedule.size(); ++i) schedule[i] = i;
  if (opts.schedule_seed != 0) std::shuffle(schedule.begin(), schedule.end(), std::mt19937_64(opts.schedule_seed));
  std::size_t threads = opts.workers == 0 ? tasks.size() : std::min(tasks.size(), opts.workers);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < schedule.size();) run_task(schedule[k]);
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  TaintResult r;
  r.state = detail::empty_state(g, seeds);
  std::vector<std::size_t> frontier;
  std::vector<std::uint8_t> in_task(g.size(), 0);
  for (const auto& t : tasks)
    for (auto n : t.seeds) in_task[n] = 1;
  for (const auto& o : outs) {
    for (std::size_t n = 0; n < g.size(); ++n) r.state.tainted[n] |= o.state.tainted[n];
    for (std::size_t f = 0; f < r.state.active.size(); ++f) r.state.active[f] |= o.state.active[f];
    frontier.insert(frontier.end(), o.pending.begin(), o.pending.end());
    r.counters.fired_edges += o.fired;
    r.diagnostics.insert(r.diagnostics.end(), o.diags.begin(), o.diags.end());
  }
  r.counters.pending_edges = frontier.size();

  // Seeds no task covered are expanded here.
  std::vector<std::size_t> fresh;
  for (auto n : seeds.nodes)
    if (!in_task[n]) fresh.push_back(n);
  for (std::size_t f = 0; f < r.state.active.size(); ++f)
    if (r.state.active[f] && !std::any_of(outs.begin(), outs.end(), [&](const WorkerOut& o) { return o.state.active[f]; }))
      fresh.push_back(g.active(f));
  for (auto n : fresh) {
    r.state.tainted[n] = 1;
    for (auto e : g.out(n)) frontier.push_back(e);
  }

  std::vector<std::vector<std::size_t>> waiting(r.state.active.size());
  std::vector<std::size_t> steps(r.state.active.size(), 0);
  while (!frontier.empty()) {
    ++r.counters.merge_iterations;
    std::sort(frontier.begin(), frontier.end());
    frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());
    std::vector<std::size_t> next;
    for (auto ei : frontier) {
      const auto& e = g.edges()[ei];
      if (!r.state.tainted[e.src] || r.state.tainted[e.dst]) continue;
      if (!r.state.active[e.guard]) {
        waiting[e.guard].push_back(ei);
        continue;
      }
      if (steps[e.guard]++ >= cfg.iteration_limit) continue;
      ++r.counters.fired_edges;
      r.state.tainted[e.dst] = 1;
      for (auto o : g.out(e.dst)) next.push_back(o);
      const auto& node = g.node(e.dst);
      if (node.kind == TaintNodeKind::Active && !r.state.active[node.fn]) {
        r.state.active[node.fn] = 1;
        next.insert(next.end(), waiting[node.fn].begin(), waiting[node.fn].end());
        waiting[node.fn].clear();
      }
    }
    frontier = std::move(next);
  }
  std::sort(r.diagnostics.begin(), r.diagnostics.end(), [](const Diagnostic& a, const Diagnostic& b) {
    return std::tie(a.code, a.message) < std::tie(b.code, b.message);
  });
  r.diagnostics.erase(std::unique(r.diagnostics.begin(), r.diagnostics.end(),
                                  [](const Diagnostic& a, const Diagnostic& b) {
                                    return a.code == b.code && a.message == b.message;
                                  }),
                      r.diagnostics.end());
  return r;
}

// ---------------------------------------------------------------------------
// Queries on a finished state

inline std::set<std::size_t> tainted_functions(const TaintGraph& g, const TaintState& st) {
  std::set<std::size_t> out;
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (!st.tainted[n]) continue;
    const auto& node = g.node(n);
    if (node.kind == TaintNodeKind::Value || node.kind == TaintNodeKind::Access || node.kind == TaintNodeKind::Mem)
      out.insert(node.fn);
  }
  return out;
}

inline std::set<std::size_t> tainted_state_vars(const TaintGraph& g, const TaintState& st) {
  std::set<std::size_t> out;
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (!st.tainted[n]) continue;
    const auto& node = g.node(n);
    if (node.kind == TaintNodeKind::Storage || node.kind == TaintNodeKind::Access) out.insert(node.state);
  }
  return out;
}

inline bool is_tainted(const TaintGraph&, const TaintState& st, std::size_t node) {
  return node != kNone && st.tainted[node];
}

/// Seeds and active set for the analysis of one entry function.
inline TaintSeeds entry_seeds(const TaintGraph& g, const CallGraph& cg, std::size_t entry_fn) {
  const auto region = call_region(cg, entry_fn);
  return make_seeds(g, seed_values(g.index(), cg, region), region);
}

/// Renders `A.f→B.g→[s]→C.h→[t,u]`: the functions along the entry path, then
/// the first state-revert hop leaving it on tainted state, followed by the
/// state the destination function touches under taint.
inline std::string format_path(const TaintGraph& g, const TaintState& st, const Path& blocks,
                               const std::vector<RevertDep>& revert) {
  const auto& idx = g.index();
  std::vector<std::size_t> chain;
  for (auto b : blocks) {
    const auto f = idx.block(b).fn;
    if (chain.empty() || chain.back() != f) chain.push_back(f);
  }
  std::string out;
  for (std::size_t i = 0; i < chain.size(); ++i) out += (i ? "→" : "") + idx.fn(chain[i]).id;
  const std::set<std::size_t> in_chain(chain.begin(), chain.end());
  std::vector<const RevertDep*> hops;
  for (const auto& d : revert) hops.push_back(&d);
  std::stable_sort(hops.begin(), hops.end(), [](auto* a, auto* b) { return a->dest < b->dest; });
  for (const auto* d : hops) {
    const auto fw = idx.block(d->writer).fn, fd = idx.block(d->dest).fn;
    if (!in_chain.count(fw) || in_chain.count(fd) || !is_tainted(g, st, g.storage(d->state))) continue;
    out += "→[" + idx.state(d->state).var->name + "]→" + idx.fn(fd).id;
    std::vector<std::string> touched;
    std::set<std::size_t> seen{d->state};
    const auto& fi = idx.fn(fd);
    for (std::size_t k = 0; k < fi.block_count; ++k)
      for (const auto& in : idx.block(fi.first_block + k).block->instructions) {
        if (!in.state_ref) continue;
        const auto s = idx.find_state(fi.contract, *in.state_ref);
        if (s == kNone || seen.count(s) || !is_tainted(g, st, g.access(s, fd))) continue;
        seen.insert(s);
        touched.push_back(idx.state(s).var->name);
      }
    if (!touched.empty()) {
      out += "→[";
      for (std::size_t i = 0; i < touched.size(); ++i) out += (i ? "," : "") + touched[i];
      out += "]";
    }
    break;
  }
  return out;
}

}  // namespace crossinspect
