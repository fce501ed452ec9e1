#pragma once

// End-to-end analysis: labels, graphs, indicators, entry paths, taint,
// suppression, findings.

#include <chrono>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "detect.hpp"
#include "graphs.hpp"
#include "manifest.hpp"
#include "paths.hpp"
#include "semantics.hpp"
#include "taint.hpp"

namespace crossinspect {

enum class SemanticsMode : std::uint8_t { Off, Heuristic, File };

struct PipelineConfig {
  bool serial = false;  // no threads, no memo table
  PathOptions paths;
  std::size_t taint_workers = 0;
  SemanticsMode semantics = SemanticsMode::Heuristic;
  std::string semantics_file;
  bool sd_edges = true;
  TaintConfig taint;
  bool overflow_requires_taint = true;
  LabelOptions labels;
  std::vector<SuppressionRule> suppression = default_suppression_rules();
};

inline void set_semantics(PipelineConfig& cfg, const std::string& spec) {
  if (spec == "off") {
    cfg.semantics = SemanticsMode::Off;
  } else if (spec == "heuristic") {
    cfg.semantics = SemanticsMode::Heuristic;
  } else if (spec.rfind("file:", 0) == 0 && spec.size() > 5) {
    cfg.semantics = SemanticsMode::File;
    cfg.semantics_file = spec.substr(5);
  } else {
    throw Error("pipeline", "UnknownSemanticsMode", spec);
  }
}

/// Applies the manifest's "config" object and "semantics" entry.
inline PipelineConfig config_from_manifest(const Manifest& m, PipelineConfig cfg = {}) {
  const auto& j = m.config;
  try {
    cfg.paths.max_paths_per_pair = j.value("max_paths_per_pair", cfg.paths.max_paths_per_pair);
    cfg.paths.max_depth = j.value("max_depth", cfg.paths.max_depth);
    cfg.paths.workers = j.value("workers", cfg.paths.workers);
    cfg.paths.schedule_seed = j.value("schedule_seed", cfg.paths.schedule_seed);
    cfg.taint_workers = j.value("taint_workers", cfg.taint_workers);
    cfg.taint.iteration_limit = j.value("iteration_limit", cfg.taint.iteration_limit);
    cfg.overflow_requires_taint = j.value("overflow_requires_taint", cfg.overflow_requires_taint);
    cfg.labels.model_threshold = j.value("model_threshold", cfg.labels.model_threshold);
  } catch (const nlohmann::json::exception& e) {
    throw Error("pipeline", "ManifestInvalid", std::string("config: ") + e.what());
  }
  if (m.semantics) set_semantics(cfg, *m.semantics);
  return cfg;
}

enum class Evidence : std::uint8_t { Confirmed, Reachable, Suppressed };

inline std::string_view evidence_name(Evidence e) {
  switch (e) {
    case Evidence::Confirmed: return "confirmed";
    case Evidence::Reachable: return "reachable";
    case Evidence::Suppressed: return "suppressed";
  }
  return "confirmed";
}

struct Finding {
  Rule rule = Rule::Reentrancy;
  Evidence evidence = Evidence::Confirmed;
  std::string function;
  std::string block;
  std::size_t instruction = 0;
  std::string entry;
  std::string path;
  std::vector<std::string> blocks;  // the entry path
  std::vector<std::string> tainted_functions;
  std::vector<std::string> tainted_state_vars;
  std::optional<std::string> suppressed_by;
  std::string detail;
  friend bool operator==(const Finding&, const Finding&) = default;
};

struct ReportCounters {
  std::uint64_t functions = 0;
  std::uint64_t retained_functions = 0;
  std::uint64_t entries = 0;
  std::uint64_t indicators = 0;
  std::uint64_t unreachable_indicators = 0;
  std::uint64_t revert_edges = 0;
  std::uint64_t paths = 0;
  std::uint64_t block_expansions = 0;
  std::uint64_t memo_hits = 0;
  std::uint64_t memo_entries = 0;
  std::uint64_t taint_fired_edges = 0;
  std::uint64_t merge_iterations = 0;
  std::uint64_t pending_edges = 0;
  std::uint64_t tainted_nodes = 0;
  std::uint64_t tainted_functions = 0;
  std::uint64_t tainted_state_vars = 0;
  std::uint64_t finding_tainted_functions = 0;  // summed over findings
  friend bool operator==(const ReportCounters&, const ReportCounters&) = default;
};

struct StageTiming {
  std::string stage;
  double ms = 0;
};

struct Report {
  bool serial = false;
  std::vector<Finding> findings;
  std::vector<Finding> suppressed;
  std::map<std::string, std::string> labels;  // "Contract.var" -> category
  Diagnostics diagnostics;
  ReportCounters counters;
  std::vector<StageTiming> timing;
};

namespace detail {

class StageClock {
 public:
  explicit StageClock(std::vector<StageTiming>& out) : out_(out), t0_(std::chrono::steady_clock::now()) {}
  void lap(const std::string& stage) {
    const auto t = std::chrono::steady_clock::now();
    out_.push_back({stage, std::chrono::duration<double, std::milli>(t - t0_).count()});
    t0_ = t;
  }

 private:
  std::vector<StageTiming>& out_;
  std::chrono::steady_clock::time_point t0_;
};

inline void append(Diagnostics& to, const Diagnostics& from) { to.insert(to.end(), from.begin(), from.end()); }

inline std::size_t chain_length(const ProgramIndex& idx, const Path& p) {
  std::size_t n = 0, last = kNone;
  for (auto b : p) {
    const auto f = idx.block(b).fn;
    if (f != last) ++n;
    last = f;
  }
  return n;
}

}  // namespace detail

/// Analyzes `u` (canonical, validated). `entries` lists "Contract.fn" ids; when
/// absent every public function is an entry.
inline Report run_pipeline(Universe u, const std::vector<Binding>& bindings,
                           const std::optional<std::vector<std::string>>& entries, const PipelineConfig& cfg,
                           Diagnostics initial = {}) {
  Report rep;
  rep.serial = cfg.serial;
  rep.diagnostics = std::move(initial);
  detail::StageClock clock(rep.timing);

  // Labels
  switch (cfg.semantics) {
    case SemanticsMode::Off: clear_labels(u); break;
    case SemanticsMode::Heuristic: detail::append(rep.diagnostics, apply_labels(u, label_heuristic(u), {}, cfg.labels)); break;
    case SemanticsMode::File: {
      auto preds = parse_predictions(read_file(cfg.semantics_file, "semantics"));
      detail::append(rep.diagnostics, apply_labels(u, label_heuristic(u), preds, cfg.labels));
      break;
    }
  }
  for (const auto& c : u.contracts)
    for (const auto& sv : c.state_vars)
      if (sv.label) rep.labels[c.name + "." + sv.name] = *sv.label;
  clock.lap("semantics");

  // Graphs
  const ProgramIndex idx(u);
  const auto cg = build_callgraph(idx, bindings);
  detail::append(rep.diagnostics, cg.diagnostics);
  const auto icfg = build_icfg(idx, cg);
  const auto rw = extract_rw_deps(idx);
  auto revert = extract_revert_deps(idx, rw);
  detail::append(rep.diagnostics, revert.diagnostics);
  if (!cfg.sd_edges) revert.deps.clear();
  rep.counters.revert_edges = revert.deps.size();
  clock.lap("graphs");

  // Indicators and pruning
  const auto indicators = detect_indicators(idx, cg);
  std::set<std::size_t> entry_fns;
  if (entries) {
    for (const auto& id : *entries) {
      const auto f = idx.find_fn(id);
      if (f == kNone)
        rep.diagnostics.push_back({Diagnostic::Severity::Warning, "pipeline", "UnknownEntry", id});
      else
        entry_fns.insert(f);
    }
  } else {
    for (std::size_t f = 0; f < idx.function_count(); ++f)
      if (idx.fn(f).function->visibility == Visibility::Public) entry_fns.insert(f);
  }
  std::set<std::size_t> indicator_fns;
  for (const auto& ind : indicators) indicator_fns.insert(idx.block(ind.block).fn);
  const auto retained = prune_wcc(idx.function_count(), cg, entry_fns, indicator_fns);
  rep.counters.functions = idx.function_count();
  rep.counters.retained_functions = retained.size();
  rep.counters.indicators = indicators.size();
  clock.lap("detect");

  // Entry paths over the retained part of the ICFG. Return edges are left
  // out: a caller's continuation is already reachable from the call block,
  // and returning into a caller the path never entered is unrealizable.
  SearchGraph sg;
  sg.out.resize(icfg.node_count);
  for (const auto& e : icfg.edges)
    if (e.kind != IcfgEdgeKind::InterReturn && retained.count(idx.block(e.src).fn) && retained.count(idx.block(e.dst).fn))
      sg.out[e.src].push_back(e.dst);
  for (auto& o : sg.out) {
    std::sort(o.begin(), o.end());
    o.erase(std::unique(o.begin(), o.end()), o.end());
  }
  std::vector<std::size_t> entry_blocks, targets;
  for (auto f : entry_fns)
    if (retained.count(f) && idx.fn(f).block_count) entry_blocks.push_back(idx.entry_block(f));
  for (const auto& ind : indicators)
    if (retained.count(idx.block(ind.block).fn)) targets.push_back(ind.block);
  rep.counters.entries = entry_blocks.size();
  const auto paths = cfg.serial ? find_paths_serial(sg, entry_blocks, targets, cfg.paths)
                                : find_paths_parallel(sg, entry_blocks, targets, cfg.paths);
  detail::append(rep.diagnostics, paths.diagnostics);
  for (const auto& [k, v] : paths.paths) rep.counters.paths += v.size();
  rep.counters.block_expansions = paths.counters.block_expansions;
  rep.counters.memo_hits = paths.counters.memo_hits;
  rep.counters.memo_entries = paths.counters.memo_entries;
  clock.lap("paths");

  // Taint over all entries
  const TaintGraph tg(idx, cg, revert.deps, cfg.taint);
  std::map<std::size_t, std::set<std::size_t>> on_path;  // entry fn -> functions on its paths
  for (const auto& [k, v] : paths.paths)
    for (const auto& p : v)
      for (auto b : p) on_path[idx.block(k.first).fn].insert(idx.block(b).fn);
  std::set<std::pair<std::size_t, std::string>> all_values;
  std::set<std::size_t> all_active;
  std::vector<TaintTask> tasks;
  for (auto f : entry_fns) {
    const auto region = call_region(cg, f);
    const auto values = seed_values(idx, cg, region);
    all_values.insert(values.begin(), values.end());
    all_active.insert(region.begin(), region.end());
    TaintTask t;
    t.region.assign(idx.function_count(), 0);
    for (auto g : region) t.region[g] = 1;
    std::vector<std::pair<bool, std::size_t>> order;
    for (const auto& [g, name] : values)
      if (auto n = tg.value(g, name); n != kNone) order.push_back({!on_path[f].count(g), n});
    std::sort(order.begin(), order.end());
    for (auto [late, n] : order) t.seeds.push_back(n);
    tasks.push_back(std::move(t));
  }
  const auto seeds = make_seeds(tg, all_values, all_active);
  const auto taint = cfg.serial ? propagate_serial(tg, seeds, cfg.taint)
                                : propagate_parallel(tg, seeds, tasks, cfg.taint, {cfg.taint_workers, cfg.paths.schedule_seed});
  detail::append(rep.diagnostics, taint.diagnostics);
  rep.counters.taint_fired_edges = taint.counters.fired_edges;
  rep.counters.merge_iterations = taint.counters.merge_iterations;
  rep.counters.pending_edges = taint.counters.pending_edges;
  rep.counters.tainted_nodes = taint.state.tainted_count();
  rep.counters.tainted_functions = tainted_functions(tg, taint.state).size();
  rep.counters.tainted_state_vars = tainted_state_vars(tg, taint.state).size();
  clock.lap("taint");

  // Findings: one per reachable indicator, witnessed from the entry whose
  // first path crosses the most functions.
  std::map<std::size_t, TaintResult> witnesses;
  auto witness = [&](std::size_t entry_fn) -> const TaintResult& {
    auto it = witnesses.find(entry_fn);
    if (it == witnesses.end()) it = witnesses.emplace(entry_fn, propagate_serial(tg, entry_seeds(tg, cg, entry_fn), cfg.taint)).first;
    return it->second;
  };
  for (const auto& ind : indicators) {
    const Path* best = nullptr;
    std::size_t best_len = 0;
    for (auto e : entry_blocks) {
      auto it = paths.paths.find({e, ind.block});
      if (it == paths.paths.end() || it->second.empty()) continue;
      const auto len = detail::chain_length(idx, it->second.front());
      if (!best || len > best_len) {
        best = &it->second.front();
        best_len = len;
      }
    }
    if (!best) {
      ++rep.counters.unreachable_indicators;
      continue;
    }
    const auto entry_fn = idx.block(best->front()).fn;
    const auto& w = witness(entry_fn);
    const auto fn = idx.block(ind.block).fn;
    const auto& ins = idx.block(ind.block).block->instructions[ind.first_instr];
    Finding fd;
    fd.rule = ind.rule;
    fd.function = idx.fn(fn).id;
    fd.block = idx.block(ind.block).id;
    fd.instruction = ind.first_instr;
    fd.entry = idx.fn(entry_fn).id;
    fd.path = format_path(tg, w.state, *best, revert.deps);
    for (auto b : *best) fd.blocks.push_back(idx.block(b).id);
    for (auto f : tainted_functions(tg, w.state)) fd.tainted_functions.push_back(idx.fn(f).id);
    for (auto s : tainted_state_vars(tg, w.state)) fd.tainted_state_vars.push_back(idx.state(s).id);
    fd.detail = ind.detail;
    if (ind.rule == Rule::Overflow) {
      const bool tainted = std::any_of(ins.operands.begin(), ins.operands.end(), [&](const Operand& o) {
        return o.is_value() && is_tainted(tg, w.state, tg.value(fn, o.text));
      });
      if (!tainted && cfg.overflow_requires_taint) fd.evidence = Evidence::Reachable;
      if (cfg.semantics != SemanticsMode::Off)
        if (auto rule = suppressing_rule(idx.contract_of_fn(fn), *idx.fn(fn).function, ins, cfg.suppression)) {
          fd.evidence = Evidence::Suppressed;
          fd.suppressed_by = *rule;
          rep.diagnostics.push_back({Diagnostic::Severity::Note, "semantics", "Suppressed",
                                     std::string(rule_name(fd.rule)) + " at " + fd.block + " by " + *rule});
        }
    }
    rep.counters.finding_tainted_functions += fd.tainted_functions.size();
    (fd.evidence == Evidence::Suppressed ? rep.suppressed : rep.findings).push_back(std::move(fd));
  }
  auto order = [](const Finding& a, const Finding& b) {
    return std::tie(a.rule, a.function, a.block, a.instruction) < std::tie(b.rule, b.function, b.block, b.instruction);
  };
  std::sort(rep.findings.begin(), rep.findings.end(), order);
  std::sort(rep.suppressed.begin(), rep.suppressed.end(), order);
  clock.lap("report");
  return rep;
}

/// Loads and analyzes a manifest. `cfg` should already reflect the manifest's
/// config (see config_from_manifest) plus any overrides.
inline Report run_manifest(const Manifest& m, const PipelineConfig& cfg) {
  auto prog = load_program(m);
  return run_pipeline(std::move(prog.universe), m.bindings, m.entries, cfg, std::move(prog.diagnostics));
}

}  // namespace crossinspect
