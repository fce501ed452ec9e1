#pragma once

// Entry-to-indicator path enumeration. The serial search is a plain DFS; the
// parallel search runs one task per entry and shares suffix results through
// a memo table for blocks whose reachable subgraph is acyclic.

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <set>
#include <thread>
#include <vector>

#include "diagnostics.hpp"

namespace crossinspect {

using Path = std::vector<std::size_t>;

struct SearchGraph {
  std::vector<std::vector<std::size_t>> out;  // ascending successor lists
  std::size_t size() const { return out.size(); }
};

struct PathOptions {
  std::size_t max_paths_per_pair = 64;
  std::size_t max_depth = 512;  // blocks per path
  std::size_t workers = 0;      // 0: one per entry
  std::uint64_t schedule_seed = 0;
};

struct PathCounters {
  std::uint64_t block_expansions = 0;
  std::uint64_t memo_hits = 0;
  std::uint64_t memo_entries = 0;
  std::vector<std::uint32_t> expansions_per_block;  // indexed by node
};

struct PathResult {
  // (entry block, target block) -> lexicographically first paths, in order.
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Path>> paths;
  PathCounters counters;
  Diagnostics diagnostics;
};

namespace detail {

// Bitset over target ids of the targets reachable from each node.
class TargetReach {
 public:
  TargetReach(const SearchGraph& g, const std::vector<std::size_t>& targets)
      : words_((targets.size() + 63) / 64), bits_(g.size() * words_, 0) {
    std::vector<std::vector<std::size_t>> rev(g.size());
    for (std::size_t u = 0; u < g.size(); ++u)
      for (auto v : g.out[u]) rev[v].push_back(u);
    for (std::size_t t = 0; t < targets.size(); ++t) {
      std::vector<std::size_t> work{targets[t]};
      while (!work.empty()) {
        auto v = work.back();
        work.pop_back();
        auto& w = bits_[v * words_ + t / 64];
        const auto mask = std::uint64_t{1} << (t % 64);
        if (w & mask) continue;
        w |= mask;
        for (auto p : rev[v]) work.push_back(p);
      }
    }
  }
  bool any(std::size_t node, const std::vector<std::uint64_t>& remaining) const {
    for (std::size_t k = 0; k < words_; ++k)
      if (bits_[node * words_ + k] & remaining[k]) return true;
    return false;
  }
  bool any(std::size_t node) const {
    for (std::size_t k = 0; k < words_; ++k)
      if (bits_[node * words_ + k]) return true;
    return false;
  }
  std::size_t words() const { return words_; }

 private:
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
};

// Shared per-query context.
struct SearchSetup {
  const SearchGraph& g;
  std::vector<std::size_t> targets;             // distinct, ascending
  std::vector<std::size_t> target_id;           // node -> target id or kNoTarget
  TargetReach reach;
  static constexpr std::size_t kNoTarget = static_cast<std::size_t>(-1);

  SearchSetup(const SearchGraph& graph, const std::vector<std::size_t>& tgts)
      : g(graph), targets(normalize(tgts)), target_id(graph.size(), kNoTarget), reach(graph, targets) {
    for (std::size_t t = 0; t < targets.size(); ++t) target_id[targets[t]] = t;
  }
  static std::vector<std::size_t> normalize(std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  }
};

struct ExpansionLog {
  explicit ExpansionLog(std::size_t n) : per_block(n) {}
  void hit(std::size_t b) {
    per_block[b].fetch_add(1, std::memory_order_relaxed);
    total.fetch_add(1, std::memory_order_relaxed);
  }
  std::vector<std::uint32_t> snapshot() const {
    std::vector<std::uint32_t> v;
    v.reserve(per_block.size());
    for (const auto& x : per_block) v.push_back(x.load());
    return v;
  }
  std::vector<std::atomic<std::uint32_t>> per_block;
  std::atomic<std::uint64_t> total{0};
};

// Per-entry accumulator shared by both modes.
struct EntrySink {
  std::size_t cap;
  std::vector<std::vector<Path>> found;  // per target id
  std::vector<std::uint64_t> remaining;  // bitset of uncapped targets
  std::size_t open;

  EntrySink(std::size_t targets, std::size_t words, std::size_t cap_)
      : cap(cap_), found(targets), remaining(words, 0), open(targets) {
    for (std::size_t t = 0; t < targets; ++t) remaining[t / 64] |= std::uint64_t{1} << (t % 64);
    if (cap == 0) {
      std::fill(remaining.begin(), remaining.end(), 0);
      open = 0;
    }
  }
  bool add(std::size_t t, Path p) {
    if (found[t].size() >= cap) return false;
    found[t].push_back(std::move(p));
    if (found[t].size() == cap) {
      remaining[t / 64] &= ~(std::uint64_t{1} << (t % 64));
      --open;
    }
    return true;
  }
  bool open_target(std::size_t t) const { return found[t].size() < cap; }
};

inline void collect(const SearchSetup& s, std::size_t entry, EntrySink& sink, PathResult& out) {
  for (std::size_t t = 0; t < s.targets.size(); ++t) {
    if (sink.found[t].empty()) continue;
    if (sink.found[t].size() >= sink.cap)
      out.diagnostics.push_back({Diagnostic::Severity::Note, "detect", "PathBudgetExhausted",
                                 "entry " + std::to_string(entry) + " -> " + std::to_string(s.targets[t]) +
                                     ": stopped at " + std::to_string(sink.cap) + " paths"});
    out.paths[{entry, s.targets[t]}] = std::move(sink.found[t]);
  }
}

class SerialSearch {
 public:
  SerialSearch(const SearchSetup& s, const PathOptions& o, ExpansionLog& log)
      : s_(s), o_(o), log_(log), on_path_(s.g.size(), false) {}

  void run(std::size_t entry, EntrySink& sink) {
    sink_ = &sink;
    if (entry < s_.g.size() && s_.reach.any(entry, sink.remaining)) dfs(entry);
  }

 private:
  void dfs(std::size_t b) {
    path_.push_back(b);
    on_path_[b] = true;
    if (auto t = s_.target_id[b]; t != SearchSetup::kNoTarget && sink_->open_target(t)) sink_->add(t, path_);
    if (path_.size() < o_.max_depth && sink_->open > 0) {
      log_.hit(b);
      for (auto n : s_.g.out[b]) {
        if (sink_->open == 0) break;
        if (on_path_[n] || !s_.reach.any(n, sink_->remaining)) continue;
        dfs(n);
      }
    }
    on_path_[b] = false;
    path_.pop_back();
  }

  const SearchSetup& s_;
  const PathOptions& o_;
  ExpansionLog& log_;
  std::vector<bool> on_path_;
  Path path_;
  EntrySink* sink_ = nullptr;
};

// Nodes from which no cycle is reachable, and their longest-path height
// (in nodes) over target-relevant successors.
struct AcyclicInfo {
  std::vector<bool> acyclic;
  std::vector<std::size_t> height;
};

inline AcyclicInfo acyclic_info(const SearchSetup& s) {
  const auto n = s.g.size();
  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  // Tarjan SCC, iterative.
  std::vector<std::size_t> index(n, kUnvisited), low(n, 0), comp(n, 0), comp_size;
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::size_t counter = 0;
  struct Frame {
    std::size_t v, next;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      auto& fr = call.back();
      const auto v = fr.v;
      if (fr.next < s.g.out[v].size()) {
        auto w = s.g.out[v][fr.next++];
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::size_t size = 0;
        while (true) {
          auto w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = comp_size.size();
          ++size;
          if (w == v) break;
        }
        comp_size.push_back(size);
      }
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
    }
  }
  // Tarjan emits components in reverse topological order, so successors'
  // components are finished before their predecessors'.
  AcyclicInfo info{std::vector<bool>(n, true), std::vector<std::size_t>(n, 1)};
  std::vector<std::vector<std::size_t>> members(comp_size.size());
  for (std::size_t v = 0; v < n; ++v) members[comp[v]].push_back(v);
  for (std::size_t c = 0; c < comp_size.size(); ++c) {
    for (auto v : members[c]) {
      bool self_loop = std::find(s.g.out[v].begin(), s.g.out[v].end(), v) != s.g.out[v].end();
      if (comp_size[c] > 1 || self_loop) info.acyclic[v] = false;
    }
    for (auto v : members[c]) {
      for (auto w : s.g.out[v]) {
        if (comp[w] == c) continue;
        if (!info.acyclic[w]) info.acyclic[v] = false;
        if (s.reach.any(w)) info.height[v] = std::max(info.height[v], info.height[w] + 1);
      }
    }
  }
  return info;
}

// Suffix table: for an acyclic-reachable block, the lexicographically first
// suffixes to every reachable target. An entry is published once complete;
// a second requester waits for the owner rather than recomputing.
class MemoTable {
 public:
  using Entry = std::vector<std::pair<std::size_t, std::vector<Path>>>;  // (target id, suffixes)

  MemoTable(const SearchSetup& s, std::size_t cap, ExpansionLog& log)
      : s_(s), cap_(cap), log_(log), state_(s.g.size(), 0), data_(s.g.size()) {}

  const Entry& get(std::size_t b, bool count_hit = true) {
    {
      std::unique_lock lk(m_);
      if (state_[b] == kDone) {
        if (count_hit) ++hits_;
        return *data_[b];
      }
      if (state_[b] == kComputing) {
        cv_.wait(lk, [&] { return state_[b] == kDone; });
        if (count_hit) ++hits_;
        return *data_[b];
      }
      state_[b] = kComputing;
    }
    auto e = std::make_unique<Entry>(compute(b));
    std::lock_guard lk(m_);
    data_[b] = std::move(e);
    state_[b] = kDone;
    ++entries_;
    cv_.notify_all();
    return *data_[b];
  }

  std::uint64_t hits() const { return hits_; }
  std::uint64_t entries() const { return entries_; }

 private:
  static constexpr std::uint8_t kDone = 2, kComputing = 1;

  Entry compute(std::size_t b) {
    log_.hit(b);
    std::map<std::size_t, std::vector<Path>> acc;
    if (auto t = s_.target_id[b]; t != SearchSetup::kNoTarget) acc[t].push_back({b});
    for (auto n : s_.g.out[b]) {
      if (!s_.reach.any(n)) continue;
      const auto& child = get(n);
      for (const auto& [t, sufs] : child) {
        auto& dst = acc[t];
        for (const auto& suf : sufs) {
          if (dst.size() >= cap_) break;
          Path p;
          p.reserve(suf.size() + 1);
          p.push_back(b);
          p.insert(p.end(), suf.begin(), suf.end());
          dst.push_back(std::move(p));
        }
      }
    }
    return Entry(acc.begin(), acc.end());
  }

  const SearchSetup& s_;
  std::size_t cap_;
  ExpansionLog& log_;
  std::mutex m_;
  std::condition_variable cv_;
  std::vector<std::uint8_t> state_;
  std::vector<std::unique_ptr<Entry>> data_;
  std::atomic<std::uint64_t> hits_{0}, entries_{0};
};

class MemoSearch {
 public:
  MemoSearch(const SearchSetup& s, const PathOptions& o, const AcyclicInfo& a, MemoTable& memo, ExpansionLog& log)
      : s_(s), o_(o), a_(a), memo_(memo), log_(log), on_path_(s.g.size(), false) {}

  void run(std::size_t entry, EntrySink& sink) {
    sink_ = &sink;
    if (entry < s_.g.size() && s_.reach.any(entry, sink.remaining)) visit(entry);
  }

 private:
  void visit(std::size_t b) {
    if (a_.acyclic[b] && path_.size() + a_.height[b] <= o_.max_depth) {
      for (const auto& [t, sufs] : memo_.get(b)) {
        for (const auto& suf : sufs) {
          if (!sink_->open_target(t)) break;
          Path p = path_;
          p.insert(p.end(), suf.begin(), suf.end());
          sink_->add(t, std::move(p));
        }
      }
      return;
    }
    path_.push_back(b);
    on_path_[b] = true;
    if (auto t = s_.target_id[b]; t != SearchSetup::kNoTarget && sink_->open_target(t)) sink_->add(t, path_);
    if (path_.size() < o_.max_depth && sink_->open > 0) {
      log_.hit(b);
      for (auto n : s_.g.out[b]) {
        if (sink_->open == 0) break;
        if (on_path_[n] || !s_.reach.any(n, sink_->remaining)) continue;
        visit(n);
      }
    }
    on_path_[b] = false;
    path_.pop_back();
  }

  const SearchSetup& s_;
  const PathOptions& o_;
  const AcyclicInfo& a_;
  MemoTable& memo_;
  ExpansionLog& log_;
  std::vector<bool> on_path_;
  Path path_;
  EntrySink* sink_ = nullptr;
};

}  // namespace detail

/// Depth-first enumeration of simple paths, successors in ascending order.
inline PathResult find_paths_serial(const SearchGraph& g, const std::vector<std::size_t>& entries,
                                    const std::vector<std::size_t>& targets, const PathOptions& opts = {}) {
  PathResult res;
  detail::SearchSetup s(g, targets);
  detail::ExpansionLog log(g.size());
  detail::SerialSearch search(s, opts, log);
  for (auto e : detail::SearchSetup::normalize(entries)) {
    detail::EntrySink sink(s.targets.size(), s.reach.words(), opts.max_paths_per_pair);
    search.run(e, sink);
    detail::collect(s, e, sink, res);
  }
  res.counters.block_expansions = log.total;
  res.counters.expansions_per_block = log.snapshot();
  return res;
}

/// One task per entry over min(|entries|, workers) threads sharing a memo
/// table. The result equals find_paths_serial for every schedule.
inline PathResult find_paths_parallel(const SearchGraph& g, const std::vector<std::size_t>& entries,
                                      const std::vector<std::size_t>& targets, const PathOptions& opts = {}) {
  PathResult res;
  detail::SearchSetup s(g, targets);
  const auto acyclic = detail::acyclic_info(s);
  detail::ExpansionLog log(g.size());
  detail::MemoTable memo(s, opts.max_paths_per_pair, log);
  auto order = detail::SearchSetup::normalize(entries);
  std::vector<detail::EntrySink> sinks;
  for (std::size_t i = 0; i < order.size(); ++i)
    sinks.emplace_back(s.targets.size(), s.reach.words(), opts.max_paths_per_pair);

  std::vector<std::size_t> schedule(order.size());
  for (std::size_t i = 0; i < schedule.size(); ++i) schedule[i] = i;
  if (opts.schedule_seed != 0) {
    std::mt19937_64 rng(opts.schedule_seed);
    std::shuffle(schedule.begin(), schedule.end(), rng);
  }
  std::size_t threads = opts.workers == 0 ? order.size() : std::min(order.size(), opts.workers);
  threads = std::max<std::size_t>(threads, 1);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < schedule.size();) {
      const auto i = schedule[k];
      detail::MemoSearch search(s, opts, acyclic, memo, log);
      search.run(order[i], sinks[i]);
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (std::size_t i = 0; i < order.size(); ++i) detail::collect(s, order[i], sinks[i], res);
  res.counters.block_expansions = log.total;
  res.counters.expansions_per_block = log.snapshot();
  res.counters.memo_hits = memo.hits();
  res.counters.memo_entries = memo.entries();
  return res;
}

}  // namespace crossinspect
