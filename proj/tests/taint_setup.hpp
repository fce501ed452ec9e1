#pragma once

// Builds serial and parallel taint inputs for a universe, one task per public
// function, the way the pipeline does without path ordering.

#include <memory>

#include "crossinspect/taint.hpp"

namespace testgen {

struct TaintSetup {
  explicit TaintSetup(const crossinspect::Universe& u, crossinspect::TaintConfig c = {})
      : idx(u), cg(crossinspect::build_callgraph(idx)), cfg(c) {
    using namespace crossinspect;
    revert = extract_revert_deps(idx, extract_rw_deps(idx)).deps;
    graph = std::make_unique<TaintGraph>(idx, cg, revert, cfg);
    std::set<std::pair<std::size_t, std::string>> values;
    std::set<std::size_t> active;
    for (std::size_t f = 0; f < idx.function_count(); ++f) {
      if (idx.fn(f).function->visibility != Visibility::Public) continue;
      const auto region = call_region(cg, f);
      const auto v = seed_values(idx, cg, region);
      values.insert(v.begin(), v.end());
      active.insert(region.begin(), region.end());
      TaintTask t;
      t.region.assign(idx.function_count(), 0);
      for (auto g : region) t.region[g] = 1;
      for (const auto& [g, name] : v)
        if (auto n = graph->value(g, name); n != kNone) t.seeds.push_back(n);
      tasks.push_back(std::move(t));
    }
    seeds = make_seeds(*graph, values, active);
  }

  crossinspect::TaintResult serial() const { return crossinspect::propagate_serial(*graph, seeds, cfg); }
  crossinspect::TaintResult parallel(std::size_t workers, std::uint64_t schedule) const {
    return crossinspect::propagate_parallel(*graph, seeds, tasks, cfg, {workers, schedule});
  }

  crossinspect::ProgramIndex idx;
  crossinspect::CallGraph cg;
  crossinspect::TaintConfig cfg;
  std::vector<crossinspect::RevertDep> revert;
  std::unique_ptr<crossinspect::TaintGraph> graph;
  std::vector<crossinspect::TaintTask> tasks;
  crossinspect::TaintSeeds seeds;
};

}  // namespace testgen
