// crossinspect analyze --manifest M [options]
//
// Exit codes: 0 no findings, 1 findings, 2 input error.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "crossinspect/graphs.hpp"
#include "crossinspect/manifest.hpp"
#include "crossinspect/pipeline.hpp"
#include "crossinspect/report.hpp"

namespace {

enum class LogLevel { Error, Warn, Info, Debug };

LogLevel log_level() {
  const char* env = std::getenv("CROSSINSPECT_LOG");
  const std::string v = env ? env : "";
  if (v == "debug") return LogLevel::Debug;
  if (v == "info") return LogLevel::Info;
  if (v == "error") return LogLevel::Error;
  return LogLevel::Warn;
}

void log(LogLevel level, const std::string& msg) {
  static const LogLevel threshold = log_level();
  if (level > threshold) return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::cerr << "crossinspect: " << names[static_cast<int>(level)] << ": " << msg << "\n";
}

void log_diagnostics(const crossinspect::Diagnostics& diags) {
  using crossinspect::Diagnostic;
  for (const auto& d : diags) {
    const auto level = d.severity == Diagnostic::Severity::Error     ? LogLevel::Error
                       : d.severity == Diagnostic::Severity::Warning ? LogLevel::Warn
                                                                     : LogLevel::Debug;
    log(level, "[" + d.stage + "] " + d.code + ": " + d.message);
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace crossinspect;
  CLI::App app{"Cross-contract vulnerability detection over EVM bytecode and IR"};
  app.require_subcommand(1);
  auto* analyze = app.add_subcommand("analyze", "Analyze the contracts listed in a manifest");

  std::string manifest_path, semantics, emit_graph, format = "text", graph_format = "dot";
  bool serial = false, emit_ir = false, no_sd = false, timing = false, exit_zero = false;
  std::optional<std::size_t> workers;
  analyze->add_option("--manifest", manifest_path, "Deployment manifest (JSON)")->required();
  analyze->add_flag("--serial", serial, "Single-threaded search without memoization");
  analyze->add_option("--workers", workers, "Worker cap for path search and taint (0: one per entry)");
  analyze->add_option("--semantics", semantics, "off | heuristic | file:<predictions>");
  analyze->add_flag("--emit-ir", emit_ir, "Print the canonical IR instead of a report");
  analyze->add_option("--emit-graph", emit_graph, "Print a graph instead of a report")
      ->check(CLI::IsMember({"callgraph", "icfg", "sdg"}));
  analyze->add_option("--graph-format", graph_format, "Graph output: dot or edges")
      ->check(CLI::IsMember({"dot", "edges"}));
  analyze->add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json"}));
  analyze->add_flag("--no-sd-edges", no_sd, "Drop state-revert dependency edges");
  analyze->add_flag("--timing", timing, "Include per-stage wall-clock timing");
  analyze->add_flag("--exit-zero", exit_zero, "Exit 0 even when findings are reported");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    log(LogLevel::Info, "loading " + manifest_path);
    const auto manifest = load_manifest(manifest_path);
    auto cfg = config_from_manifest(manifest);
    cfg.serial = serial;
    cfg.sd_edges = !no_sd;
    if (workers) cfg.paths.workers = cfg.taint_workers = *workers;
    if (!semantics.empty()) set_semantics(cfg, semantics);

    auto prog = load_program(manifest);
    if (emit_ir) {
      log_diagnostics(prog.diagnostics);
      std::cout << serialize_ir(prog.universe);
      return 0;
    }
    if (!emit_graph.empty()) {
      const ProgramIndex idx(prog.universe);
      const auto cg = build_callgraph(idx, manifest.bindings);
      GraphText g;
      if (emit_graph == "callgraph") {
        g = render_callgraph(idx, cg);
      } else {
        const auto icfg = build_icfg(idx, cg);
        if (emit_graph == "icfg") {
          g = render_icfg(idx, icfg);
        } else {
          const auto rw = extract_rw_deps(idx);
          auto rv = extract_revert_deps(idx, rw);
          if (no_sd) rv.deps.clear();
          g = render_sdg(idx, build_sdg(idx, icfg, rw, rv.deps));
        }
      }
      if (graph_format == "dot") {
        std::cout << g.dot;
      } else {
        for (const auto& l : g.lines) std::cout << l << "\n";
      }
      return 0;
    }

    log(LogLevel::Info, "analyzing " + std::to_string(prog.universe.contracts.size()) + " contracts");
    const auto report = run_pipeline(std::move(prog.universe), manifest.bindings, manifest.entries, cfg,
                                     std::move(prog.diagnostics));
    log_diagnostics(report.diagnostics);
    std::cout << render_report(report, report_format_from_name(format), timing);
    return report.findings.empty() || exit_zero ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "crossinspect: error [" << e.stage() << "] " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "crossinspect: error " << e.what() << "\n";
    return 2;
  }
}
