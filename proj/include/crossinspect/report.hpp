#pragma once

// Text and JSON renderings of a Report.

#include <sstream>
#include <string>

#include <json.hpp>

#include "pipeline.hpp"

namespace crossinspect {

enum class ReportFormat : std::uint8_t { Text, Json };

inline ReportFormat report_format_from_name(const std::string& s) {
  if (s == "text") return ReportFormat::Text;
  if (s == "json") return ReportFormat::Json;
  throw Error("report", "UnknownFormat", s);
}

inline nlohmann::ordered_json finding_json(const Finding& f) {
  nlohmann::ordered_json j;
  j["rule"] = rule_name(f.rule);
  j["evidence"] = evidence_name(f.evidence);
  j["function"] = f.function;
  j["block"] = f.block;
  j["instruction"] = f.instruction;
  j["entry"] = f.entry;
  j["path"] = f.path;
  j["blocks"] = f.blocks;
  j["tainted_functions"] = f.tainted_functions;
  j["tainted_state_vars"] = f.tainted_state_vars;
  if (f.suppressed_by) j["suppressed_by"] = *f.suppressed_by;
  j["detail"] = f.detail;
  return j;
}

inline nlohmann::ordered_json counters_json(const ReportCounters& c) {
  nlohmann::ordered_json j;
  j["functions"] = c.functions;
  j["retained_functions"] = c.retained_functions;
  j["entries"] = c.entries;
  j["indicators"] = c.indicators;
  j["unreachable_indicators"] = c.unreachable_indicators;
  j["revert_edges"] = c.revert_edges;
  j["paths"] = c.paths;
  j["block_expansions"] = c.block_expansions;
  j["memo_hits"] = c.memo_hits;
  j["memo_entries"] = c.memo_entries;
  j["taint_fired_edges"] = c.taint_fired_edges;
  j["merge_iterations"] = c.merge_iterations;
  j["pending_edges"] = c.pending_edges;
  j["tainted_nodes"] = c.tainted_nodes;
  j["tainted_functions"] = c.tainted_functions;
  j["tainted_state_vars"] = c.tainted_state_vars;
  j["finding_tainted_functions"] = c.finding_tainted_functions;
  return j;
}

/// Machine-readable report. Wall-clock timing only appears when requested so
/// that repeated runs compare byte for byte.
inline std::string render_json(const Report& r, bool with_timing = false) {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["mode"] = r.serial ? "serial" : "parallel";
  j["findings"] = nlohmann::ordered_json::array();
  for (const auto& f : r.findings) j["findings"].push_back(finding_json(f));
  j["suppressed"] = nlohmann::ordered_json::array();
  for (const auto& f : r.suppressed) j["suppressed"].push_back(finding_json(f));
  j["labels"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.labels) j["labels"][k] = v;
  j["counters"] = counters_json(r.counters);
  j["diagnostics"] = nlohmann::ordered_json::array();
  for (const auto& d : r.diagnostics)
    j["diagnostics"].push_back({{"severity", severity_name(d.severity)}, {"stage", d.stage}, {"code", d.code},
                                {"message", d.message}});
  if (with_timing) {
    j["timing_ms"] = nlohmann::ordered_json::object();
    for (const auto& t : r.timing) j["timing_ms"][t.stage] = t.ms;
  }
  return j.dump(2) + "\n";
}

inline std::string render_text(const Report& r, bool with_timing = false) {
  std::ostringstream os;
  if (r.findings.empty()) {
    os << "No findings.\n";
  } else {
    os << r.findings.size() << (r.findings.size() == 1 ? " finding" : " findings") << "\n";
    std::optional<Rule> current;
    for (const auto& f : r.findings) {
      if (current != f.rule) {
        current = f.rule;
        os << "\n[" << rule_name(f.rule) << "]\n";
      }
      os << "  " << evidence_name(f.evidence) << "  " << f.block << "#" << f.instruction << "  (entry " << f.entry << ")\n";
      os << "    path: " << f.path << "\n";
      if (!f.tainted_state_vars.empty()) {
        os << "    tainted state:";
        for (const auto& s : f.tainted_state_vars) os << " " << s;
        os << "\n";
      }
    }
  }
  if (!r.suppressed.empty()) {
    os << "\nSuppressed:\n";
    for (const auto& f : r.suppressed)
      os << "  [" << rule_name(f.rule) << "] " << f.block << "#" << f.instruction << " by " << f.suppressed_by.value_or("?") << "\n";
  }
  bool header = false;
  for (const auto& d : r.diagnostics) {
    if (d.severity == Diagnostic::Severity::Note) continue;
    if (!header) os << "\nDiagnostics:\n";
    header = true;
    os << "  " << severity_name(d.severity) << " [" << d.stage << "] " << d.code << ": " << d.message << "\n";
  }
  if (with_timing) {
    os << "\nTiming (ms):";
    for (const auto& t : r.timing) os << " " << t.stage << "=" << t.ms;
    os << "\n";
  }
  return os.str();
}

inline std::string render_report(const Report& r, ReportFormat f, bool with_timing = false) {
  return f == ReportFormat::Json ? render_json(r, with_timing) : render_text(r, with_timing);
}

}  // namespace crossinspect
