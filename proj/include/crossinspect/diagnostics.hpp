#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace crossinspect {

struct Diagnostic {
  enum class Severity { Note, Warning, Error };
  Severity severity = Severity::Warning;
  std::string stage;  // frontend, ir, graphs, detect, taint, semantics, pipeline
  std::string code;   // e.g. StackUnderflow, ManifestTargetUnknown
  std::string message;
  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

inline const char* severity_name(Diagnostic::Severity s) {
  switch (s) {
    case Diagnostic::Severity::Note: return "note";
    case Diagnostic::Severity::Warning: return "warning";
    case Diagnostic::Severity::Error: return "error";
  }
  return "warning";
}

using Diagnostics = std::vector<Diagnostic>;

/// Base for errors that abort a pipeline stage. `code()` names the failure
/// class (SyntaxError, EmptyBytecode, ...), `stage()` the component.
class Error : public std::runtime_error {
 public:
  Error(std::string stage, std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), stage_(std::move(stage)), code_(std::move(code)) {}
  const std::string& stage() const noexcept { return stage_; }
  const std::string& code() const noexcept { return code_; }

 private:
  std::string stage_;
  std::string code_;
};

}  // namespace crossinspect
