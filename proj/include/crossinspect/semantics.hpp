#pragma once

// State-variable semantic labels: a usage-pattern labeler, the prediction
// sidecar format, label combination and label-driven suppression.

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "category.hpp"
#include "diagnostics.hpp"
#include "ir.hpp"

namespace crossinspect {

enum class LabelSource : std::uint8_t { Ir, Model, Heuristic };  // priority order on ties

struct Prediction {
  std::string contract;
  std::uint64_t slot = 0;
  bool mapping = false;  // slot-spec was mapping=N
  SemanticCategory category = SemanticCategory::Unknown;
  double confidence = 0;
  LabelSource source = LabelSource::Model;
};

inline constexpr double kHeuristicConfidence = 0.5;

namespace detail {

struct FnView {
  const Function* fn;
  // value name -> defining instructions (values may be redefined)
  std::map<std::string, std::vector<const Instruction*>> defs;
  std::map<std::string, std::vector<const Instruction*>> uses;
  std::vector<const Instruction*> linear;

  explicit FnView(const Function& f) : fn(&f) {
    for (const auto& b : f.blocks)
      for (const auto& in : b.instructions) {
        linear.push_back(&in);
        if (in.result) defs[*in.result].push_back(&in);
        for (const auto& o : in.operands)
          if (o.is_value()) uses[o.text].push_back(&in);
      }
  }

  /// Opcodes found by walking definitions backwards from `v`.
  bool back_reaches(const std::string& v, Opcode target) const {
    std::set<std::string> seen{v};
    std::vector<std::string> work{v};
    while (!work.empty()) {
      auto cur = work.back();
      work.pop_back();
      auto it = defs.find(cur);
      if (it == defs.end()) continue;
      for (const auto* d : it->second) {
        if (d->op == target) return true;
        if (d->op == Opcode::SLOAD) continue;
        for (const auto& o : d->operands)
          if (o.is_value() && seen.insert(o.text).second) work.push_back(o.text);
      }
    }
    return false;
  }

  std::set<std::string> loaded_vars(const std::string& v) const {
    std::set<std::string> out;
    auto it = defs.find(v);
    if (it == defs.end()) return out;
    for (const auto* d : it->second)
      if (d->op == Opcode::SLOAD && d->state_ref) out.insert(*d->state_ref);
    return out;
  }

  bool block_reverts(const std::string& label) const {
    std::set<std::string> seen;
    std::string cur = label;
    while (seen.insert(cur).second) {
      const auto* b = fn->find_block(cur);
      if (!b || b->instructions.empty()) return false;
      const auto& t = b->instructions.back();
      if (t.op == Opcode::REVERT) return true;
      if (t.op != Opcode::JUMP) return false;
      cur = t.successors.at(0);
    }
    return false;
  }

  /// `v` decides (possibly negated) a branch with a reverting side.
  bool guards_revert(const std::string& v) const {
    std::set<std::string> seen{v};
    std::vector<std::string> work{v};
    while (!work.empty()) {
      auto cur = work.back();
      work.pop_back();
      auto it = uses.find(cur);
      if (it == uses.end()) continue;
      for (const auto* u : it->second) {
        if (u->op == Opcode::JUMPI && std::any_of(u->successors.begin(), u->successors.end(),
                                                  [&](const auto& s) { return block_reverts(s); }))
          return true;
        if ((u->op == Opcode::ISZERO || u->op == Opcode::PHI) && u->result && seen.insert(*u->result).second)
          work.push_back(*u->result);
      }
    }
    return false;
  }
};

inline bool is_binary_comparison(Opcode op) { return op == Opcode::LT || op == Opcode::GT || op == Opcode::EQ; }

}  // namespace detail

/// Usage-pattern labels for every state variable, confidence 0.5. Variables
/// matching no rule get Unknown.
inline std::vector<Prediction> label_heuristic(const Universe& u) {
  std::vector<Prediction> out;
  for (const auto& c : u.contracts) {
    std::map<std::string, std::set<SemanticCategory>> hits;
    for (const auto& f : c.functions) {
      const detail::FnView fv(f);
      std::vector<std::size_t> ext_calls;
      std::map<std::string, std::vector<std::size_t>> const_writes;
      for (std::size_t k = 0; k < fv.linear.size(); ++k) {
        const auto& in = *fv.linear[k];
        if (is_external_call(in.op)) ext_calls.push_back(k);
        if (in.op == Opcode::SSTORE && in.state_ref) {
          const auto* sv = c.find_state_var(*in.state_ref);
          if (!sv) continue;
          if (sv->kind == StateKind::Mapping && !in.operands.empty() && in.operands[0].is_value() &&
              fv.back_reaches(in.operands[0].text, Opcode::CALLVALUE))
            hits[sv->name].insert(SemanticCategory::BalanceMapping);
          if (sv->kind == StateKind::Scalar && !in.operands.empty() && !in.operands[0].is_value())
            const_writes[sv->name].push_back(k);
        }
        if (detail::is_binary_comparison(in.op) && in.operands.size() == 2 && in.result) {
          for (int side = 0; side < 2; ++side) {
            const auto& mine = in.operands[side];
            const auto& other = in.operands[1 - side];
            if (!mine.is_value() || !other.is_value()) continue;
            for (const auto& var : fv.loaded_vars(mine.text)) {
              const auto* sv = c.find_state_var(var);
              if (!sv || sv->kind != StateKind::Scalar) continue;
              if (fv.back_reaches(other.text, Opcode::TIMESTAMP)) hits[var].insert(SemanticCategory::TimeUint);
              if (in.op == Opcode::EQ && fv.back_reaches(other.text, Opcode::CALLER) && fv.guards_revert(*in.result))
                hits[var].insert(SemanticCategory::OwnerAddress);
            }
          }
        }
      }
      for (const auto& [var, ks] : const_writes) {
        const bool before = std::any_of(ks.begin(), ks.end(), [&](auto k) {
          return std::any_of(ext_calls.begin(), ext_calls.end(), [&](auto e) { return k < e; });
        });
        const bool after = std::any_of(ks.begin(), ks.end(), [&](auto k) {
          return std::any_of(ext_calls.begin(), ext_calls.end(), [&](auto e) { return k > e; });
        });
        if (before && after) hits[var].insert(SemanticCategory::NonreentrantBool);
      }
    }
    for (const auto& sv : c.state_vars) {
      auto cat = SemanticCategory::Unknown;
      if (auto it = hits.find(sv.name); it != hits.end()) {
        for (auto pref : {SemanticCategory::BalanceMapping, SemanticCategory::OwnerAddress, SemanticCategory::TimeUint,
                          SemanticCategory::NonreentrantBool})
          if (it->second.count(pref)) {
            cat = pref;
            break;
          }
      }
      out.push_back({c.name, sv.slot, sv.kind == StateKind::Mapping, cat, kHeuristicConfidence, LabelSource::Heuristic});
    }
  }
  return out;
}

/// Parses the sidecar: `<contract> slot=N|mapping=N <category> <confidence>`
/// per line; blank lines and `#` comments are skipped.
inline std::vector<Prediction> parse_predictions(const std::string& text) {
  std::vector<Prediction> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  auto bad = [&](const std::string& why) {
    throw Error("semantics", "MalformedPrediction", "line " + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::vector<std::string> t;
    for (std::string w; ls >> w;) t.push_back(w);
    if (t.size() != 4) bad("expected 4 fields, got " + std::to_string(t.size()));
    Prediction p;
    p.contract = t[0];
    const auto eq = t[1].find('=');
    if (eq == std::string::npos) bad("bad slot spec " + t[1]);
    const auto kind = t[1].substr(0, eq);
    if (kind != "slot" && kind != "mapping") bad("bad slot spec " + t[1]);
    p.mapping = kind == "mapping";
    const auto num = t[1].substr(eq + 1);
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), p.slot);
    if (ec != std::errc() || ptr != num.data() + num.size() || num.empty()) bad("bad slot number " + num);
    auto cat = category_from_name(t[2]);
    if (!cat) bad("unknown category " + t[2]);
    p.category = *cat;
    try {
      std::size_t used = 0;
      p.confidence = std::stod(t[3], &used);
      if (used != t[3].size()) bad("bad confidence " + t[3]);
    } catch (const std::logic_error&) {
      bad("bad confidence " + t[3]);
    }
    if (!(p.confidence >= 0.0 && p.confidence <= 1.0)) bad("confidence out of range " + t[3]);
    p.source = LabelSource::Model;
    out.push_back(std::move(p));
  }
  return out;
}

inline std::string serialize_predictions(const std::vector<Prediction>& preds) {
  std::string out;
  for (const auto& p : preds) {
    std::ostringstream os;
    os << p.contract << ' ' << (p.mapping ? "mapping=" : "slot=") << p.slot << ' ' << category_name(p.category) << ' '
       << p.confidence << '\n';
    out += os.str();
  }
  return out;
}

struct LabelOptions {
  double model_threshold = 0.8;
};

/// Sets every state variable's label to the best candidate among its IR
/// label, model predictions at or above the threshold, and heuristics.
/// Candidates rank by confidence, then IR > model > heuristic. Unknown winners
/// leave the variable unlabeled.
inline Diagnostics apply_labels(Universe& u, const std::vector<Prediction>& heuristic,
                                const std::vector<Prediction>& model, const LabelOptions& opts = {}) {
  Diagnostics diags;
  struct Candidate {
    double confidence;
    LabelSource source;
    SemanticCategory category;
  };
  std::map<std::pair<std::string, std::string>, std::vector<Candidate>> cands;
  for (const auto& c : u.contracts)
    for (const auto& sv : c.state_vars)
      if (sv.label)
        if (auto cat = category_from_name(*sv.label))
          cands[{c.name, sv.name}].push_back({1.0, LabelSource::Ir, *cat});
  auto resolve = [&](const Prediction& p) -> const StateVar* {
    const auto* c = u.find_contract(p.contract);
    if (!c) return nullptr;
    for (const auto& sv : c->state_vars)
      if (sv.slot == p.slot && (!p.mapping || sv.kind == StateKind::Mapping)) return &sv;
    return nullptr;
  };
  auto add = [&](const Prediction& p) {
    const auto* sv = resolve(p);
    if (!sv) {
      diags.push_back({Diagnostic::Severity::Warning, "semantics", "UnresolvableSlot",
                       p.contract + " " + (p.mapping ? "mapping=" : "slot=") + std::to_string(p.slot)});
      return;
    }
    cands[{p.contract, sv->name}].push_back({p.confidence, p.source, p.category});
  };
  for (const auto& p : model)
    if (p.confidence >= opts.model_threshold) add(p);
  for (const auto& p : heuristic) add(p);
  for (auto& c : u.contracts)
    for (auto& sv : c.state_vars) {
      auto it = cands.find({c.name, sv.name});
      if (it == cands.end()) continue;
      const auto best = std::min_element(it->second.begin(), it->second.end(), [](const auto& a, const auto& b) {
        if (a.confidence != b.confidence) return a.confidence > b.confidence;
        return a.source < b.source;
      });
      if (best->category == SemanticCategory::Unknown)
        sv.label.reset();
      else
        sv.label = std::string(category_name(best->category));
    }
  return diags;
}

inline void clear_labels(Universe& u) {
  for (auto& c : u.contracts)
    for (auto& sv : c.state_vars) sv.label.reset();
}

/// Arithmetic whose operands all load state variables carrying one of
/// `operand_labels` is treated as safe.
struct SuppressionRule {
  std::string id;
  std::set<Opcode> ops;
  std::set<SemanticCategory> operand_labels;
};

inline std::vector<SuppressionRule> default_suppression_rules() {
  return {{"balance-supply-arithmetic",
           {Opcode::ADD, Opcode::SUB, Opcode::MUL},
           {SemanticCategory::BalanceMapping, SemanticCategory::SupplyUint}}};
}

/// Returns the id of the first rule that clears `arith`, if any.
inline std::optional<std::string> suppressing_rule(const Contract& c, const Function& f, const Instruction& arith,
                                                   const std::vector<SuppressionRule>& rules) {
  const detail::FnView fv(f);
  for (const auto& r : rules) {
    if (!r.ops.count(arith.op)) continue;
    bool ok = !arith.operands.empty();
    for (const auto& o : arith.operands) {
      if (!ok) break;
      if (!o.is_value()) {
        ok = false;
        break;
      }
      auto it = fv.defs.find(o.text);
      if (it == fv.defs.end()) {
        ok = false;
        break;
      }
      for (const auto* d : it->second) {
        const StateVar* sv = d->op == Opcode::SLOAD && d->state_ref ? c.find_state_var(*d->state_ref) : nullptr;
        auto cat = sv && sv->label ? category_from_name(*sv->label) : std::nullopt;
        if (!cat || !r.operand_labels.count(*cat)) {
          ok = false;
          break;
        }
      }
    }
    if (ok) return r.id;
  }
  return std::nullopt;
}

}  // namespace crossinspect
