#pragma once

// Line-oriented textual IR.
//
//   ir-version 1
//   contract <name> [@<address>]
//   statevar <name> slot=<n> kind=<scalar|mapping|array> [label=<category>]
//   function <name> <public|private>(<p:type>,...)
//   block b<N>
//     [<v> =] <OPCODE> <operand>*
//
// Storage:       v = SLOAD <var> [key]          SSTORE <var> <value> [key]
// External call: [v =] CALL <Contract>.<fn> args...
//                [v =] CALLVALUECALL <amount> <target> args...
//                a target may also be *<v> or *<v>.<fn> (address held in v)
// Internal call: [v =] INTERNALCALL <fn> args...
// Terminators:   JUMP bM | JUMPI <v> bM bK | RETURN [v] | REVERT | STOP

#include <cctype>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "category.hpp"
#include "diagnostics.hpp"
#include "ir.hpp"
#include "ir_validate.hpp"

namespace crossinspect {

class ParseError : public Error {
 public:
  ParseError(std::string code, std::size_t line, const std::string& msg)
      : Error("ir", std::move(code), "line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct ParseOptions {
  bool validate = true;
};

namespace detail {

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

inline bool is_literal(std::string_view s) {
  if (s.empty()) return false;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    for (char c : s.substr(2))
      if (!std::isxdigit(static_cast<unsigned char>(c))) return false;
    return true;
  }
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

// Functions recovered from bytecode without a name map are named by their
// hex selector, e.g. 0xa9059cbb.
inline bool is_function_name(std::string_view s) {
  return is_identifier(s) || (s.size() > 2 && s[0] == '0' && s[1] == 'x' && is_literal(s));
}

class IrParser {
 public:
  explicit IrParser(std::string_view text) : text_(text) {}

  Universe parse() {
    std::size_t pos = 0;
    bool header = false;
    while (pos <= text_.size()) {
      auto nl = text_.find('\n', pos);
      if (nl == std::string_view::npos) nl = text_.size();
      ++line_no_;
      std::string_view line = text_.substr(pos, nl - pos);
      pos = nl + 1;
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      auto toks = split_ws(line);
      if (toks.empty()) continue;
      if (!header) {
        if (toks.size() != 2 || toks[0] != "ir-version") fail("SyntaxError", "expected 'ir-version 1' header");
        if (toks[1] != "1") fail("SyntaxError", "unsupported ir-version " + toks[1]);
        header = true;
        continue;
      }
      handle(toks, line);
    }
    return std::move(u_);
  }

 private:
  [[noreturn]] void fail(const std::string& code, const std::string& msg) const {
    throw ParseError(code, line_no_, msg);
  }

  Contract& contract() {
    if (u_.contracts.empty()) fail("SyntaxError", "declaration outside of a contract");
    return u_.contracts.back();
  }
  Function& function() {
    auto& c = contract();
    if (c.functions.empty() || !in_function_) fail("SyntaxError", "block outside of a function");
    return c.functions.back();
  }
  BasicBlock& block() {
    auto& f = function();
    if (f.blocks.empty()) fail("SyntaxError", "instruction outside of a block");
    return f.blocks.back();
  }

  void handle(const std::vector<std::string>& t, std::string_view line) {
    const auto& kw = t[0];
    if (kw == "contract") {
      if (t.size() < 2 || t.size() > 3 || !is_identifier(t[1])) fail("SyntaxError", "bad contract line");
      Contract c;
      c.name = t[1];
      if (t.size() == 3) {
        if (t[2].size() < 2 || t[2][0] != '@') fail("SyntaxError", "bad contract address");
        c.address = t[2].substr(1);
      }
      u_.contracts.push_back(std::move(c));
      in_function_ = false;
    } else if (kw == "statevar") {
      parse_statevar(t);
    } else if (kw == "function") {
      parse_function(line);
    } else if (kw == "block") {
      if (t.size() != 2 || block_number(t[1]) < 0) fail("SyntaxError", "bad block line");
      auto& f = function();
      for (const auto& b : f.blocks)
        if (b.label == t[1]) fail("DuplicateBlockId", f.name + "." + t[1]);
      f.blocks.push_back(BasicBlock{t[1], {}});
    } else {
      parse_instruction(t);
    }
  }

  void parse_statevar(const std::vector<std::string>& t) {
    if (t.size() < 4 || !is_identifier(t[1])) fail("SyntaxError", "bad statevar line");
    StateVar s;
    s.name = t[1];
    bool have_slot = false, have_kind = false;
    for (std::size_t i = 2; i < t.size(); ++i) {
      auto eq = t[i].find('=');
      if (eq == std::string::npos) fail("SyntaxError", "expected key=value in statevar");
      auto key = t[i].substr(0, eq), val = t[i].substr(eq + 1);
      if (key == "slot") {
        if (!is_literal(val)) fail("SyntaxError", "bad slot");
        s.slot = std::stoull(val, nullptr, 0);
        have_slot = true;
      } else if (key == "kind") {
        auto k = state_kind_from_name(val);
        if (!k) fail("SyntaxError", "unknown kind " + val);
        s.kind = *k;
        have_kind = true;
      } else if (key == "label") {
        if (!category_from_name(val)) fail("UnknownCategory", val);
        s.label = val;
      } else {
        fail("SyntaxError", "unknown statevar attribute " + key);
      }
    }
    if (!have_slot || !have_kind) fail("SyntaxError", "statevar needs slot= and kind=");
    contract().state_vars.push_back(std::move(s));
  }

  void parse_function(std::string_view line) {
    auto rest = line.substr(line.find("function") + 8);
    auto open = rest.find('('), close = rest.rfind(')');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open)
      fail("SyntaxError", "bad function signature");
    auto head = split_ws(rest.substr(0, open));
    if (head.size() != 2 || !is_function_name(head[0])) fail("SyntaxError", "bad function header");
    if (!split_ws(rest.substr(close + 1)).empty()) fail("SyntaxError", "trailing text after signature");
    Function f;
    f.name = head[0];
    if (head[1] == "public")
      f.visibility = Visibility::Public;
    else if (head[1] == "private")
      f.visibility = Visibility::Private;
    else
      fail("SyntaxError", "visibility must be public or private");
    std::string params(rest.substr(open + 1, close - open - 1));
    std::stringstream ss(params);
    std::string item;
    std::set<std::string> seen;
    while (std::getline(ss, item, ',')) {
      auto toks = split_ws(item);
      if (toks.empty()) {
        if (params.find_first_not_of(" \t") == std::string::npos) break;
        fail("SyntaxError", "empty parameter");
      }
      if (toks.size() != 1) fail("SyntaxError", "bad parameter " + item);
      auto colon = toks[0].find(':');
      if (colon == std::string::npos) fail("SyntaxError", "parameter needs name:type");
      Param p{toks[0].substr(0, colon), toks[0].substr(colon + 1)};
      if (!is_identifier(p.name) || p.type.empty()) fail("SyntaxError", "bad parameter " + toks[0]);
      if (!seen.insert(p.name).second) fail("SyntaxError", "duplicate parameter " + p.name);
      f.params.push_back(std::move(p));
    }
    contract().functions.push_back(std::move(f));
    in_function_ = true;
  }

  Operand operand(const std::string& tok) const {
    if (is_literal(tok)) return Operand::literal(tok);
    if (is_identifier(tok)) return Operand::value(tok);
    fail("SyntaxError", "bad operand " + tok);
  }

  CallTarget call_target(const std::string& tok) const {
    CallTarget t;
    if (!tok.empty() && tok[0] == '*') {
      auto body = tok.substr(1);
      auto dot = body.find('.');
      t.address_value = body.substr(0, dot);
      if (dot != std::string::npos) t.function = body.substr(dot + 1);
      if (!is_identifier(t.address_value) || (dot != std::string::npos && !is_function_name(t.function)))
        fail("SyntaxError", "bad call target " + tok);
      return t;
    }
    auto dot = tok.find('.');
    if (dot == std::string::npos) fail("SyntaxError", "call target must be Contract.fn or *value");
    t.contract = tok.substr(0, dot);
    t.function = tok.substr(dot + 1);
    if (!is_identifier(t.contract) || !is_function_name(t.function)) fail("SyntaxError", "bad call target " + tok);
    return t;
  }

  void parse_instruction(const std::vector<std::string>& t) {
    Instruction ins;
    std::size_t i = 0;
    if (t.size() >= 3 && t[1] == "=") {
      if (!is_identifier(t[0])) fail("SyntaxError", "bad result name " + t[0]);
      ins.result = t[0];
      i = 2;
    }
    auto op = opcode_from_name(t[i]);
    if (!op) fail("UnknownOpcode", t[i]);
    ins.op = *op;
    ++i;
    auto need = [&](std::size_t n) {
      if (t.size() < i + n) fail("SyntaxError", "missing operands for " + t[i - 1]);
    };
    switch (ins.op) {
      case Opcode::SLOAD:
      case Opcode::SSTORE:
        need(1);
        if (!is_identifier(t[i])) fail("SyntaxError", "bad state variable " + t[i]);
        ins.state_ref = t[i++];
        break;
      case Opcode::CALLVALUECALL:
        need(2);
        ins.operands.push_back(operand(t[i++]));
        ins.target = call_target(t[i++]);
        break;
      case Opcode::CALL:
      case Opcode::STATICCALL:
      case Opcode::DELEGATECALL:
        need(1);
        ins.target = call_target(t[i++]);
        break;
      case Opcode::INTERNALCALL:
        need(1);
        if (!is_function_name(t[i])) fail("SyntaxError", "bad internal call target " + t[i]);
        ins.target = CallTarget{"", t[i++], ""};
        break;
      case Opcode::JUMP:
        need(1);
        ins.successors.push_back(t[i++]);
        break;
      case Opcode::JUMPI:
        need(3);
        ins.operands.push_back(operand(t[i++]));
        ins.successors.push_back(t[i++]);
        ins.successors.push_back(t[i++]);
        break;
      default:
        break;
    }
    for (const auto& s : ins.successors)
      if (block_number(s) < 0) fail("SyntaxError", "bad block label " + s);
    if ((ins.op == Opcode::JUMP || ins.op == Opcode::JUMPI) && i != t.size())
      fail("SyntaxError", "trailing tokens after jump");
    for (; i < t.size(); ++i) ins.operands.push_back(operand(t[i]));
    if (ins.operands.size() > 3) fail("SyntaxError", "more than 3 operands");
    block().instructions.push_back(std::move(ins));
  }

  std::string_view text_;
  std::size_t line_no_ = 0;
  bool in_function_ = false;
  Universe u_;
};

inline std::string target_text(const CallTarget& t) {
  if (!t.address_value.empty())
    return "*" + t.address_value + (t.function.empty() ? "" : "." + t.function);
  return t.contract + "." + t.function;
}

}  // namespace detail

/// Parses textual IR into a canonical universe. With validation on, the first
/// invariant violation is raised as an Error carrying its diagnostic code.
inline Universe parse_ir(std::string_view text, ParseOptions opts = {}) {
  Universe u = detail::IrParser(text).parse();
  canonicalize(u);
  if (opts.validate) {
    auto diags = validate(u);
    if (!diags.empty()) throw Error("ir", diags.front().code, diags.front().message);
  }
  return u;
}

inline std::string serialize_instruction(const Instruction& ins) {
  std::string s;
  if (ins.result) s += *ins.result + " = ";
  s += opcode_name(ins.op);
  std::size_t first = 0;
  switch (ins.op) {
    case Opcode::SLOAD:
    case Opcode::SSTORE:
      s += " " + ins.state_ref.value_or("?");
      break;
    case Opcode::CALLVALUECALL:
      if (!ins.operands.empty()) s += " " + ins.operands[0].text;
      s += " " + (ins.target ? detail::target_text(*ins.target) : std::string("?"));
      first = 1;
      break;
    case Opcode::CALL:
    case Opcode::STATICCALL:
    case Opcode::DELEGATECALL:
      s += " " + (ins.target ? detail::target_text(*ins.target) : std::string("?"));
      break;
    case Opcode::INTERNALCALL:
      s += " " + (ins.target ? ins.target->function : std::string("?"));
      break;
    case Opcode::JUMPI:
      if (!ins.operands.empty()) s += " " + ins.operands[0].text;
      for (const auto& b : ins.successors) s += " " + b;
      return s;
    case Opcode::JUMP:
      for (const auto& b : ins.successors) s += " " + b;
      return s;
    default:
      break;
  }
  for (std::size_t i = first; i < ins.operands.size(); ++i) s += " " + ins.operands[i].text;
  return s;
}

/// Canonical text: contracts, functions and blocks in sorted order.
inline std::string serialize_ir(const Universe& in) {
  Universe u = in;
  canonicalize(u);
  std::ostringstream os;
  os << "ir-version 1\n";
  for (const auto& c : u.contracts) {
    os << "contract " << c.name;
    if (c.address) os << " @" << *c.address;
    os << "\n";
    for (const auto& s : c.state_vars) {
      os << "statevar " << s.name << " slot=" << s.slot << " kind=" << state_kind_name(s.kind);
      if (s.label) os << " label=" << *s.label;
      os << "\n";
    }
    for (const auto& f : c.functions) {
      os << "function " << f.name << (f.visibility == Visibility::Public ? " public(" : " private(");
      for (std::size_t i = 0; i < f.params.size(); ++i)
        os << (i ? "," : "") << f.params[i].name << ":" << f.params[i].type;
      os << ")\n";
      for (const auto& b : f.blocks) {
        os << "block " << b.label << "\n";
        for (const auto& ins : b.instructions) os << "  " << serialize_instruction(ins) << "\n";
      }
    }
  }
  return os.str();
}

}  // namespace crossinspect
