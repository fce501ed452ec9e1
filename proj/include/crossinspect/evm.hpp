#pragma once

// EVM bytecode disassembly, a small label-aware assembler, and basic-block
// recovery with constant-stack jump resolution.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "diagnostics.hpp"

namespace crossinspect::evm {

using Bytes = std::vector<std::uint8_t>;

struct OpInfo {
  std::string_view name;  // empty for undefined bytes
  std::uint8_t pops = 0;
  std::uint8_t pushes = 0;
};

namespace detail {

inline constexpr std::array<OpInfo, 256> make_op_table() {
  std::array<OpInfo, 256> t{};
  auto set = [&](std::uint8_t b, std::string_view n, std::uint8_t in, std::uint8_t out) { t[b] = {n, in, out}; };
  set(0x00, "STOP", 0, 0);
  set(0x01, "ADD", 2, 1); set(0x02, "MUL", 2, 1); set(0x03, "SUB", 2, 1); set(0x04, "DIV", 2, 1);
  set(0x05, "SDIV", 2, 1); set(0x06, "MOD", 2, 1); set(0x07, "SMOD", 2, 1); set(0x08, "ADDMOD", 3, 1);
  set(0x09, "MULMOD", 3, 1); set(0x0a, "EXP", 2, 1); set(0x0b, "SIGNEXTEND", 2, 1);
  set(0x10, "LT", 2, 1); set(0x11, "GT", 2, 1); set(0x12, "SLT", 2, 1); set(0x13, "SGT", 2, 1);
  set(0x14, "EQ", 2, 1); set(0x15, "ISZERO", 1, 1); set(0x16, "AND", 2, 1); set(0x17, "OR", 2, 1);
  set(0x18, "XOR", 2, 1); set(0x19, "NOT", 1, 1); set(0x1a, "BYTE", 2, 1); set(0x1b, "SHL", 2, 1);
  set(0x1c, "SHR", 2, 1); set(0x1d, "SAR", 2, 1);
  set(0x20, "SHA3", 2, 1);
  set(0x30, "ADDRESS", 0, 1); set(0x31, "BALANCE", 1, 1); set(0x32, "ORIGIN", 0, 1); set(0x33, "CALLER", 0, 1);
  set(0x34, "CALLVALUE", 0, 1); set(0x35, "CALLDATALOAD", 1, 1); set(0x36, "CALLDATASIZE", 0, 1);
  set(0x37, "CALLDATACOPY", 3, 0); set(0x38, "CODESIZE", 0, 1); set(0x39, "CODECOPY", 3, 0);
  set(0x3a, "GASPRICE", 0, 1); set(0x3b, "EXTCODESIZE", 1, 1); set(0x3c, "EXTCODECOPY", 4, 0);
  set(0x3d, "RETURNDATASIZE", 0, 1); set(0x3e, "RETURNDATACOPY", 3, 0); set(0x3f, "EXTCODEHASH", 1, 1);
  set(0x40, "BLOCKHASH", 1, 1); set(0x41, "COINBASE", 0, 1); set(0x42, "TIMESTAMP", 0, 1);
  set(0x43, "NUMBER", 0, 1); set(0x44, "PREVRANDAO", 0, 1); set(0x45, "GASLIMIT", 0, 1);
  set(0x46, "CHAINID", 0, 1); set(0x47, "SELFBALANCE", 0, 1); set(0x48, "BASEFEE", 0, 1);
  set(0x49, "BLOBHASH", 1, 1); set(0x4a, "BLOBBASEFEE", 0, 1);
  set(0x50, "POP", 1, 0); set(0x51, "MLOAD", 1, 1); set(0x52, "MSTORE", 2, 0); set(0x53, "MSTORE8", 2, 0);
  set(0x54, "SLOAD", 1, 1); set(0x55, "SSTORE", 2, 0); set(0x56, "JUMP", 1, 0); set(0x57, "JUMPI", 2, 0);
  set(0x58, "PC", 0, 1); set(0x59, "MSIZE", 0, 1); set(0x5a, "GAS", 0, 1); set(0x5b, "JUMPDEST", 0, 0);
  set(0x5c, "TLOAD", 1, 1); set(0x5d, "TSTORE", 2, 0); set(0x5e, "MCOPY", 3, 0); set(0x5f, "PUSH0", 0, 1);
  constexpr std::array<std::string_view, 32> push = {
      "PUSH1", "PUSH2", "PUSH3", "PUSH4", "PUSH5", "PUSH6", "PUSH7", "PUSH8",
      "PUSH9", "PUSH10", "PUSH11", "PUSH12", "PUSH13", "PUSH14", "PUSH15", "PUSH16",
      "PUSH17", "PUSH18", "PUSH19", "PUSH20", "PUSH21", "PUSH22", "PUSH23", "PUSH24",
      "PUSH25", "PUSH26", "PUSH27", "PUSH28", "PUSH29", "PUSH30", "PUSH31", "PUSH32"};
  constexpr std::array<std::string_view, 16> dup = {
      "DUP1", "DUP2", "DUP3", "DUP4", "DUP5", "DUP6", "DUP7", "DUP8",
      "DUP9", "DUP10", "DUP11", "DUP12", "DUP13", "DUP14", "DUP15", "DUP16"};
  constexpr std::array<std::string_view, 16> swap = {
      "SWAP1", "SWAP2", "SWAP3", "SWAP4", "SWAP5", "SWAP6", "SWAP7", "SWAP8",
      "SWAP9", "SWAP10", "SWAP11", "SWAP12", "SWAP13", "SWAP14", "SWAP15", "SWAP16"};
  for (int i = 0; i < 32; ++i) set(static_cast<std::uint8_t>(0x60 + i), push[i], 0, 1);
  for (int i = 0; i < 16; ++i) set(static_cast<std::uint8_t>(0x80 + i), dup[i], static_cast<std::uint8_t>(i + 1), static_cast<std::uint8_t>(i + 2));
  for (int i = 0; i < 16; ++i) set(static_cast<std::uint8_t>(0x90 + i), swap[i], static_cast<std::uint8_t>(i + 2), static_cast<std::uint8_t>(i + 2));
  set(0xa0, "LOG0", 2, 0); set(0xa1, "LOG1", 3, 0); set(0xa2, "LOG2", 4, 0); set(0xa3, "LOG3", 5, 0); set(0xa4, "LOG4", 6, 0);
  set(0xf0, "CREATE", 3, 1); set(0xf1, "CALL", 7, 1); set(0xf2, "CALLCODE", 7, 1); set(0xf3, "RETURN", 2, 0);
  set(0xf4, "DELEGATECALL", 6, 1); set(0xf5, "CREATE2", 4, 1); set(0xfa, "STATICCALL", 6, 1);
  set(0xfd, "REVERT", 2, 0); set(0xfe, "INVALID", 0, 0); set(0xff, "SELFDESTRUCT", 1, 0);
  return t;
}

inline constexpr std::array<OpInfo, 256> kOps = make_op_table();

}  // namespace detail

inline constexpr std::uint8_t OP_STOP = 0x00, OP_JUMP = 0x56, OP_JUMPI = 0x57, OP_JUMPDEST = 0x5b,
                              OP_PUSH0 = 0x5f, OP_PUSH1 = 0x60, OP_PUSH32 = 0x7f, OP_DUP1 = 0x80,
                              OP_SWAP1 = 0x90, OP_RETURN = 0xf3, OP_REVERT = 0xfd, OP_INVALID = 0xfe,
                              OP_SELFDESTRUCT = 0xff;

inline const OpInfo& op_info(std::uint8_t b) {
  static const OpInfo invalid{"INVALID", 0, 0};
  const auto& i = detail::kOps[b];
  return i.name.empty() ? invalid : i;
}

inline bool is_push(std::uint8_t b) { return b >= OP_PUSH1 && b <= OP_PUSH32; }
inline std::size_t push_width(std::uint8_t b) { return is_push(b) ? b - OP_PUSH1 + 1u : 0u; }

inline bool ends_block(std::uint8_t b) {
  return b == OP_JUMP || b == OP_JUMPI || b == OP_STOP || b == OP_RETURN || b == OP_REVERT ||
         b == OP_SELFDESTRUCT || op_info(b).name == "INVALID";
}

struct RawBytecode {
  std::string contract_name;
  Bytes bytes;
};

struct EvmOp {
  std::size_t offset = 0;
  std::uint8_t opcode = 0;
  Bytes immediate;           // PUSH payload, zero padded when truncated
  std::size_t missing = 0;   // bytes of padding added to a truncated PUSH

  std::string_view mnemonic() const { return op_info(opcode).name; }
  std::size_t size() const { return 1 + immediate.size() - missing; }
  friend bool operator==(const EvmOp&, const EvmOp&) = default;
};

/// Decodes hex text: optional 0x prefix, whitespace ignored.
inline Bytes decode_hex(std::string_view text) {
  std::string digits;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) digits.push_back(c);
  if (digits.size() >= 2 && digits[0] == '0' && (digits[1] == 'x' || digits[1] == 'X')) digits.erase(0, 2);
  if (digits.size() % 2) throw Error("frontend", "OddHexLength", "hex text has odd length");
  Bytes out;
  out.reserve(digits.size() / 2);
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  for (std::size_t i = 0; i < digits.size(); i += 2) {
    int hi = nibble(digits[i]), lo = nibble(digits[i + 1]);
    if (hi < 0 || lo < 0) throw Error("frontend", "BadHexDigit", "non-hex character in bytecode");
    out.push_back(static_cast<std::uint8_t>(hi * 16 + lo));
  }
  return out;
}

inline std::string encode_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 15]);
  }
  return s;
}

struct Disassembly {
  std::vector<EvmOp> ops;
  Diagnostics diagnostics;
};

inline Disassembly disassemble(const RawBytecode& raw) {
  if (raw.bytes.empty()) throw Error("frontend", "EmptyBytecode", raw.contract_name + " has no code");
  Disassembly d;
  const auto& code = raw.bytes;
  for (std::size_t i = 0; i < code.size();) {
    EvmOp op;
    op.offset = i;
    op.opcode = code[i];
    const auto w = push_width(op.opcode);
    const auto avail = std::min(w, code.size() - i - 1);
    op.immediate.assign(code.begin() + static_cast<std::ptrdiff_t>(i + 1),
                        code.begin() + static_cast<std::ptrdiff_t>(i + 1 + avail));
    if (avail < w) {
      op.missing = w - avail;
      op.immediate.resize(w, 0);
      d.diagnostics.push_back({Diagnostic::Severity::Warning, "frontend", "TruncatedPush",
                               raw.contract_name + ": PUSH at offset " + std::to_string(i) + " padded with " +
                                   std::to_string(op.missing) + " zero bytes"});
    }
    i += 1 + avail;
    d.ops.push_back(std::move(op));
  }
  return d;
}

/// Re-encodes decoded ops; inverse of disassemble (padding is dropped).
inline Bytes serialize(std::span<const EvmOp> ops) {
  Bytes out;
  for (const auto& op : ops) {
    out.push_back(op.opcode);
    out.insert(out.end(), op.immediate.begin(), op.immediate.end() - static_cast<std::ptrdiff_t>(op.missing));
  }
  return out;
}

inline std::optional<std::uint8_t> opcode_by_name(std::string_view name) {
  for (int b = 0; b < 256; ++b)
    if (detail::kOps[b].name == name) return static_cast<std::uint8_t>(b);
  return std::nullopt;
}

/// Assembles mnemonic text, one instruction per line. `name:` defines a
/// label; `PUSHn @name` pushes a label offset; `PUSHn 0x..` pushes a value
/// (right aligned). `;` starts a comment.
inline Bytes assemble(std::string_view text) {
  struct Pending {
    std::size_t at;
    std::size_t width;
    std::string label;
  };
  Bytes out;
  std::map<std::string, std::size_t> labels;
  std::vector<Pending> fixups;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto c = line.find(';'); c != std::string::npos) line.erase(c);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      if (tok.back() == ':') {
        labels[tok.substr(0, tok.size() - 1)] = out.size();
        continue;
      }
      auto op = opcode_by_name(tok);
      if (!op) throw Error("frontend", "AssemblerError", "line " + std::to_string(line_no) + ": unknown mnemonic " + tok);
      out.push_back(*op);
      const auto w = push_width(*op);
      if (w == 0) continue;
      std::string arg;
      if (!(ls >> arg)) throw Error("frontend", "AssemblerError", "line " + std::to_string(line_no) + ": PUSH needs an argument");
      if (arg[0] == '@') {
        fixups.push_back({out.size(), w, arg.substr(1)});
        out.resize(out.size() + w, 0);
        continue;
      }
      Bytes value;
      if (arg.size() > 2 && arg[0] == '0' && (arg[1] == 'x' || arg[1] == 'X')) {
        std::string h = arg.substr(2);
        if (h.size() % 2) h.insert(h.begin(), '0');
        value = decode_hex(h);
      } else {
        unsigned long long v = std::stoull(arg);
        while (v) {
          value.insert(value.begin(), static_cast<std::uint8_t>(v & 0xff));
          v >>= 8;
        }
      }
      if (value.size() > w) throw Error("frontend", "AssemblerError", "line " + std::to_string(line_no) + ": value too wide");
      out.insert(out.end(), w - value.size(), 0);
      out.insert(out.end(), value.begin(), value.end());
    }
  }
  for (const auto& f : fixups) {
    auto it = labels.find(f.label);
    if (it == labels.end()) throw Error("frontend", "AssemblerError", "undefined label " + f.label);
    auto v = it->second;
    for (std::size_t k = 0; k < f.width; ++k) {
      out[f.at + f.width - 1 - k] = static_cast<std::uint8_t>(v & 0xff);
      v >>= 8;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Abstract stack values. Block recovery only needs constants; the dispatcher
// recognizer and the lifter additionally track where the selector came from.

struct AbsValue {
  enum class Kind : std::uint8_t { Unknown, Const, Pow224, CalldataWord0, Selector, SelectorEq, SelectorConst };
  Kind kind = Kind::Unknown;
  std::uint64_t value = 0;
  friend bool operator==(const AbsValue&, const AbsValue&) = default;

  static AbsValue unknown() { return {}; }
  static AbsValue constant(std::uint64_t v) { return {Kind::Const, v}; }
  bool is_const() const { return kind == Kind::Const; }
};

/// Interprets a big-endian immediate as an abstract value.
inline AbsValue abs_from_immediate(std::span<const std::uint8_t> imm) {
  std::size_t first = 0;
  while (first < imm.size() && imm[first] == 0) ++first;
  const std::size_t significant = imm.size() - first;
  if (significant <= 8) {
    std::uint64_t v = 0;
    for (std::size_t i = first; i < imm.size(); ++i) v = (v << 8) | imm[i];
    return AbsValue::constant(v);
  }
  // 2^224, the divisor older compilers use to extract the selector.
  if (significant == 29 && imm[first] == 1 &&
      std::all_of(imm.begin() + static_cast<std::ptrdiff_t>(first + 1), imm.end(), [](auto b) { return b == 0; }))
    return {AbsValue::Kind::Pow224, 0};
  // A selector left aligned in a 32-byte word.
  if (imm.size() == 32 && std::all_of(imm.begin() + 4, imm.end(), [](auto b) { return b == 0; })) {
    std::uint64_t v = (std::uint64_t{imm[0]} << 24) | (std::uint64_t{imm[1]} << 16) | (std::uint64_t{imm[2]} << 8) | imm[3];
    return {AbsValue::Kind::SelectorConst, v};
  }
  return AbsValue::unknown();
}

using AbsStack = std::vector<AbsValue>;  // back() is the top

/// Applies one op to an abstract stack. Items popped from below the known
/// region read as Unknown. Returns false on an op that ends the block.
inline void abs_step(const EvmOp& op, AbsStack& st) {
  auto pop = [&]() {
    if (st.empty()) return AbsValue::unknown();
    auto v = st.back();
    st.pop_back();
    return v;
  };
  const auto b = op.opcode;
  if (b == OP_PUSH0) {
    st.push_back(AbsValue::constant(0));
    return;
  }
  if (is_push(b)) {
    st.push_back(abs_from_immediate(op.immediate));
    return;
  }
  if (b >= OP_DUP1 && b < OP_DUP1 + 16) {
    std::size_t n = b - OP_DUP1 + 1u;
    st.push_back(st.size() >= n ? st[st.size() - n] : AbsValue::unknown());
    return;
  }
  if (b >= OP_SWAP1 && b < OP_SWAP1 + 16) {
    std::size_t n = b - OP_SWAP1 + 1u;
    while (st.size() < n + 1) st.insert(st.begin(), AbsValue::unknown());
    std::swap(st[st.size() - 1], st[st.size() - 1 - n]);
    return;
  }
  const auto& info = op_info(b);
  using K = AbsValue::Kind;
  const auto name = info.name;
  if (name == "CALLDATALOAD") {
    auto off = pop();
    st.push_back(off.is_const() && off.value == 0 ? AbsValue{K::CalldataWord0, 0} : AbsValue::unknown());
    return;
  }
  if (name == "SHR") {
    auto shift = pop(), val = pop();
    if (shift.is_const() && shift.value == 224 && val.kind == K::CalldataWord0)
      st.push_back({K::Selector, 0});
    else if (shift.is_const() && val.is_const())
      st.push_back(AbsValue::constant(shift.value >= 64 ? 0 : val.value >> shift.value));
    else
      st.push_back(AbsValue::unknown());
    return;
  }
  if (name == "SHL") {
    auto shift = pop(), val = pop();
    if (shift.is_const() && shift.value == 224 && val.is_const() && val.value <= 0xffffffffu)
      st.push_back({K::SelectorConst, val.value});
    else if (shift.is_const() && val.is_const() && shift.value < 64 && (val.value >> (63 - shift.value)) == 0)
      st.push_back(AbsValue::constant(val.value << shift.value));
    else
      st.push_back(AbsValue::unknown());
    return;
  }
  if (name == "DIV") {
    auto a = pop(), d = pop();
    if (a.kind == K::CalldataWord0 && d.kind == K::Pow224)
      st.push_back({K::Selector, 0});
    else if (a.is_const() && d.is_const())
      st.push_back(AbsValue::constant(d.value == 0 ? 0 : a.value / d.value));
    else
      st.push_back(AbsValue::unknown());
    return;
  }
  if (name == "AND") {
    auto a = pop(), c = pop();
    auto is_mask = [](const AbsValue& v) { return v.is_const() && v.value == 0xffffffffu; };
    if ((a.kind == K::Selector && is_mask(c)) || (c.kind == K::Selector && is_mask(a)))
      st.push_back({K::Selector, 0});
    else if (a.is_const() && c.is_const())
      st.push_back(AbsValue::constant(a.value & c.value));
    else
      st.push_back(AbsValue::unknown());
    return;
  }
  if (name == "EQ") {
    auto a = pop(), c = pop();
    if (a.kind == K::Selector && c.is_const())
      st.push_back({K::SelectorEq, c.value});
    else if (c.kind == K::Selector && a.is_const())
      st.push_back({K::SelectorEq, a.value});
    else if (a.is_const() && c.is_const())
      st.push_back(AbsValue::constant(a.value == c.value));
    else
      st.push_back(AbsValue::unknown());
    return;
  }
  if (name == "ADD") {
    auto a = pop(), c = pop();
    if (a.is_const() && c.is_const() && a.value + c.value >= a.value)
      st.push_back(AbsValue::constant(a.value + c.value));
    else
      st.push_back(AbsValue::unknown());
    return;
  }
  for (int i = 0; i < info.pops; ++i) pop();
  for (int i = 0; i < info.pushes; ++i) st.push_back(AbsValue::unknown());
}

/// Pointwise join aligned at the top of stack; heights differing means the
/// deeper items are dropped.
inline AbsStack join_stacks(const AbsStack& a, const AbsStack& b) {
  const std::size_t n = std::min(a.size(), b.size());
  AbsStack out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& x = a[a.size() - n + i];
    const auto& y = b[b.size() - n + i];
    out[i] = x == y ? x : AbsValue::unknown();
  }
  return out;
}

// ---------------------------------------------------------------------------

inline constexpr std::size_t kUnresolved = static_cast<std::size_t>(-1);

struct EvmBlock {
  std::size_t first_op = 0;  // index into the op vector
  std::size_t end_op = 0;    // one past the last op
  std::size_t start_offset = 0;
  std::vector<std::size_t> successors;  // block indices; kUnresolved for unknown targets
  std::optional<std::size_t> fallthrough;
  std::optional<std::size_t> jump_target;  // resolved taken edge
  bool unknown_target = false;
  std::optional<AbsStack> entry_stack;  // from constant-stack simulation
};

struct Cfg {
  std::vector<EvmOp> ops;
  std::vector<EvmBlock> blocks;
  Diagnostics diagnostics;

  std::optional<std::size_t> block_at_offset(std::size_t off) const {
    auto it = std::lower_bound(blocks.begin(), blocks.end(), off,
                               [](const EvmBlock& b, std::size_t o) { return b.start_offset < o; });
    if (it == blocks.end() || it->start_offset != off) return std::nullopt;
    return static_cast<std::size_t>(it - blocks.begin());
  }
  std::set<std::pair<std::size_t, std::size_t>> edges() const {
    std::set<std::pair<std::size_t, std::size_t>> e;
    for (std::size_t i = 0; i < blocks.size(); ++i)
      for (auto s : blocks[i].successors) e.insert({i, s});
    return e;
  }
};

struct BlockRecoveryOptions {
  int max_revisits = 2;
};

/// Splits ops into blocks and resolves jump targets by a worklist
/// constant-stack simulation joined over predecessors.
inline Cfg recover_blocks(std::vector<EvmOp> ops, BlockRecoveryOptions opts = {}) {
  Cfg cfg;
  cfg.ops = std::move(ops);
  const auto& o = cfg.ops;
  for (std::size_t i = 0; i < o.size(); ++i) {
    const bool leader = i == 0 || o[i].opcode == OP_JUMPDEST || ends_block(o[i - 1].opcode);
    if (leader) {
      if (!cfg.blocks.empty()) cfg.blocks.back().end_op = i;
      EvmBlock b;
      b.first_op = i;
      b.start_offset = o[i].offset;
      cfg.blocks.push_back(b);
    }
  }
  if (!cfg.blocks.empty()) cfg.blocks.back().end_op = o.size();

  auto& blocks = cfg.blocks;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto last = o[blocks[i].end_op - 1].opcode;
    const bool falls = !ends_block(last) || last == OP_JUMPI;
    if (falls && i + 1 < blocks.size()) blocks[i].fallthrough = i + 1;
  }

  std::vector<int> visits(blocks.size(), 0);
  std::vector<std::set<std::size_t>> targets(blocks.size());
  std::vector<bool> unresolved(blocks.size(), false);
  std::vector<std::size_t> work;
  if (!blocks.empty()) {
    blocks[0].entry_stack = AbsStack{};
    work.push_back(0);
  }
  auto propagate = [&](std::size_t to, const AbsStack& st) {
    auto& entry = blocks[to].entry_stack;
    AbsStack next = entry ? join_stacks(*entry, st) : st;
    if (!entry || *entry != next) {
      if (visits[to] > opts.max_revisits) return;
      entry = std::move(next);
      work.push_back(to);
    }
  };
  while (!work.empty()) {
    auto bi = work.back();
    work.pop_back();
    ++visits[bi];
    AbsStack st = *blocks[bi].entry_stack;
    const auto& b = blocks[bi];
    for (std::size_t k = b.first_op; k + 1 < b.end_op; ++k) abs_step(o[k], st);
    const auto& last = o[b.end_op - 1];
    if (last.opcode == OP_JUMP || last.opcode == OP_JUMPI) {
      AbsValue target = st.empty() ? AbsValue::unknown() : st.back();
      abs_step(last, st);
      std::optional<std::size_t> tb;
      if (target.is_const()) tb = cfg.block_at_offset(target.value);
      if (tb && o[blocks[*tb].first_op].opcode == OP_JUMPDEST) {
        targets[bi].insert(*tb);
        propagate(*tb, st);
      } else {
        unresolved[bi] = true;
      }
    } else {
      abs_step(last, st);
    }
    if (b.fallthrough) propagate(*b.fallthrough, st);
  }

  for (std::size_t i = 0; i < blocks.size(); ++i) {
    auto& b = blocks[i];
    std::set<std::size_t> succ(targets[i].begin(), targets[i].end());
    if (targets[i].size() == 1) b.jump_target = *targets[i].begin();
    if (b.fallthrough) succ.insert(*b.fallthrough);
    b.successors.assign(succ.begin(), succ.end());
    const auto last = o[b.end_op - 1].opcode;
    const bool jumps = last == OP_JUMP || last == OP_JUMPI;
    // A jump never simulated (unreachable block) or with an unknown operand.
    if (jumps && (unresolved[i] || targets[i].empty())) {
      b.unknown_target = true;
      b.successors.push_back(kUnresolved);
      cfg.diagnostics.push_back({Diagnostic::Severity::Note, "frontend", "UnresolvedJump",
                                 "jump at offset " + std::to_string(o[b.end_op - 1].offset) + " has an unknown target"});
    }
  }
  return cfg;
}

}  // namespace crossinspect::evm
