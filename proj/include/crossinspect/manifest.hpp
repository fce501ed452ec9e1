#pragma once

// Deployment manifest: which contracts to analyze, where their IR or bytecode
// lives, and how address-typed storage slots bind to contracts.
//
//   {
//     "contracts": [ {"ir": "fig2.ir"},
//                    {"name": "Token", "bytecode": "token.hex",
//                     "selectors": {"0xa9059cbb": "transfer"}, "address": "0x.."} ],
//     "bindings":  [ {"contract": "Auction", "slot": 3, "target": "FundsHandler"} ],
//     "entries":   [ "Auction.bid" ],
//     "semantics": "heuristic" | "off" | "file:<path>",
//     "config":    { "max_paths_per_pair": 64, ... }
//   }
//
// Relative paths resolve against the manifest's directory.

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "evm.hpp"
#include "evm_lift.hpp"
#include "graphs.hpp"
#include "ir_text.hpp"

namespace crossinspect {

struct ContractSource {
  std::optional<std::filesystem::path> ir;
  std::string name;
  std::optional<std::filesystem::path> bytecode;
  evm::NameMap selectors;
  std::optional<std::string> address;
};

struct Manifest {
  std::filesystem::path base_dir;
  std::vector<ContractSource> contracts;
  std::vector<Binding> bindings;
  std::optional<std::vector<std::string>> entries;
  std::optional<std::string> semantics;
  nlohmann::json config = nlohmann::json::object();
};

inline std::string read_file(const std::filesystem::path& p, const std::string& stage = "pipeline") {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(stage, "FileNotFound", p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace detail {

[[noreturn]] inline void manifest_error(const std::string& msg) { throw Error("pipeline", "ManifestInvalid", msg); }

inline std::uint32_t parse_selector(const std::string& s) {
  std::string h = s.rfind("0x", 0) == 0 ? s.substr(2) : s;
  if (h.empty() || h.size() > 8 || h.find_first_not_of("0123456789abcdefABCDEF") != std::string::npos)
    manifest_error("bad selector " + s);
  return static_cast<std::uint32_t>(std::stoul(h, nullptr, 16));
}

}  // namespace detail

inline Manifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    detail::manifest_error(e.what());
  }
  if (!j.is_object()) detail::manifest_error("top level must be an object");
  Manifest m;
  m.base_dir = base_dir;
  try {
    for (const auto& c : j.value("contracts", nlohmann::json::array())) {
      ContractSource s;
      if (c.contains("ir")) {
        s.ir = base_dir / c.at("ir").get<std::string>();
      } else if (c.contains("bytecode")) {
        s.name = c.at("name").get<std::string>();
        s.bytecode = base_dir / c.at("bytecode").get<std::string>();
        const auto selectors = c.value("selectors", nlohmann::json::object());
        for (const auto& [sel, fn] : selectors.items())
          s.selectors[detail::parse_selector(sel)] = fn.get<std::string>();
        if (c.contains("address")) s.address = c.at("address").get<std::string>();
      } else {
        detail::manifest_error("contract entry needs \"ir\" or \"bytecode\"");
      }
      m.contracts.push_back(std::move(s));
    }
    for (const auto& b : j.value("bindings", nlohmann::json::array()))
      m.bindings.push_back({b.at("contract").get<std::string>(), b.at("slot").get<std::uint64_t>(),
                            b.at("target").get<std::string>()});
    if (j.contains("entries")) m.entries = j.at("entries").get<std::vector<std::string>>();
    if (j.contains("semantics")) {
      auto s = j.at("semantics").get<std::string>();
      if (s.rfind("file:", 0) == 0) s = "file:" + (base_dir / s.substr(5)).string();
      m.semantics = s;
    }
    if (j.contains("config")) m.config = j.at("config");
  } catch (const nlohmann::json::exception& e) {
    detail::manifest_error(e.what());
  }
  return m;
}

inline Manifest load_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_file(path), path.parent_path());
}

struct LoadedProgram {
  Universe universe;
  Diagnostics diagnostics;
};

/// Parses or lifts every contract of the manifest into one canonical universe.
inline LoadedProgram load_program(const Manifest& m) {
  LoadedProgram out;
  // A selector names the same signature in every contract, so calls into a
  // sibling contract can be named from that contract's selector list.
  evm::NameMap all_names;
  for (const auto& src : m.contracts) all_names.insert(src.selectors.begin(), src.selectors.end());
  for (const auto& src : m.contracts) {
    if (src.ir) {
      auto u = parse_ir(read_file(*src.ir, "ir"));
      for (auto& c : u.contracts) out.universe.contracts.push_back(std::move(c));
      continue;
    }
    evm::RawBytecode raw{src.name, evm::decode_hex(read_file(*src.bytecode, "frontend"))};
    auto dis = evm::disassemble(raw);
    out.diagnostics.insert(out.diagnostics.end(), dis.diagnostics.begin(), dis.diagnostics.end());
    auto cfg = evm::recover_blocks(dis.ops);
    out.diagnostics.insert(out.diagnostics.end(), cfg.diagnostics.begin(), cfg.diagnostics.end());
    auto names = src.selectors;
    names.insert(all_names.begin(), all_names.end());
    auto table = evm::identify_functions(cfg, names);
    auto lifted = evm::lift_to_ir(cfg, table, raw, {names});
    lifted.contract.address = src.address;
    out.diagnostics.insert(out.diagnostics.end(), lifted.diagnostics.begin(), lifted.diagnostics.end());
    out.universe.contracts.push_back(std::move(lifted.contract));
  }
  std::set<std::string> names;
  for (const auto& c : out.universe.contracts)
    if (!names.insert(c.name).second) throw Error("pipeline", "DuplicateContract", c.name);
  canonicalize(out.universe);
  auto v = validate(out.universe);
  for (const auto& d : v)
    if (d.severity == Diagnostic::Severity::Error) throw Error("ir", d.code, d.message);
  out.diagnostics.insert(out.diagnostics.end(), v.begin(), v.end());
  return out;
}

}  // namespace crossinspect
