#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "archpat/model.hpp"

namespace archpat {

/// Raised for LTL atoms that have no SMV counterpart (Active, Connected).
class UnsupportedAtom : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised for a sort without SMV rendering. No such sort exists at present.
class UnsupportedSort : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Rendered SMV model: component modules, `main`, then the LTLSPEC block.
/// `rendered` is `header` followed by the modules in order, separated by
/// blank lines.
struct SmvDocument {
  std::string header;
  std::vector<std::string> modules;
  std::string rendered;
};

inline constexpr const char* kToolVersion = "archpat 0.1.0";

/// Module for one component type: inputs become parameters, locals and
/// `controlState` go to VAR, initial and next values to ASSIGN, outputs
/// and helper definitions to DEFINE.
std::string emit_module(const InterfaceSpec& iface, const BehaviorSpec& behavior);

/// `MODULE main`: instances, env variables and shared definitions.
std::string emit_main(const PatternSpec& spec);

/// One `LTLSPEC` line per property, each preceded by a comment with its name.
std::string emit_ltlspecs(const std::vector<Property>& properties);

/// Renders a single formula in SMV LTL syntax; throws UnsupportedAtom.
std::string to_smv(const LtlFormula& f);
std::string to_smv(const Expr& e);
std::string to_smv(const Sort& s);

/// SMV module name of an interface (lowercased).
std::string module_name(const std::string& interface_name);

/// Whole document; byte-deterministic. Throws std::invalid_argument for an
/// invalid spec and UnsupportedAtom for unsupported property atoms.
SmvDocument emit_file(const PatternSpec& spec);

/// 64-bit FNV-1a digest as 16 lowercase hex digits.
std::string content_hash(const std::string& text);

}  // namespace archpat
