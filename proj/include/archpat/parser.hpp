#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "archpat/model.hpp"

namespace archpat {

struct ParseResult {
  std::optional<PatternSpec> spec;  // present iff no error diagnostic
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return spec.has_value(); }
};

/// Parses `.arch` text. Never throws on malformed input; errors are
/// collected with recovery at statement boundaries.
ParseResult parse_pattern(std::string_view text, const std::string& file = "<input>");

struct LtlParseResult {
  LtlPtr formula;  // null on error
  std::vector<Diagnostic> diagnostics;
};

/// Parses a standalone LTL formula in property syntax.
LtlParseResult parse_ltl(std::string_view text, const std::string& file = "<formula>");

struct ExprParseResult {
  ExprPtr expr;
  std::vector<Diagnostic> diagnostics;
};

ExprParseResult parse_expr(std::string_view text, const std::string& file = "<expr>");

/// Canonical DSL text. Deterministic; reparses to an equal spec.
std::string pretty_print(const PatternSpec& spec);

std::string to_dsl(const Expr& e);
std::string to_dsl(const LtlFormula& f);
std::string to_dsl(const Sort& s);

}  // namespace archpat
