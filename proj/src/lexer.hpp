#pragma once

// Tokenizer for the .arch DSL. Internal header.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "archpat/diagnostics.hpp"

namespace archpat::detail {

enum class TokenKind { Ident, Keyword, Int, Symbol, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  std::int64_t value = 0;  // Int
  SourceSpan span;
  bool line_start = false;  // first token on its line

  bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
  bool sym(std::string_view t) const { return is(TokenKind::Symbol, t); }
  bool kw(std::string_view t) const { return is(TokenKind::Keyword, t); }
};

bool is_keyword(std::string_view word);

/// Columns are 1-based byte offsets within the line.
std::vector<Token> tokenize(std::string_view text, const std::string& file, std::vector<Diagnostic>& diagnostics);

}  // namespace archpat::detail
