#include "lexer.hpp"

#include <array>
#include <cctype>
#include <limits>

namespace archpat::detail {

namespace {

constexpr std::array<std::string_view, 24> kKeywords = {
    "pattern", "interface", "behavior", "architecture", "property", "local", "in",  "out",
    "bool",    "array",     "of",       "states",       "init",     "trans", "when", "next",
    "define",  "component", "env",      "case",         "esac",     "mod",   "true", "false"};

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_'; }
bool ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c == '@'; }

}  // namespace

bool is_keyword(std::string_view word) {
  for (auto k : kKeywords)
    if (k == word) return true;
  return false;
}

std::vector<Token> tokenize(std::string_view text, const std::string& file, std::vector<Diagnostic>& diagnostics) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1, col = 1;
  bool fresh_line = true;

  auto make = [&](TokenKind kind, std::size_t start, int start_col) {
    Token t;
    t.kind = kind;
    t.text = std::string(text.substr(start, i - start));
    t.span = SourceSpan{file, line, start_col, line, start_col + static_cast<int>(i - start)};
    t.line_start = fresh_line;
    fresh_line = false;
    return t;
  };

  while (i < text.size()) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    if (c == '\n') {
      ++i;
      ++line;
      col = 1;
      fresh_line = true;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      ++col;
      continue;
    }
    if (c == '-' && i + 1 < text.size() && text[i + 1] == '-') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    const std::size_t start = i;
    const int start_col = col;
    if (ident_start(c)) {
      while (i < text.size() && ident_char(static_cast<unsigned char>(text[i]))) ++i;
      Token t = make(TokenKind::Ident, start, start_col);
      if (is_keyword(t.text)) t.kind = TokenKind::Keyword;
      col += static_cast<int>(i - start);
      out.push_back(std::move(t));
      continue;
    }
    if (std::isdigit(c)) {
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      Token t = make(TokenKind::Int, start, start_col);
      col += static_cast<int>(i - start);
      std::int64_t v = 0;
      bool overflow = false;
      for (char d : t.text) {
        if (v > (std::numeric_limits<std::int64_t>::max() - (d - '0')) / 10) {
          overflow = true;
          break;
        }
        v = v * 10 + (d - '0');
      }
      if (overflow || v > (std::int64_t{1} << 40)) {
        diagnostics.push_back({Severity::Error, "integer literal '" + t.text + "' is out of range", t.span, t.text});
        v = 0;
      }
      t.value = v;
      out.push_back(std::move(t));
      continue;
    }
    static constexpr std::array<std::string_view, 7> two = {":=", "->", "..", "!=", "<=", ">=", "=="};
    bool matched = false;
    for (auto s : two) {
      if (text.substr(i, 2) == s) {
        i += 2;
        Token t = make(TokenKind::Symbol, start, start_col);
        col += 2;
        out.push_back(std::move(t));
        matched = true;
        break;
      }
    }
    if (matched) continue;
    static constexpr std::string_view one = ":;,.()[]{}+-*=<>&|!";
    if (one.find(static_cast<char>(c)) != std::string_view::npos) {
      ++i;
      Token t = make(TokenKind::Symbol, start, start_col);
      ++col;
      out.push_back(std::move(t));
      continue;
    }
    // Unknown byte; a UTF-8 sequence is reported as one character.
    ++i;
    if (c >= 0xC0)
      while (i < text.size() && (static_cast<unsigned char>(text[i]) & 0xC0) == 0x80) ++i;
    Token bad = make(TokenKind::Symbol, start, start_col);
    col += static_cast<int>(i - start);
    diagnostics.push_back({Severity::Error, "unexpected character '" + bad.text + "'", bad.span, bad.text});
  }
  Token end;
  end.kind = TokenKind::End;
  end.span = SourceSpan{file, line, col, line, col};
  end.line_start = true;
  out.push_back(std::move(end));
  return out;
}

}  // namespace archpat::detail
