#pragma once

#include <ostream>
#include <string>

namespace archpat {

/// 1-based source range with an exclusive end column. A default-constructed
/// span means "no location" (programmatically built specs).
struct SourceSpan {
  std::string file;
  int line_start = 0;
  int col_start = 0;
  int line_end = 0;
  int col_end = 0;

  bool known() const { return line_start > 0; }
  static SourceSpan cover(const SourceSpan& a, const SourceSpan& b);
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string message;
  SourceSpan span;
  std::string subject;  // offending token or name, when there is one

  friend bool operator==(const Diagnostic& a, const Diagnostic& b) {
    return a.severity == b.severity && a.message == b.message && a.subject == b.subject &&
           a.span.file == b.span.file && a.span.line_start == b.span.line_start &&
           a.span.col_start == b.span.col_start && a.span.line_end == b.span.line_end &&
           a.span.col_end == b.span.col_end;
  }
};

std::ostream& operator<<(std::ostream& os, const Diagnostic& d);

}  // namespace archpat
