#include "scjc/diagnostic.hpp"

#include <algorithm>
#include <tuple>

namespace scjc {

bool SourceSpan::contains(const SourceSpan& inner) const {
  if (!known() || !inner.known()) return true;
  auto before = [](int l1, int c1, int l2, int c2) {
    return std::tie(l1, c1) <= std::tie(l2, c2);
  };
  return before(start_line, start_col, inner.start_line, inner.start_col) &&
         before(inner.end_line, inner.end_col, end_line, end_col);
}

bool operator<(const SourceSpan& a, const SourceSpan& b) {
  return std::tie(a.file, a.start_line, a.start_col, a.end_line, a.end_col) <
         std::tie(b.file, b.start_line, b.start_col, b.end_line, b.end_col);
}

SourceSpan merge(const SourceSpan& a, const SourceSpan& b) {
  if (!a.known()) return b;
  if (!b.known()) return a;
  SourceSpan s = a;
  if (std::tie(b.start_line, b.start_col) < std::tie(s.start_line, s.start_col)) {
    s.start_line = b.start_line;
    s.start_col = b.start_col;
  }
  if (std::tie(b.end_line, b.end_col) > std::tie(s.end_line, s.end_col)) {
    s.end_line = b.end_line;
    s.end_col = b.end_col;
  }
  return s;
}

bool has_errors(const Diagnostics& ds) {
  return std::any_of(ds.begin(), ds.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

std::string format_line(const Diagnostic& d) {
  std::string out = d.severity == Severity::Error ? "error " : "warning ";
  out += d.code;
  out += ' ';
  out += std::to_string(d.span.start_line) + ":" + std::to_string(d.span.start_col);
  out += ' ';
  out += d.message;
  return out;
}

}  // namespace scjc
