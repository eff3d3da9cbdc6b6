#pragma once

#include <string>
#include <vector>

namespace scjc {

/// 1-based source region. A default-constructed span (line 0) means "no
/// location", used for nodes built programmatically.
struct SourceSpan {
  std::string file;
  int start_line = 0;
  int start_col = 0;
  int end_line = 0;
  int end_col = 0;

  bool known() const { return start_line > 0; }
  /// True if `inner` lies within this span.
  bool contains(const SourceSpan& inner) const;
};

bool operator<(const SourceSpan& a, const SourceSpan& b);

SourceSpan merge(const SourceSpan& a, const SourceSpan& b);

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;
  std::string message;
  SourceSpan span;
};

using Diagnostics = std::vector<Diagnostic>;

bool has_errors(const Diagnostics& ds);

/// `severity code line:col message`
std::string format_line(const Diagnostic& d);

}  // namespace scjc
