#pragma once

#include "interact/scene/diagnostic.hpp"
#include "interact/scene/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace interact::lang {

/// Logical location ("step:s.requires") → source span, filled by the parser.
class SourceMap {
 public:
  void record(std::string location, SourceSpan span) { spans_[std::move(location)] = span; }

  /// Most specific recorded span for a location: the exact key, then the
  /// key with trailing ".field" segments dropped, then the fallback.
  SourceSpan resolve(std::string_view location) const;

  void set_fallback(SourceSpan s) { fallback_ = s; }

 private:
  std::map<std::string, SourceSpan, std::less<>> spans_;
  SourceSpan fallback_;
};

struct ParseResult {
  std::optional<Scenario> scenario;  // present iff no error diagnostics
  std::vector<Diagnostic> diagnostics;
  SourceMap source_map;
};

/// Parses `.itx` text. Lexical, syntax and semantic problems are reported
/// as diagnostics with spans; after a syntax error the parser skips to the
/// end of the enclosing item and continues.
ParseResult parse(std::string_view text);

/// Attaches spans from the source map to diagnostics that lack one.
void attach_spans(std::vector<Diagnostic>& diags, const SourceMap& map);

}  // namespace interact::lang
