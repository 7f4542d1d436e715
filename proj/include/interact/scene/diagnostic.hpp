#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace interact {

enum class Severity { kError, kWarning };

struct SourceSpan {
  std::size_t offset = 0;
  std::size_t line = 1;    // 1-based
  std::size_t column = 1;  // 1-based, in bytes
  std::size_t length = 0;
  bool operator==(const SourceSpan&) const = default;
};

/// A finding about a scenario. `code` is a stable machine-readable
/// identifier (E_* for errors, W_* for warnings); `location` is a logical
/// path such as "step:unmount_lens.requires".
struct Diagnostic {
  Severity severity = Severity::kError;
  std::string code;
  std::string message;
  std::string location;
  std::optional<SourceSpan> span;
};

inline bool has_errors(const std::vector<Diagnostic>& ds) {
  for (const auto& d : ds) {
    if (d.severity == Severity::kError) return true;
  }
  return false;
}

inline const char* severity_name(Severity s) { return s == Severity::kError ? "ERROR" : "WARNING"; }

}  // namespace interact
