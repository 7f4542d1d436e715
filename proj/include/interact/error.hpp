#pragma once

#include <stdexcept>
#include <string>

namespace interact {

/// Contract violation raised by the engine. `code` uses the same E_* vocabulary
/// as diagnostics so callers can map it onto wire errors or exit codes.
class EngineError : public std::runtime_error {
 public:
  EngineError(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace interact
