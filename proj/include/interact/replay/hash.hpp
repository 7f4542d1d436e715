#pragma once

#include "interact/scene/types.hpp"
#include "interact/session/session.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace interact::replay {

/// FNV-1a 64 over the world serialization followed by the session status
/// serialization. Stable within one build; not promised across platforms.
std::uint64_t state_hash(const session::Session& s);

/// FNV-1a 64 of the canonical text, so reformatting a file keeps its identity.
std::uint64_t scenario_hash(const Scenario& s);

/// Sixteen lowercase hex digits.
std::string hex16(std::uint64_t v);
std::optional<std::uint64_t> parse_hex16(std::string_view text);

}  // namespace interact::replay
