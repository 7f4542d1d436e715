#pragma once

#include "interact/scene/types.hpp"

#include <string>

namespace interact::lang {

/// Canonical `.itx` text: items grouped by kind (environment, parts,
/// regions, materials, cables, steps, events, difficulties), each group in
/// declaration order, one field per line, two-space indent. Angles are
/// printed in degrees with up to 9 significant digits. Parsing the output
/// yields a scenario equal to `s`.
std::string format_canonical(const Scenario& s);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_number(double v);

/// Degrees with up to 9 significant digits; falls back to the shortest
/// exact form when 9 digits would not reproduce `deg`.
std::string format_angle(double deg);

/// Double-quoted string literal with \" \\ \n \t escapes; other bytes,
/// including multi-byte UTF-8, are copied verbatim.
std::string quote(const std::string& text);

/// Condition in source syntax, parenthesized only where precedence needs it.
std::string format_condition(const Cond& c);

}  // namespace interact::lang
