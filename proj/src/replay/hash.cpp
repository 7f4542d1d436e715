#include "interact/replay/hash.hpp"

#include "interact/bytes.hpp"
#include "interact/lang/format.hpp"

#include <charconv>

namespace interact::replay {

std::uint64_t state_hash(const session::Session& s) {
  return fnv1a64(s.serialize_status(), fnv1a64(s.world().serialize()));
}

std::uint64_t scenario_hash(const Scenario& s) { return fnv1a64(lang::format_canonical(s)); }

std::string hex16(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) out[static_cast<std::size_t>(i)] = kDigits[v & 0xF];
  return out;
}

std::optional<std::uint64_t> parse_hex16(std::string_view text) {
  if (text.size() != 16) return std::nullopt;
  std::uint64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v, 16);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

}  // namespace interact::replay
