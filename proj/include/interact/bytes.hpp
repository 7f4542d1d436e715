#pragma once

#include "interact/math.hpp"

#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

namespace interact {

/// Little-endian byte sink for the canonical serializations that feed the
/// state hash. Strings are u32 length + bytes; reals are raw IEEE-754 bits.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double d) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &d, sizeof bits);
    u64(bits);
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_ += s;
  }
  void vec(const Vec3& v) {
    f64(v.x());
    f64(v.y());
    f64(v.z());
  }
  void pose(const Pose& p) {
    vec(p.position);
    f64(p.orientation.w());
    f64(p.orientation.x());
    f64(p.orientation.y());
    f64(p.orientation.z());
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

inline constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

/// FNV-1a 64; pass a previous result as `seed` to hash a concatenation.
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = kFnvOffset) {
  std::uint64_t h = seed;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return h;
}

}  // namespace interact
