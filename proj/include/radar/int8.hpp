#pragma once
#include <cstdint>

namespace radar {

// Bit helpers for 8-bit two's-complement weights. Bit 7 is the sign bit:
// toggling it changes the integer value by exactly +/-128, more than any
// lower bit can (<= 64).

constexpr int kWeightBits = 8;
constexpr int kMsb = 7;

enum class FlipDirection : uint8_t { ZeroToOne = 0, OneToZero = 1 };

inline constexpr bool get_bit(int8_t w, int bit) {
  return (static_cast<uint8_t>(w) >> bit) & 1u;
}

inline constexpr int8_t toggle_bit(int8_t w, int bit) {
  return static_cast<int8_t>(static_cast<uint8_t>(w) ^ (1u << bit));
}

inline constexpr FlipDirection flip_direction(int8_t pre, int bit) {
  return get_bit(pre, bit) ? FlipDirection::OneToZero : FlipDirection::ZeroToOne;
}

// Signed integer change caused by toggling `bit` of `w`.
inline constexpr int bit_flip_delta(int8_t w, int bit) {
  const int place = (bit == kMsb) ? -128 : (1 << bit);
  return get_bit(w, bit) ? -place : place;
}

inline const char* to_string(FlipDirection d) {
  return d == FlipDirection::ZeroToOne ? "0to1" : "1to0";
}

}  // namespace radar
