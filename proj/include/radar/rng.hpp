#pragma once
#include <cstdint>
#include <random>
#include <string_view>

namespace radar {

// All randomness flows from one master seed through named substreams, so any
// experiment piece (training, keys, attack round 17, ...) can be reproduced
// in isolation. Derivation is a splitmix64 mix of master seed, an FNV-1a
// hash of the stream name, and the stream index.

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline uint64_t fnv1a(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<uint8_t>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

inline uint64_t substream_seed(uint64_t master, std::string_view name, uint64_t index = 0) {
  uint64_t h = splitmix64(master ^ fnv1a(name));
  return splitmix64(h ^ splitmix64(index));
}

inline std::mt19937_64 make_rng(uint64_t master, std::string_view name, uint64_t index = 0) {
  return std::mt19937_64(substream_seed(master, name, index));
}

// 16-bit per-layer mask key from the key substream.
inline uint16_t derive_key16(uint64_t key_seed, size_t layer) {
  return static_cast<uint16_t>(substream_seed(key_seed, "mask-key", layer) & 0xffffu);
}

}  // namespace radar
