#pragma once
#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "radar/model.hpp"

namespace radar {

// ---------------------------------------------------------------------------
// Generic CRC
// ---------------------------------------------------------------------------

struct CrcSpec {
  std::string name;
  int width = 8;          // 1..64
  uint64_t poly = 0;      // normal form, implicit top bit excluded
  uint64_t init = 0;
  bool refin = false;
  bool refout = false;
  uint64_t xorout = 0;

  uint64_t mask() const { return width == 64 ? ~uint64_t{0} : ((uint64_t{1} << width) - 1); }
};

// Catalog entries used as correctness anchors ("123456789" check values)
// plus the primitive 13-bit polynomial x^13+x^4+x^3+x+1 whose cycle length
// 8191 guarantees distinct single-bit syndromes out to 8191-bit blocks.
inline CrcSpec crc7_mmc() { return {"crc7-mmc", 7, 0x09, 0, false, false, 0}; }
inline CrcSpec crc10_atm() { return {"crc10-atm", 10, 0x233, 0, false, false, 0}; }
inline CrcSpec crc13_bbc() { return {"crc13-bbc", 13, 0x1CF5, 0, false, false, 0}; }
inline CrcSpec crc13_primitive() { return {"crc13-prim", 13, 0x001B, 0, false, false, 0}; }

inline uint64_t reflect_bits(uint64_t v, int width) {
  uint64_t r = 0;
  for (int i = 0; i < width; ++i)
    if ((v >> i) & 1) r |= uint64_t{1} << (width - 1 - i);
  return r;
}

// Bit-serial CRC, MSB-first through each byte. Slow but exact for any
// width; group sizes here are tiny so speed is irrelevant.
inline uint64_t crc_compute(const CrcSpec& spec, const uint8_t* data, size_t len) {
  if (spec.width < 1 || spec.width > 64) throw std::invalid_argument("crc: bad width");
  const uint64_t top = uint64_t{1} << (spec.width - 1);
  const uint64_t mask = spec.mask();
  uint64_t reg = spec.init & mask;
  for (size_t i = 0; i < len; ++i) {
    uint8_t byte = data[i];
    if (spec.refin) byte = static_cast<uint8_t>(reflect_bits(byte, 8));
    for (int b = 7; b >= 0; --b) {
      const bool in = (byte >> b) & 1;
      const bool carry = reg & top;
      reg = (reg << 1) & mask;
      if (carry != in) reg ^= spec.poly;
    }
  }
  if (spec.refout) reg = reflect_bits(reg, spec.width);
  return (reg ^ spec.xorout) & mask;
}

inline uint64_t crc_compute(const CrcSpec& spec, const std::vector<uint8_t>& data) {
  return crc_compute(spec, data.data(), data.size());
}

inline uint64_t crc_of_string(const CrcSpec& spec, std::string_view s) {
  return crc_compute(spec, reinterpret_cast<const uint8_t*>(s.data()), s.size());
}

// ---------------------------------------------------------------------------
// Parity-bit accounting for Hamming-style codes
// ---------------------------------------------------------------------------

// Parity bits to protect an n-bit block with single-error correction:
// smallest r with 2^r >= n + r + 1.
inline int secded_overhead(size_t n_bits) {
  if (n_bits == 0) throw std::invalid_argument("secded_overhead: empty block");
  int r = 1;
  while ((uint64_t{1} << r) < n_bits + static_cast<size_t>(r) + 1) ++r;
  return r;
}

// ---------------------------------------------------------------------------
// CRC golden store over contiguous weight groups
// ---------------------------------------------------------------------------

struct CrcStore {
  CrcSpec spec;
  uint32_t group_size = 8;
  std::vector<std::vector<uint64_t>> layer_crcs;

  size_t total_groups() const {
    size_t n = 0;
    for (const auto& l : layer_crcs) n += l.size();
    return n;
  }
  size_t total_bits() const { return total_groups() * static_cast<size_t>(spec.width); }
};

// Baseline protector: CRC per contiguous run of `group_size` weights (the
// final run of a layer may be shorter). No masking, no interleaving.
inline CrcStore protect_with_crc(const QuantizedModel& model, uint32_t group_size,
                                 const CrcSpec& spec) {
  if (group_size < 1) throw std::invalid_argument("protect_with_crc: group_size must be >= 1");
  CrcStore store;
  store.spec = spec;
  store.group_size = group_size;
  for (const auto& layer : model.layers) {
    const auto& w = layer.weights.values;
    const auto* bytes = reinterpret_cast<const uint8_t*>(w.data());
    std::vector<uint64_t> crcs;
    for (size_t start = 0; start < w.size(); start += group_size)
      crcs.push_back(crc_compute(spec, bytes + start, std::min<size_t>(group_size, w.size() - start)));
    store.layer_crcs.push_back(std::move(crcs));
  }
  return store;
}

inline std::vector<std::vector<uint32_t>> detect_with_crc(const QuantizedModel& model,
                                                          const CrcStore& store) {
  if (store.layer_crcs.size() != model.num_layers())
    throw std::invalid_argument("detect_with_crc: store/model layer count mismatch");
  std::vector<std::vector<uint32_t>> flagged(model.num_layers());
  for (size_t l = 0; l < model.num_layers(); ++l) {
    const auto& w = model.layers[l].weights.values;
    const auto* bytes = reinterpret_cast<const uint8_t*>(w.data());
    const auto& gold = store.layer_crcs[l];
    const size_t groups = (w.size() + store.group_size - 1) / store.group_size;
    if (groups != gold.size())
      throw std::invalid_argument("detect_with_crc: group count mismatch in layer " +
                                  std::to_string(l));
    for (size_t j = 0; j < groups; ++j) {
      const size_t start = j * store.group_size;
      const uint64_t crc =
          crc_compute(store.spec, bytes + start, std::min<size_t>(store.group_size, w.size() - start));
      if (crc != gold[j]) flagged[l].push_back(static_cast<uint32_t>(j));
    }
  }
  return flagged;
}

// ---------------------------------------------------------------------------
// Storage comparison
// ---------------------------------------------------------------------------

struct CodeStorage {
  size_t groups = 0;
  size_t signature_bits = 0;  // masked-checksum signatures
  size_t crc_bits = 0;
  double signature_kb = 0.0;
  double crc_kb = 0.0;
};

inline CodeStorage code_storage_compare(const std::vector<size_t>& layer_sizes, size_t group_size,
                                        int signature_width, int crc_width) {
  CodeStorage out;
  for (size_t n : layer_sizes) out.groups += (n + group_size - 1) / group_size;
  out.signature_bits = out.groups * static_cast<size_t>(signature_width);
  out.crc_bits = out.groups * static_cast<size_t>(crc_width);
  out.signature_kb = static_cast<double>(out.signature_bits) / 8.0 / 1024.0;
  out.crc_kb = static_cast<double>(out.crc_bits) / 8.0 / 1024.0;
  return out;
}

}  // namespace radar
