#pragma once
#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "radar/int8.hpp"
#include "radar/model.hpp"
#include "radar/rng.hpp"

namespace radar {

// ---------------------------------------------------------------------------
// Protection parameters
// ---------------------------------------------------------------------------

// Per-layer protection parameters. `stride` 0 means "use the group size",
// the usual choice. The 16-bit key drives the mask; it is secret per layer.
struct LayerProtection {
  uint32_t group_size = 8;   // G: weights per checksum group
  uint32_t stride = 0;       // N_W: original distance between group neighbours
  uint32_t offset = 3;       // circular shift of the index map
  uint16_t key = 0;
  int signature_width = 2;   // 2 or 3 bits per group
  bool interleave = true;

  uint32_t effective_stride() const { return stride == 0 ? group_size : stride; }

  void check() const {
    if (group_size < 1) throw std::invalid_argument("LayerProtection: group_size must be >= 1");
    if (signature_width != 2 && signature_width != 3)
      throw std::invalid_argument("LayerProtection: signature_width must be 2 or 3");
  }
};

// Scheme-level configuration: global parameters plus a key seed from which
// each layer's 16-bit key is derived, so a store is reproducible from
// (seed, config) alone.
struct ProtectionConfig {
  uint32_t group_size = 8;
  uint32_t stride = 0;
  uint32_t offset = 3;
  int signature_width = 2;
  bool interleave = true;
  uint64_t key_seed = 0x52414441u;  // any fixed default; override per run

  LayerProtection for_layer(size_t layer) const {
    LayerProtection p;
    p.group_size = group_size;
    p.stride = stride;
    p.offset = offset;
    p.key = derive_key16(key_seed, layer);
    p.signature_width = signature_width;
    p.interleave = interleave;
    p.check();
    return p;
  }
};

// ---------------------------------------------------------------------------
// Signature
// ---------------------------------------------------------------------------

// Group signature: the top `width` bits of the checksum's 9-bit window,
// i.e. bits [9-width, 9) of M in two's complement. For width 2 that is
// S_A = bit 8, S_B = bit 7; width 3 appends S_C = bit 6. Equivalent to the
// floor/modulo form S_A = floor(M/256) % 2, S_B = floor(M/128) % 2 (and
// S_C = floor(M/64) % 2) with mathematical floor and non-negative modulus.
struct Signature {
  uint8_t value = 0;  // S_A in the high bit, S_B next, then S_C if present
  uint8_t width = 2;

  int s_a() const { return (value >> (width - 1)) & 1; }
  int s_b() const { return (value >> (width - 2)) & 1; }
  int s_c() const { return width == 3 ? (value & 1) : 0; }

  bool operator==(const Signature&) const = default;
};

inline Signature make_signature(int64_t checksum, int width) {
  Signature s;
  s.width = static_cast<uint8_t>(width);
  s.value = static_cast<uint8_t>((static_cast<uint64_t>(checksum) >> (9 - width)) &
                                 ((1u << width) - 1u));
  return s;
}

// ---------------------------------------------------------------------------
// Interleaving
// ---------------------------------------------------------------------------

// Padded layer length: smallest multiple of lcm(G, N_W) that covers the
// layer, so the stream both tiles into groups of G and keeps N = L/N_W
// integral. Positions past the real layer are zero-valued pad slots.
inline size_t padded_size(size_t layer_size, const LayerProtection& cfg) {
  const size_t unit = std::lcm<size_t>(cfg.group_size, cfg.effective_stride());
  return ((layer_size + unit - 1) / unit) * unit;
}

// Permutation mapping interleaved stream position p to the original index
// (k + N_W*l + offset) mod L_padded, where k = p div N, l = p mod N and
// N = L_padded / N_W. Consecutive stream positions are therefore N_W apart
// in the original layout, which is what scatters spatially clustered flips
// across groups. Identity (plus padding) when interleaving is off.
inline std::vector<uint32_t> interleave_indices(size_t layer_size, const LayerProtection& cfg) {
  cfg.check();
  const size_t padded = padded_size(layer_size, cfg);
  std::vector<uint32_t> perm(padded);
  if (!cfg.interleave) {
    std::iota(perm.begin(), perm.end(), uint32_t{0});
    return perm;
  }
  const uint64_t stride = cfg.effective_stride();
  const uint64_t n = padded / stride;
  for (uint64_t p = 0; p < padded; ++p) {
    const uint64_t k = p / n;
    const uint64_t l = p % n;
    perm[p] = static_cast<uint32_t>((k + stride * l + cfg.offset) % padded);
  }
  return perm;
}

// Stream position of an original index under the layer's permutation.
inline std::vector<uint32_t> invert_permutation(const std::vector<uint32_t>& perm) {
  std::vector<uint32_t> inv(perm.size());
  for (uint32_t p = 0; p < perm.size(); ++p) inv[perm[p]] = p;
  return inv;
}

// ---------------------------------------------------------------------------
// Masking and checksum
// ---------------------------------------------------------------------------

// The key is consumed most significant bit first: element t of a group is
// kept when key bit (15 - t mod 16) is 1 and negated (two's complement)
// when it is 0. The stream restarts at the top bit for every group, so
// groups verify independently.
inline int mask_sign(uint16_t key, size_t t) {
  return ((key >> (15 - (t & 15))) & 1u) ? 1 : -1;
}

// Conditional negation under the key, in widened arithmetic: -(-128) is
// +128 here, not the 8-bit wraparound.
inline std::vector<int> mask_group(const std::vector<int8_t>& group, uint16_t key) {
  std::vector<int> out(group.size());
  for (size_t t = 0; t < group.size(); ++t)
    out[t] = mask_sign(key, t) * static_cast<int>(group[t]);
  return out;
}

// Exact integer sum of a masked group. |M| <= 128*G, far inside int64.
inline int64_t checksum(const std::vector<int>& masked) {
  int64_t m = 0;
  for (int v : masked) m += v;
  return m;
}

// ---------------------------------------------------------------------------
// Layer signing
// ---------------------------------------------------------------------------

// interleave -> chunk into groups of G -> mask -> sum -> binarize.
// `perm` must come from interleave_indices for the same (layer_size, cfg);
// `out` is overwritten. Weights beyond layer_size are pad zeros.
inline void sign_layer_into(const int8_t* weights, size_t layer_size, const LayerProtection& cfg,
                            const std::vector<uint32_t>& perm, std::vector<Signature>& out) {
  const size_t padded = perm.size();
  const size_t groups = padded / cfg.group_size;
  out.resize(groups);
  size_t p = 0;
  for (size_t j = 0; j < groups; ++j) {
    int64_t m = 0;
    for (size_t t = 0; t < cfg.group_size; ++t, ++p) {
      const uint32_t orig = perm[p];
      const int v = orig < layer_size ? static_cast<int>(weights[orig]) : 0;
      m += mask_sign(cfg.key, t) * v;
    }
    out[j] = make_signature(m, cfg.signature_width);
  }
}

inline std::vector<Signature> sign_layer(const int8_t* weights, size_t layer_size,
                                         const LayerProtection& cfg) {
  const auto perm = interleave_indices(layer_size, cfg);
  std::vector<Signature> out;
  sign_layer_into(weights, layer_size, cfg, perm, out);
  return out;
}

inline std::vector<Signature> sign_layer(const std::vector<int8_t>& weights,
                                         const LayerProtection& cfg) {
  return sign_layer(weights.data(), weights.size(), cfg);
}

// ---------------------------------------------------------------------------
// Golden store, detection, recovery
// ---------------------------------------------------------------------------

struct LayerSignatures {
  LayerProtection cfg;
  uint32_t layer_size = 0;
  std::vector<Signature> sigs;
};

// Trusted per-group signatures computed on clean weights; models the secure
// on-chip store. Immutable once built.
struct GoldenSignatureStore {
  uint64_t key_seed = 0;
  std::vector<LayerSignatures> layers;

  size_t total_bits() const {
    size_t bits = 0;
    for (const auto& l : layers) bits += l.sigs.size() * l.cfg.signature_width;
    return bits;
  }
  double total_kb() const { return static_cast<double>(total_bits()) / 8.0 / 1024.0; }
};

inline GoldenSignatureStore protect(const QuantizedModel& model, const ProtectionConfig& config) {
  model.check();
  GoldenSignatureStore store;
  store.key_seed = config.key_seed;
  for (size_t l = 0; l < model.num_layers(); ++l) {
    LayerSignatures ls;
    ls.cfg = config.for_layer(l);
    ls.layer_size = static_cast<uint32_t>(model.layer_size(l));
    ls.sigs = sign_layer(model.layers[l].weights.values, ls.cfg);
    store.layers.push_back(std::move(ls));
  }
  return store;
}

struct FlipLocation {
  size_t layer = 0;
  size_t flat_index = 0;
  int bit = 7;
};

struct FlipAttribution {
  FlipLocation flip;
  uint32_t group = 0;
  bool detected = false;
};

struct DetectionReport {
  std::vector<std::vector<uint32_t>> flagged;  // per layer, ascending group ids
  std::vector<FlipAttribution> attributions;   // filled when ground truth is supplied
  size_t injected_count = 0;
  size_t detected_count = 0;

  size_t flagged_group_count() const {
    size_t n = 0;
    for (const auto& f : flagged) n += f.size();
    return n;
  }
  bool any_flagged() const { return flagged_group_count() > 0; }
};

inline void check_store_matches(const QuantizedModel& model, const GoldenSignatureStore& store) {
  if (store.layers.size() != model.num_layers())
    throw std::invalid_argument("store/model mismatch: layer count " +
                                std::to_string(store.layers.size()) + " vs " +
                                std::to_string(model.num_layers()));
  for (size_t l = 0; l < store.layers.size(); ++l)
    if (store.layers[l].layer_size != model.layer_size(l))
      throw std::invalid_argument("store/model mismatch: layer " + std::to_string(l) + " size " +
                                  std::to_string(store.layers[l].layer_size) + " vs " +
                                  std::to_string(model.layer_size(l)));
}

// Recompute signatures on the current weights and flag every group whose
// signature differs from the golden one. A ground-truth flip is attributed
// detected iff its (post-interleave) group is flagged.
inline DetectionReport detect(const QuantizedModel& model, const GoldenSignatureStore& store,
                              const std::vector<FlipLocation>* ground_truth = nullptr) {
  check_store_matches(model, store);
  DetectionReport report;
  report.flagged.resize(store.layers.size());
  std::vector<Signature> fresh;
  std::vector<std::vector<uint32_t>> perms(store.layers.size());
  for (size_t l = 0; l < store.layers.size(); ++l) {
    const LayerSignatures& gold = store.layers[l];
    perms[l] = interleave_indices(gold.layer_size, gold.cfg);
    sign_layer_into(model.layers[l].weights.values.data(), gold.layer_size, gold.cfg, perms[l],
                    fresh);
    if (fresh.size() != gold.sigs.size())
      throw std::invalid_argument("store/model mismatch: group count in layer " + std::to_string(l));
    for (uint32_t j = 0; j < fresh.size(); ++j)
      if (!(fresh[j] == gold.sigs[j])) report.flagged[l].push_back(j);
  }
  if (ground_truth) {
    report.injected_count = ground_truth->size();
    std::vector<std::vector<uint32_t>> inverse(store.layers.size());
    for (const FlipLocation& f : *ground_truth) {
      if (f.layer >= store.layers.size())
        throw std::out_of_range("detect: ground-truth flip layer out of range");
      if (inverse[f.layer].empty()) inverse[f.layer] = invert_permutation(perms[f.layer]);
      const uint32_t group = inverse[f.layer][f.flat_index] / store.layers[f.layer].cfg.group_size;
      const auto& flags = report.flagged[f.layer];
      const bool hit = std::binary_search(flags.begin(), flags.end(), group);
      report.attributions.push_back({f, group, hit});
      if (hit) ++report.detected_count;
    }
  }
  return report;
}

// Zero every weight of every flagged group, locating members through the
// layer's permutation (the de-interleaving step). Pad slots are ignored and
// unflagged weights are untouched.
inline void recover(QuantizedModel& model, const DetectionReport& report,
                    const GoldenSignatureStore& store) {
  check_store_matches(model, store);
  if (report.flagged.size() != store.layers.size())
    throw std::invalid_argument("recover: report/store layer count mismatch");
  for (size_t l = 0; l < store.layers.size(); ++l) {
    if (report.flagged[l].empty()) continue;
    const LayerSignatures& gold = store.layers[l];
    const auto perm = interleave_indices(gold.layer_size, gold.cfg);
    auto& weights = model.layers[l].weights.values;
    for (uint32_t j : report.flagged[l]) {
      for (size_t t = 0; t < gold.cfg.group_size; ++t) {
        const uint32_t orig = perm[static_cast<size_t>(j) * gold.cfg.group_size + t];
        if (orig < weights.size()) weights[orig] = 0;
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Storage accounting
// ---------------------------------------------------------------------------

// ceil(L/G) * width bits per layer, the padding rule for stride = G.
inline size_t storage_overhead_bits(const std::vector<size_t>& layer_sizes, size_t group_size,
                                    int signature_width) {
  size_t bits = 0;
  for (size_t n : layer_sizes) bits += ((n + group_size - 1) / group_size) * signature_width;
  return bits;
}

inline double bits_to_kb(size_t bits) { return static_cast<double>(bits) / 8.0 / 1024.0; }

}  // namespace radar
