#pragma once
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "radar/codec.hpp"
#include "radar/dataset.hpp"
#include "radar/int8.hpp"
#include "radar/model.hpp"

namespace radar {

struct BitFlip {
  size_t layer = 0;
  size_t flat_index = 0;
  int bit = 7;
  FlipDirection direction = FlipDirection::ZeroToOne;
  int8_t pre_flip_weight = 0;
  double loss_after = std::numeric_limits<double>::quiet_NaN();
  bool companion = false;  // paired attack: the cancelling half of a pair

  FlipLocation location() const { return {layer, flat_index, bit}; }
};

struct AttackProfile {
  std::string kind;  // "pbfa", "restricted-pbfa", "random", "paired"
  uint64_t seed = 0;
  size_t requested = 0;
  double loss_before = std::numeric_limits<double>::quiet_NaN();
  double loss_after = std::numeric_limits<double>::quiet_NaN();
  bool halted_early = false;
  size_t unpaired = 0;  // paired attack: primaries left without a companion
  std::vector<BitFlip> flips;

  std::vector<FlipLocation> locations() const {
    std::vector<FlipLocation> out;
    out.reserve(flips.size());
    for (const auto& f : flips) out.push_back(f.location());
    return out;
  }
};

// Re-applies a profile's flips by toggling; applying twice restores the
// original weights since every (layer, index, bit) appears at most once.
inline void apply_profile(QuantizedModel& model, const AttackProfile& profile) {
  for (const auto& f : profile.flips) flip_bit(model, f.layer, f.flat_index, f.bit);
}
inline void revert_profile(QuantizedModel& model, const AttackProfile& profile) {
  apply_profile(model, profile);
}

namespace detail {

using FlipKey = std::tuple<size_t, size_t, int>;

struct Candidate {
  size_t layer;
  size_t index;
  int bit;
  double score;
};

// Top-k per layer by |dL/dw_int * delta_int| where dL/dw_int is the real
// gradient scaled into the integer domain. Deterministic order on ties.
inline std::vector<Candidate> rank_candidates(const QuantizedModel& model, const LossGrad& lg,
                                              size_t k, const std::vector<int>& allowed_bits,
                                              const std::set<FlipKey>& flipped) {
  std::vector<Candidate> all;
  std::vector<Candidate> layer_cands;
  for (size_t l = 0; l < model.num_layers(); ++l) {
    const auto& w = model.layers[l].weights;
    const auto& grads = lg.weight_grads[l];
    layer_cands.clear();
    for (size_t i = 0; i < w.size(); ++i) {
      const double gint = grads[i] * w.scale;
      for (int b : allowed_bits) {
        if (flipped.count({l, i, b})) continue;
        layer_cands.push_back({l, i, b, std::abs(gint * bit_flip_delta(w.values[i], b))});
      }
    }
    const size_t take = std::min(k, layer_cands.size());
    std::partial_sort(layer_cands.begin(), layer_cands.begin() + take, layer_cands.end(),
                      [](const Candidate& a, const Candidate& b) {
                        if (a.score != b.score) return a.score > b.score;
                        if (a.index != b.index) return a.index < b.index;
                        return a.bit < b.bit;
                      });
    all.insert(all.end(), layer_cands.begin(), layer_cands.begin() + take);
  }
  return all;
}

inline BitFlip commit_flip(QuantizedModel& model, size_t layer, size_t index, int bit,
                           double loss_after, bool companion = false) {
  BitFlip f;
  f.layer = layer;
  f.flat_index = index;
  f.bit = bit;
  f.pre_flip_weight = model.layers[layer].weights.values[index];
  f.direction = flip_bit(model, layer, index, bit);
  f.loss_after = loss_after;
  f.companion = companion;
  return f;
}

}  // namespace detail

struct PbfaOptions {
  size_t n_bf = 10;   // flips to inject
  size_t k = 10;      // ranked candidates per layer per iteration
  std::vector<int> allowed_bits = {0, 1, 2, 3, 4, 5, 6, 7};
};

// Progressive bit-flip attack. Each iteration ranks candidate flips by
// first-order loss impact, evaluates the shortlist exactly on the batch,
// and commits the flip that raises the loss most (ties resolved toward the
// lowest layer, index, bit). Stops early once no candidate improves on the
// current loss. The model is mutated in place; flips persist.
inline AttackProfile pbfa(QuantizedModel& model, const Dataset& batch, const PbfaOptions& opt) {
  model.check();
  batch.check();
  if (opt.k < 1) throw std::invalid_argument("pbfa: k must be >= 1");
  if (opt.allowed_bits.empty()) throw std::invalid_argument("pbfa: allowed_bits is empty");
  for (int b : opt.allowed_bits)
    if (b < 0 || b >= kWeightBits) throw std::invalid_argument("pbfa: bit out of range");

  AttackProfile profile;
  profile.kind = opt.allowed_bits.size() == static_cast<size_t>(kWeightBits) ? "pbfa"
                                                                             : "restricted-pbfa";
  profile.requested = opt.n_bf;
  profile.loss_before = loss(model, batch);

  std::set<detail::FlipKey> flipped;
  double current = profile.loss_before;
  for (size_t round = 0; round < opt.n_bf; ++round) {
    const LossGrad lg = loss_and_grad(model, batch);
    auto cands = detail::rank_candidates(model, lg, opt.k, opt.allowed_bits, flipped);
    if (cands.empty()) {
      profile.halted_early = true;
      break;
    }
    std::sort(cands.begin(), cands.end(), [](const detail::Candidate& a, const detail::Candidate& b) {
      return std::tie(a.layer, a.index, a.bit) < std::tie(b.layer, b.index, b.bit);
    });
    double best_loss = -std::numeric_limits<double>::infinity();
    size_t best = 0;
    for (size_t c = 0; c < cands.size(); ++c) {
      flip_bit(model, cands[c].layer, cands[c].index, cands[c].bit);
      const double after = loss(model, batch);
      flip_bit(model, cands[c].layer, cands[c].index, cands[c].bit);
      if (after > best_loss) {
        best_loss = after;
        best = c;
      }
    }
    if (best_loss < current) {
      profile.halted_early = true;
      break;
    }
    const auto& c = cands[best];
    profile.flips.push_back(detail::commit_flip(model, c.layer, c.index, c.bit, best_loss));
    flipped.insert({c.layer, c.index, c.bit});
    current = best_loss;
  }
  profile.loss_after = current;
  return profile;
}

inline AttackProfile restricted_pbfa(QuantizedModel& model, const Dataset& batch, size_t n_bf,
                                     const std::vector<int>& allowed_bits, size_t k = 10) {
  PbfaOptions opt;
  opt.n_bf = n_bf;
  opt.k = k;
  opt.allowed_bits = allowed_bits;
  return pbfa(model, batch, opt);
}

// n distinct uniform (layer, index, bit) flips over the whole weight
// address space. No loss tracking; callers measure accuracy directly.
inline AttackProfile random_attack(QuantizedModel& model, size_t n, uint64_t seed) {
  model.check();
  const size_t total_addresses = model.total_weights() * static_cast<size_t>(kWeightBits);
  if (n > total_addresses) throw std::invalid_argument("random_attack: more flips than addresses");

  AttackProfile profile;
  profile.kind = "random";
  profile.seed = seed;
  profile.requested = n;

  auto rng = make_rng(seed, "random-attack");
  std::uniform_int_distribution<size_t> dist(0, total_addresses - 1);
  std::set<size_t> used;
  while (profile.flips.size() < n) {
    const size_t addr = dist(rng);
    if (!used.insert(addr).second) continue;
    size_t rest = addr / kWeightBits;
    const int bit = static_cast<int>(addr % kWeightBits);
    size_t layer = 0;
    while (rest >= model.layer_size(layer)) {
      rest -= model.layer_size(layer);
      ++layer;
    }
    profile.flips.push_back(detail::commit_flip(model, layer, rest, bit,
                                                std::numeric_limits<double>::quiet_NaN()));
  }
  return profile;
}

struct PairedOptions {
  size_t n_pairs = 10;
  size_t k = 10;
  uint32_t assumed_group_size = 8;  // attacker's guess at the checksum grouping
};

// Checksum-aware attacker: assumes grouping is contiguous in memory with a
// known group size and no masking. Every gradient-ranked MSB flip gets a
// companion MSB flip of the opposite sign inside the same assumed group so
// the plain (unmasked, uninterleaved) group sum is preserved. The companion
// is the eligible weight with the smallest |gradient|, sacrificing as
// little loss as possible; a primary with no eligible companion is counted
// in `unpaired`.
inline AttackProfile paired_attack(QuantizedModel& model, const Dataset& batch,
                                   const PairedOptions& opt) {
  model.check();
  batch.check();
  if (opt.n_pairs < 1) throw std::invalid_argument("paired_attack: n_pairs must be >= 1");
  if (opt.assumed_group_size < 2)
    throw std::invalid_argument("paired_attack: assumed_group_size must be >= 2");

  AttackProfile profile;
  profile.kind = "paired";
  profile.requested = opt.n_pairs;
  profile.loss_before = loss(model, batch);

  const std::vector<int> msb_only = {kMsb};
  std::set<detail::FlipKey> flipped;
  double current = profile.loss_before;
  for (size_t round = 0; round < opt.n_pairs; ++round) {
    const LossGrad lg = loss_and_grad(model, batch);
    auto cands = detail::rank_candidates(model, lg, opt.k, msb_only, flipped);
    if (cands.empty()) {
      profile.halted_early = true;
      break;
    }
    std::sort(cands.begin(), cands.end(), [](const detail::Candidate& a, const detail::Candidate& b) {
      return std::tie(a.layer, a.index, a.bit) < std::tie(b.layer, b.index, b.bit);
    });
    double best_loss = -std::numeric_limits<double>::infinity();
    size_t best = 0;
    for (size_t c = 0; c < cands.size(); ++c) {
      flip_bit(model, cands[c].layer, cands[c].index, cands[c].bit);
      const double after = loss(model, batch);
      flip_bit(model, cands[c].layer, cands[c].index, cands[c].bit);
      if (after > best_loss) {
        best_loss = after;
        best = c;
      }
    }
    if (best_loss < current) {
      profile.halted_early = true;
      break;
    }
    const auto& c = cands[best];
    const auto& weights = model.layers[c.layer].weights.values;
    // Opposite MSB state means the companion's toggle moves the plain sum
    // by -delta of the primary's toggle.
    const bool primary_msb = get_bit(weights[c.index], kMsb);
    const size_t group_begin = (c.index / opt.assumed_group_size) * opt.assumed_group_size;
    const size_t group_end = std::min(group_begin + opt.assumed_group_size, weights.size());
    size_t companion = weights.size();
    double companion_grad = std::numeric_limits<double>::infinity();
    for (size_t i = group_begin; i < group_end; ++i) {
      if (i == c.index) continue;
      if (get_bit(weights[i], kMsb) == primary_msb) continue;
      if (flipped.count({c.layer, i, kMsb})) continue;
      const double g = std::abs(lg.weight_grads[c.layer][i]);
      if (g < companion_grad) {
        companion_grad = g;
        companion = i;
      }
    }
    profile.flips.push_back(detail::commit_flip(model, c.layer, c.index, c.bit, best_loss));
    flipped.insert({c.layer, c.index, c.bit});
    if (companion < weights.size()) {
      auto f = detail::commit_flip(model, c.layer, companion, kMsb,
                                   std::numeric_limits<double>::quiet_NaN(), true);
      f.loss_after = loss(model, batch);
      profile.flips.push_back(f);
      flipped.insert({c.layer, companion, kMsb});
      current = f.loss_after;
    } else {
      ++profile.unpaired;
      current = best_loss;
    }
  }
  profile.loss_after = current;
  return profile;
}

// ---------------------------------------------------------------------------
// Profile statistics
// ---------------------------------------------------------------------------

struct AttackStats {
  std::array<size_t, 8> bit_counts{};    // flips per bit position
  std::array<size_t, 2> dir_counts{};    // indexed by FlipDirection
  std::array<size_t, 4> weight_bins{};   // pre-flip weight in [-128,-32), [-32,0), [0,32), [32,128)
  size_t total = 0;

  size_t msb_count() const { return bit_counts[kMsb]; }
  double msb_fraction() const { return total ? static_cast<double>(msb_count()) / total : 0.0; }
  double mid_weight_fraction() const {
    return total ? static_cast<double>(weight_bins[1] + weight_bins[2]) / total : 0.0;
  }
};

inline AttackStats profile_stats(const AttackProfile& profile) {
  AttackStats s;
  s.total = profile.flips.size();
  for (const auto& f : profile.flips) {
    s.bit_counts[f.bit] += 1;
    s.dir_counts[static_cast<size_t>(f.direction)] += 1;
    const int w = f.pre_flip_weight;
    const size_t bin = w < -32 ? 0 : w < 0 ? 1 : w < 32 ? 2 : 3;
    s.weight_bins[bin] += 1;
  }
  return s;
}

// Whether any checksum group holds two or more of the profile's flips,
// under the grouping induced by `cfg` (set cfg.interleave = false for the
// contiguous baseline). Multiple distinct flips landing in one group can
// cancel in the group's sum, so this per-profile indicator — averaged over
// profiles — is the quantity interleaving is meant to suppress.
inline bool profile_has_collision(const std::vector<FlipLocation>& flips,
                               const std::vector<size_t>& layer_sizes,
                               const LayerProtection& cfg) {
  std::vector<std::vector<uint32_t>> inverse(layer_sizes.size());
  std::map<std::pair<size_t, uint32_t>, size_t> group_counts;
  for (const auto& f : flips) {
    if (f.layer >= layer_sizes.size()) throw std::out_of_range("profile_has_collision: layer");
    auto& inv = inverse[f.layer];
    if (inv.empty()) inv = invert_permutation(interleave_indices(layer_sizes[f.layer], cfg));
    const uint32_t group = inv[f.flat_index] / cfg.group_size;
    if (++group_counts[{f.layer, group}] >= 2) return true;
  }
  return false;
}

}  // namespace radar
