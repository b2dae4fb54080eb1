// The signing pipeline on a 12-weight layer, small enough to follow by
// hand: interleave order, masked group sums, signature bits, and what a
// single MSB flip does to them.

#include <iomanip>
#include <iostream>

#include "radar/radar.hpp"

int main() {
  using namespace radar;

  std::vector<int8_t> weights = {10, -3, 47, 0, -128, 5, 66, -20, 8, 1, -90, 33};
  LayerProtection cfg;
  cfg.group_size = 4;
  cfg.stride = 4;
  cfg.offset = 3;
  cfg.key = 0x5555;  // alternating: negate elements 0, 2 of each group

  const auto perm = interleave_indices(weights.size(), cfg);
  std::cout << "stream order (stream pos -> original index):\n  ";
  for (size_t p = 0; p < perm.size(); ++p) std::cout << perm[p] << " ";
  std::cout << "\n";

  const auto sigs = sign_layer(weights, cfg);
  for (size_t j = 0; j < sigs.size(); ++j) {
    int64_t m = 0;
    std::cout << "group " << j << ": ";
    for (size_t t = 0; t < cfg.group_size; ++t) {
      const uint32_t orig = perm[j * cfg.group_size + t];
      const int v = orig < weights.size() ? weights[orig] : 0;
      const int masked = mask_sign(cfg.key, t) * v;
      m += masked;
      std::cout << std::setw(5) << masked;
    }
    std::cout << "  sum " << std::setw(5) << m << "  signature S_A=" << sigs[j].s_a()
              << " S_B=" << sigs[j].s_b() << "\n";
  }

  const size_t victim = 4;  // already -128; MSB flip takes it to 0
  weights[victim] = toggle_bit(weights[victim], kMsb);
  std::cout << "\nafter MSB flip at index " << victim << ":\n";
  const auto after = sign_layer(weights, cfg);
  for (size_t j = 0; j < after.size(); ++j)
    std::cout << "group " << j << ": signature "
              << (after[j] == sigs[j] ? "unchanged" : "CHANGED -> flagged") << "\n";
  return 0;
}
