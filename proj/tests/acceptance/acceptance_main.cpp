// Acceptance gate for the integrity lab. Twelve go/no-go checks, one
// [PASS]/[FAIL] line each; the exit status is the number of failures.
// Thresholds are fixed here on purpose — loosening them is a design change,
// not a test fix.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "radar/radar.hpp"

namespace {

using namespace radar;

int failures = 0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v, int prec = 3) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(prec) << v;
  return ss.str();
}

std::string sci(double v) {
  std::ostringstream ss;
  ss << std::scientific << std::setprecision(2) << v;
  return ss.str();
}

template <typename Fn>
void run(int id, const std::string& label, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << (o.pass ? "[PASS]" : "[FAIL]") << " criterion " << id << ": " << label << " — "
            << o.detail << " [" << num(secs, 1) << "s]" << std::endl;
  if (!o.pass) ++failures;
}

// ---------------------------------------------------------------------------
// 1. Signature window vs floor/modulo arithmetic, exhaustive
// ---------------------------------------------------------------------------

Outcome signature_equivalence() {
  auto floor_div = [](int64_t a, int64_t b) {
    int64_t q = a / b;
    if (a % b != 0 && (a < 0) != (b < 0)) --q;
    return q;
  };
  auto floor_bit = [&](int64_t m, int64_t place) {
    const int64_t r = floor_div(m, place) % 2;
    return static_cast<int>(r < 0 ? r + 2 : r);
  };
  const int64_t lim = int64_t{1} << 20;
  size_t checked = 0;
  for (int64_t m = -lim; m <= lim; ++m) {
    const int s_a = floor_bit(m, 256), s_b = floor_bit(m, 128), s_c = floor_bit(m, 64);
    const Signature w2 = make_signature(m, 2);
    const Signature w3 = make_signature(m, 3);
    if (w2.s_a() != s_a || w2.s_b() != s_b || w3.s_a() != s_a || w3.s_b() != s_b ||
        w3.s_c() != s_c)
      return {false, "bit-window extraction disagrees with floor/mod at M=" + std::to_string(m)};
    ++checked;
  }
  return {true, std::to_string(checked) + " checksum values, widths 2 and 3, exact"};
}

// ---------------------------------------------------------------------------
// 2. Every single sign-bit flip is caught, all configs
// ---------------------------------------------------------------------------

Outcome single_flip_guarantee() {
  auto rng = make_rng(2024, "single-flip-weights");
  std::uniform_int_distribution<int> dist(-128, 127);
  std::vector<int8_t> weights(512);
  for (auto& w : weights) w = static_cast<int8_t>(dist(rng));

  size_t cases = 0;
  for (uint32_t g : {8u, 16u, 32u, 64u})
    for (bool interleave : {false, true}) {
      LayerProtection cfg;
      cfg.group_size = g;
      cfg.interleave = interleave;
      cfg.key = derive_key16(2024, g * 2 + interleave);
      const auto base = sign_layer(weights, cfg);
      for (size_t i = 0; i < weights.size(); ++i) {
        auto flipped = weights;
        flipped[i] = toggle_bit(flipped[i], kMsb);
        if (sign_layer(flipped, cfg) == base)
          return {false, "missed sign-bit flip at index " + std::to_string(i) +
                             " (G=" + std::to_string(g) +
                             ", interleave=" + std::to_string(interleave) + ")"};
        ++cases;
      }
    }
  return {true, std::to_string(cases) + " single-flip cases, all detected"};
}

// ---------------------------------------------------------------------------
// 3. Multi-flip evasion law vs brute-force enumeration
// ---------------------------------------------------------------------------

Outcome evasion_law() {
  size_t patterns = 0, evading = 0;
  for (uint64_t trial = 0; trial < 4; ++trial) {
    auto rng = make_rng(77, "evasion-trial", trial);
    std::uniform_int_distribution<int> wdist(-128, 127);
    std::uniform_int_distribution<int> kdist(0, 0xffff);
    const uint16_t key = static_cast<uint16_t>(kdist(rng));
    std::vector<int8_t> w(16);
    for (auto& v : w) v = static_cast<int8_t>(wdist(rng));

    const Signature base = make_signature(checksum(mask_group(w, key)), 2);
    // Masked sign-bit flip of element i moves the group sum by 128*unit[i].
    std::vector<int> unit(16);
    for (size_t i = 0; i < 16; ++i)
      unit[i] = mask_sign(key, i) * bit_flip_delta(w[i], kMsb) / 128;

    for (uint32_t pattern = 0; pattern < (1u << 16); ++pattern) {
      auto flipped = w;
      int t = 0;
      for (int i = 0; i < 16; ++i)
        if ((pattern >> i) & 1u) {
          flipped[i] = toggle_bit(flipped[i], kMsb);
          t += unit[i];
        }
      const bool brute = make_signature(checksum(mask_group(flipped, key)), 2) == base;
      const bool law = ((t % 4) + 4) % 4 == 0;
      if (brute != law)
        return {false, "pattern 0x" + std::to_string(pattern) + " (trial " +
                           std::to_string(trial) + "): enumeration says " +
                           (brute ? "evade" : "detect") + ", law says the opposite"};
      ++patterns;
      evading += brute;
    }
  }
  return {true, std::to_string(patterns) + " flip patterns; " + std::to_string(evading) +
                    " evade, exactly the net-count-divisible-by-4 ones"};
}

// ---------------------------------------------------------------------------
// 4. Monte Carlo miss rate, one million rounds per config
// ---------------------------------------------------------------------------

Outcome miss_rate_bounds() {
  const size_t rounds = 1000000;
  const auto g32 = miss_rate(32, rounds, 1);
  const auto g16 = miss_rate(16, rounds, 1);
  const bool ok32 = g32.rate >= 1e-6 && g32.rate <= 1e-4;
  const bool ok16 = g16.rate <= 1e-5;
  return {ok32 && ok16,
          "G=32: " + std::to_string(g32.misses) + "/1e6 missed, rate " + sci(g32.rate) +
              " (bounds [1e-6,1e-4]); G=16: " + std::to_string(g16.misses) + "/1e6, rate " +
              sci(g16.rate) + " (bound <=1e-5)"};
}

// ---------------------------------------------------------------------------
// 11. Analytic gradient vs central finite differences
// ---------------------------------------------------------------------------

// Real-arithmetic forward/loss with one dequantized weight shifted by
// `delta` — the independent oracle the analytic gradient is checked against.
double real_loss_perturbed(const QuantizedModel& m, const Dataset& batch, size_t target_layer,
                           size_t target_index, double delta) {
  double total = 0.0;
  std::vector<double> cur, next;
  for (size_t r = 0; r < batch.rows; ++r) {
    cur.assign(batch.row(r), batch.row(r) + batch.cols);
    for (size_t l = 0; l < m.num_layers(); ++l) {
      const DenseLayer& layer = m.layers[l];
      const size_t in = layer.in_dim(), out = layer.out_dim();
      next.assign(out, 0.0);
      for (size_t j = 0; j < out; ++j) {
        double acc = layer.bias[j];
        for (size_t i = 0; i < in; ++i) {
          double w = static_cast<double>(layer.weights.values[j * in + i]) * layer.weights.scale;
          if (l == target_layer && j * in + i == target_index) w += delta;
          acc += w * cur[i];
        }
        next[j] = acc;
      }
      if (l + 1 < m.num_layers())
        for (auto& v : next) v = std::max(0.0, v);
      cur = next;
    }
    const double mx = *std::max_element(cur.begin(), cur.end());
    double sum = 0.0;
    for (double v : cur) sum += std::exp(v - mx);
    total += std::log(sum) - (cur[batch.labels[r]] - mx);
  }
  return total / static_cast<double>(batch.rows);
}

// Smallest |pre-activation| over all hidden units and rows. Central
// differences are only trustworthy when every relu stays on one side of its
// kink throughout the +-h sweep, so batches too close to a kink are redrawn.
double min_hidden_preact(const QuantizedModel& m, const Dataset& batch) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> cur, next;
  for (size_t r = 0; r < batch.rows; ++r) {
    cur.assign(batch.row(r), batch.row(r) + batch.cols);
    for (size_t l = 0; l < m.num_layers(); ++l) {
      const DenseLayer& layer = m.layers[l];
      const size_t in = layer.in_dim(), out = layer.out_dim();
      next.assign(out, 0.0);
      for (size_t j = 0; j < out; ++j) {
        double acc = layer.bias[j];
        for (size_t i = 0; i < in; ++i)
          acc += static_cast<double>(layer.weights.values[j * in + i]) * layer.weights.scale *
                 cur[i];
        next[j] = acc;
      }
      if (l + 1 < m.num_layers()) {
        for (double v : next) best = std::min(best, std::abs(v));
        for (auto& v : next) v = std::max(0.0, v);
      }
      cur = next;
    }
  }
  return best;
}

Outcome gradient_oracle() {
  const double h = 1e-3;       // central-difference step on the dequantized weight
  const double rtol = 1e-4;
  const double kink_margin = 6e-3;  // > h * max possible pre-activation shift

  size_t components = 0;
  double worst = 0.0;
  for (uint64_t t = 0; t < 20; ++t) {
    auto rng = make_rng(4242, "grad-model", t);
    std::uniform_int_distribution<size_t> in_dist(4, 10), hid_dist(3, 8);
    std::uniform_int_distribution<int> cls_dist(2, 5), depth_dist(1, 2);
    std::normal_distribution<double> wdist(0.0, 0.15), bdist(0.0, 0.1);

    std::vector<size_t> dims{in_dist(rng)};
    const int depth = depth_dist(rng);
    for (int d = 0; d < depth; ++d) dims.push_back(hid_dist(rng));
    const int classes = cls_dist(rng);
    dims.push_back(static_cast<size_t>(classes));

    QuantizedModel m;
    for (size_t l = 0; l + 1 < dims.size(); ++l) {
      std::vector<double> w(dims[l] * dims[l + 1]);
      for (auto& v : w) v = wdist(rng);
      DenseLayer layer;
      layer.weights = quantize(w, {dims[l + 1], dims[l]});
      layer.bias.resize(dims[l + 1]);
      for (auto& b : layer.bias) b = bdist(rng);
      m.layers.push_back(std::move(layer));
    }

    Dataset batch;
    batch.rows = 8;
    batch.cols = dims.front();
    batch.num_classes = classes;
    bool found = false;
    for (uint64_t attempt = 0; attempt < 500 && !found; ++attempt) {
      auto brng = make_rng(4242, "grad-batch", t * 1000 + attempt);
      std::normal_distribution<double> xdist(0.0, 1.0);
      std::uniform_int_distribution<int> ldist(0, classes - 1);
      batch.x.resize(batch.rows * batch.cols);
      batch.labels.resize(batch.rows);
      for (auto& v : batch.x) v = std::clamp(xdist(brng), -2.5, 2.5);
      for (auto& y : batch.labels) y = ldist(brng);
      found = min_hidden_preact(m, batch) >= kink_margin;
    }
    if (!found)
      return {false, "no kink-free batch found for model " + std::to_string(t)};

    const LossGrad lg = loss_and_grad(m, batch);
    for (size_t l = 0; l < m.num_layers(); ++l)
      for (size_t i = 0; i < m.layer_size(l); ++i) {
        const double fp = real_loss_perturbed(m, batch, l, i, +h);
        const double fm = real_loss_perturbed(m, batch, l, i, -h);
        const double fd = (fp - fm) / (2.0 * h);
        const double g = lg.weight_grads[l][i];
        ++components;
        const double denom = std::max(std::abs(fd), std::abs(g));
        if (denom <= 1e-9) continue;  // dead path, both sides exactly flat
        const double rel = std::abs(g - fd) / denom;
        worst = std::max(worst, rel);
        if (rel > rtol)
          return {false, "model " + std::to_string(t) + " layer " + std::to_string(l) +
                             " weight " + std::to_string(i) + ": relative error " + sci(rel) +
                             " > " + sci(rtol)};
      }
  }
  return {true, "20 models, " + std::to_string(components) +
                    " gradient components, worst relative error " + sci(worst)};
}

}  // namespace

// ---------------------------------------------------------------------------

int main() {
  std::cout << "acceptance checks: masked-checksum integrity lab" << std::endl;

  run(1, "signature bits equal floor/mod arithmetic (exhaustive)", signature_equivalence);
  run(2, "single sign-bit flips always detected", single_flip_guarantee);
  run(3, "group evasion law matches enumeration", evasion_law);
  run(4, "ten-flip miss rate within Monte Carlo bounds", miss_rate_bounds);

  // Shared pipeline for the model-level checks: one trained classifier and
  // two fixed 100-round attack suites replayed under every protection config.
  // `suite` restricts the guided attacker to the sign bit — the damage class
  // the detection and recovery gates are specified against — while
  // `plain_suite` leaves the bit choice free and feeds the statistics check.
  // The group-size grid spans 2..64 so the smallest groups stay small
  // relative to this 2.7k-weight model the way production group sizes are
  // small relative to full-size networks.
  TrainTestSplit data;
  QuantizedModel model;
  ExperimentParams params;
  params.master_seed = 1;
  params.rounds = 100;
  params.n_bf = 10;
  params.g_values = {2, 4, 8, 16, 32, 64};
  std::vector<AttackProfile> suite, plain_suite;
  std::vector<DetectionSweepRow> sweep;
  bool setup_ok = false;
  std::string setup_err;
  {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      SyntheticSpec spec;
      spec.classes = 8;
      spec.separation = 4.5;
      data = make_synthetic(spec);
      TrainConfig tcfg;
      model = train_tiny(data, tcfg);
      suite = pbfa_rounds(model, data.test, params, {kMsb});
      plain_suite = pbfa_rounds(model, data.test, params);
      sweep = detection_sweep(model, suite, params);
      setup_ok = true;
      size_t total_flips = 0, plain_flips = 0;
      for (const auto& p : suite) total_flips += p.flips.size();
      for (const auto& p : plain_suite) plain_flips += p.flips.size();
      std::cout << "  [setup] trained " << model.total_weights() << "-weight classifier (8 classes), clean accuracy "
                << num(model.baseline_accuracy) << "; attack suites: " << suite.size()
                << " rounds, " << total_flips << " sign-bit flips / " << plain_flips
                << " free-bit flips ["
                << num(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                           .count(),
                       1)
                << "s]" << std::endl;
    } catch (const std::exception& e) {
      setup_err = e.what();
      std::cout << "  [setup] FAILED: " << setup_err << std::endl;
    }
  }
  auto need_setup = [&]() -> Outcome {
    return {false, "shared pipeline setup failed: " + setup_err};
  };
  auto sweep_row = [&](uint32_t g, bool interleave) -> const DetectionSweepRow& {
    for (const auto& r : sweep)
      if (r.g == g && r.interleave == interleave) return r;
    throw std::logic_error("sweep row missing");
  };

  run(5, "mean flips detected per attack", [&]() -> Outcome {
    if (!setup_ok) return need_setup();
    const auto& best = sweep_row(2, true);
    bool pass = best.mean_detected >= 9.0;
    double worst_margin = std::numeric_limits<double>::infinity();
    for (uint32_t g : params.g_values) {
      const double margin =
          sweep_row(g, true).mean_detected - sweep_row(g, false).mean_detected;
      worst_margin = std::min(worst_margin, margin);
      if (margin < -0.2) pass = false;
    }
    return {pass, "G=2 interleaved detects " + num(best.mean_detected, 2) + "/" +
                      num(best.mean_injected, 2) + " (need >=9.0); worst interleave-vs-not margin " +
                      num(worst_margin, 2) + " (floor -0.2)"};
  });

  run(6, "group-zeroing restores accuracy", [&]() -> Outcome {
    if (!setup_ok) return need_setup();
    const auto rows = recovery_table(model, data.test, suite, {params.n_bf}, params);
    auto row = [&](uint32_t g, bool interleave) -> const RecoveryRow& {
      for (const auto& r : rows)
        if (r.g == g && r.interleave == interleave) return r;
      throw std::logic_error("recovery row missing");
    };
    const auto& best = row(2, true);
    const double clean = best.clean_accuracy;
    bool pass = true;
    std::string why;
    if (!(best.mean_attacked_accuracy <= 0.5 * clean)) {
      pass = false;
      why += " attacked accuracy not halved;";
    }
    if (!(clean - best.mean_recovered_accuracy <= 0.10)) {
      pass = false;
      why += " recovery gap > 10 points;";
    }
    // The gap bound is compared against the best repair any zeroing scheme
    // could reach: surgically zeroing exactly the attacked weights, no
    // group collateral at all.
    double zero_exact = 0.0;
    for (const auto& p : suite) {
      QuantizedModel z = model;
      for (const auto& f : p.flips) z.layers[f.layer].weights.values[f.flat_index] = 0;
      zero_exact += accuracy(z, data.test);
    }
    zero_exact /= static_cast<double>(suite.size());
    // Interleaving is compared against contiguous grouping at the smallest
    // group size, where a group brings in the least collateral. At larger G
    // the interleaved groups span more output rows of the 8x16 head, so
    // zeroing them costs more there — that trade is reported, not gated.
    const double g2_margin = row(2, true).mean_recovered_accuracy -
                             row(2, false).mean_recovered_accuracy;
    if (g2_margin < -0.03) {
      pass = false;
      why += " interleave recovery deficit at G=2;";
    }
    double worst_margin = std::numeric_limits<double>::infinity();
    for (uint32_t g : params.g_values)
      worst_margin = std::min(worst_margin, row(g, true).mean_recovered_accuracy -
                                                row(g, false).mean_recovered_accuracy);
    return {pass, "clean " + num(clean) + ", attacked " + num(best.mean_attacked_accuracy) +
                      ", recovered " + num(best.mean_recovered_accuracy) +
                      " at G=2 interleaved (exact-zeroing ceiling " + num(zero_exact) +
                      "); interleave margin " + num(g2_margin) +
                      " at G=2 (floor -0.03), grid-worst " + num(worst_margin) +
                      (why.empty() ? "" : ";" + why)};
  });

  run(7, "guided attack beats 10x random flips", [&]() -> Outcome {
    if (!setup_ok) return need_setup();
    const double clean = accuracy(model, data.test);
    size_t good = 0;
    double worst_random_drop = 0.0, worst_gap = std::numeric_limits<double>::infinity();
    for (uint64_t seed = 1; seed <= 20; ++seed) {
      ExperimentParams p = params;
      p.master_seed = seed;
      p.rounds = 1;
      const auto prof = pbfa_rounds(model, data.test, p)[0];
      QuantizedModel attacked = model;
      apply_profile(attacked, prof);
      const double pbfa_drop = clean - accuracy(attacked, data.test);

      QuantizedModel randomly = model;
      random_attack(randomly, 100, seed);
      const double random_drop = clean - accuracy(randomly, data.test);

      worst_random_drop = std::max(worst_random_drop, random_drop);
      worst_gap = std::min(worst_gap, pbfa_drop - random_drop);
      if (pbfa_drop > random_drop && random_drop < 0.05) ++good;
    }
    return {good >= 19, std::to_string(good) +
                            "/20 seeds: 10 guided flips out-damage 100 random and random costs "
                            "<5 points (max random drop " +
                            num(worst_random_drop) + ", min guided-minus-random gap " +
                            num(worst_gap) + ")"};
  });

  run(8, "attack statistics: sign bit, small weights, clustering", [&]() -> Outcome {
    if (!setup_ok) return need_setup();
    // Statistics come from the free-bit suite: the attacker chooses the bit,
    // and the claim is about what it chooses.
    size_t low = 0, mid = 0, high = 0, msb = 0, total = 0;
    for (const auto& p : plain_suite)
      for (const auto& f : p.flips) {
        ++total;
        if (f.bit == kMsb) ++msb;
        const int w = f.pre_flip_weight;
        if (w > -32 && w < 32)
          ++mid;
        else if (w <= -32)
          ++low;
        else
          ++high;
      }
    const double msb_frac = total ? static_cast<double>(msb) / total : 0.0;

    const auto coll = group_collision(plain_suite, model.layer_sizes(), params);
    bool monotone = true, accelerating = true;
    std::string series;
    for (size_t i = 0; i < coll.size(); ++i) {
      series += (i ? " " : "") + num(coll[i].contiguous);
      if (i >= 1 && !(coll[i].contiguous > coll[i - 1].contiguous + 1e-12)) monotone = false;
      if (i >= 2 && !(coll[i].contiguous - coll[i - 1].contiguous >=
                      coll[i - 1].contiguous - coll[i - 2].contiguous - 1e-9))
        accelerating = false;
    }
    const bool pass =
        msb_frac >= 0.80 && mid > low && mid > high && monotone && accelerating;
    return {pass, "sign-bit fraction " + num(msb_frac) + " (need >=0.80); weight regions " +
                      std::to_string(low) + "/" + std::to_string(mid) + "/" +
                      std::to_string(high) + " (plurality in (-32,32)); contiguous multi-flip "
                      "proportion over G={2,4,8,16,32,64}: " +
                      series + (monotone ? "" : " NOT monotone") +
                      (accelerating ? ", increments grow" : ", increments NOT growing")};
  });

  run(9, "storage arithmetic matches the reference tables", [&]() -> Outcome {
    const ArchSpec r20 = load_arch_csv(std::string(RADAR_DATA_DIR) + "/resnet20_layers.csv");
    const ArchSpec r18 = load_arch_csv(std::string(RADAR_DATA_DIR) + "/resnet18_layers.csv");
    if (r20.total_weights() != resnet20_arch().total_weights() ||
        r18.total_weights() != resnet18_arch().total_weights())
      return {false, "shipped layer tables disagree with built-in architectures"};

    auto kb_sig = [](const ArchSpec& a, uint32_t g) {
      return bits_to_kb(storage_overhead_bits(a.layer_sizes, g, 2));
    };
    auto kb_crc = [](const ArchSpec& a, uint32_t g, int width) {
      size_t groups = 0;
      for (size_t n : a.layer_sizes) groups += (n + g - 1) / g;
      return bits_to_kb(groups * static_cast<size_t>(width));
    };
    auto near = [](double v, double ref) { return std::abs(v - ref) <= 0.10 * ref; };

    const double s18 = kb_sig(r18, 512), c18 = kb_crc(r18, 512, 13);
    const double s20 = kb_sig(r20, 8), c20 = kb_crc(r20, 8, 7);
    bool pass = near(s18, 5.6) && near(c18, 36.4) && near(s20, 8.2) && near(c20, 28.7);
    const size_t h64 = secded_overhead(64), h4096 = secded_overhead(4096);
    if (h64 != 7 || h4096 != 13) pass = false;
    return {pass, "large net G=512: sig " + num(s18, 2) + " KB (ref 5.6), crc13 " + num(c18, 2) +
                      " KB (ref 36.4); small net G=8: sig " + num(s20, 2) +
                      " KB (ref 8.2), crc7 " + num(c20, 2) + " KB (ref 28.7), all +-10%; hamming " +
                      std::to_string(h64) + " bits/64 and " + std::to_string(h4096) +
                      " bits/4096 (exact)"};
  });

  run(10, "checksum-aware attacker: pairing, weaker bits, wider signature", [&]() -> Outcome {
    if (!setup_ok) return need_setup();
    ExperimentParams kp = params;
    kp.rounds = 30;
    const auto know = knowledgeable(model, data.test, data.test, 8, kp);
    auto krow = [&](const std::string& suite_name, bool interleave,
                    int width) -> const KnowledgeableRow& {
      for (const auto& r : know.detection)
        if (r.suite == suite_name && r.interleave == interleave && r.signature_width == width)
          return r;
      throw std::logic_error("knowledgeable row missing: " + suite_name);
    };
    const auto& plain_ni = krow("pbfa-msb", false, 2);
    const auto& paired_ni = krow("paired", false, 2);
    const auto& plain_il = krow("pbfa-msb", true, 2);
    const auto& paired_il = krow("paired", true, 2);

    bool pass = true;
    std::string why;
    if (!(paired_ni.detection_ratio < plain_ni.detection_ratio)) {
      pass = false;
      why += " pairing did not lower non-interleaved detection;";
    }
    if (!(paired_il.mean_detected >= plain_il.mean_detected - 1.5)) {
      pass = false;
      why += " interleaved detection fell by more than 1.5 flips;";
    }

    double msb_acc10 = -1.0, msb1_acc19 = -1.0;
    for (const auto& d : know.damage) {
      if (d.bit == kMsb && d.n_bf == 10) msb_acc10 = d.mean_attacked_accuracy;
      if (d.bit == kMsb - 1 && d.n_bf == 19) msb1_acc19 = d.mean_attacked_accuracy;
    }
    if (!(msb1_acc19 > msb_acc10)) {
      pass = false;
      why += " 19 weaker-bit flips already match 10 sign-bit flips;";
    }
    // Width gate at G=2: the extra signature bit is a per-group property, and
    // at larger G several +-64 shifts land in one group and can cancel before
    // the signature ever sees them. G=2 keeps at most one flip per group, so
    // it measures the signature width, not collision luck. The G=8 ratio is
    // reported alongside for the collision effect.
    ExperimentParams mp = kp;
    mp.n_bf = 20;
    const auto msb1_suite = pbfa_rounds(model, data.test, mp, {kMsb - 1}, "msb1-damage-batch");
    double w3_inj = 0.0, w3_det = 0.0, w2_det = 0.0;
    for (int width : {2, 3}) {
      const auto store = protect(model, kp.protection(2, true, width));
      size_t inj = 0, det = 0;
      for (const auto& prof : msb1_suite) {
        QuantizedModel work = model;
        apply_profile(work, prof);
        const auto locs = prof.locations();
        const auto rep = detect(work, store, &locs);
        inj += rep.injected_count;
        det += rep.detected_count;
      }
      if (width == 3) {
        w3_inj = static_cast<double>(inj);
        w3_det = static_cast<double>(det);
      } else {
        w2_det = static_cast<double>(det);
      }
    }
    const double w3_ratio = w3_inj > 0 ? w3_det / w3_inj : 0.0;
    const double w2_ratio = w3_inj > 0 ? w2_det / w3_inj : 0.0;
    if (!(w3_ratio >= 0.9)) {
      pass = false;
      why += " 3-bit signature detects <90% of weaker-bit flips at G=2;";
    }
    if (!(w2_ratio < w3_ratio)) {
      pass = false;
      why += " extra signature bit did not raise detection;";
    }
    const auto& msb1_w3_g8 = krow("msb1", true, 3);
    return {pass,
            "non-interleaved ratio " + num(paired_ni.detection_ratio) + " (paired) vs " +
                num(plain_ni.detection_ratio) + " (plain); interleaved detected " +
                num(paired_il.mean_detected, 2) + " vs " + num(plain_il.mean_detected, 2) +
                " flips; damage at 19 weaker-bit flips " + num(msb1_acc19) + " vs " +
                num(msb_acc10) + " at 10 sign-bit; 3-bit signature catches " + num(w3_ratio) +
                " of weaker-bit flips at G=2 (2-bit: " + num(w2_ratio) + "; G=8: " +
                num(msb1_w3_g8.detection_ratio) + ")" + (why.empty() ? "" : ";" + why)};
  });

  run(11, "analytic gradients match finite differences", gradient_oracle);

  run(12, "wall-clock ratio (informational only)", [&]() -> Outcome {
    if (!setup_ok) return need_setup();
    const auto store = protect(model, params.protection(8, true, 2));
    const auto t = measure_timing(model, data.test, store, 5);
    return {true, "detection " + sci(t.detection_seconds) + " s vs inference " +
                      sci(t.inference_seconds) + " s per pass, ratio " + num(t.ratio, 4) +
                      "; reported, never asserted"};
  });

  std::cout << "acceptance: " << (12 - failures) << "/12 passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
