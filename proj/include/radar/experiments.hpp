#pragma once
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "radar/archspec.hpp"
#include "radar/attack.hpp"
#include "radar/codec.hpp"
#include "radar/codes.hpp"
#include "radar/dataset.hpp"
#include "radar/model.hpp"
#include "radar/rng.hpp"
#include "radar/serialize.hpp"

namespace radar {

// Shared experiment knobs. Every run is a pure function of these plus the
// model and dataset files; rounds draw per-round seeds from named
// substreams of master_seed, so results are independent of execution order
// and thread count.
struct ExperimentParams {
  uint64_t master_seed = 1;
  size_t rounds = 100;
  size_t n_bf = 10;
  size_t k = 10;
  size_t batch_size = 128;
  std::vector<uint32_t> g_values = {8, 16, 32, 64};
  uint32_t stride = 0;  // 0: stride = G
  uint32_t offset = 3;
  int signature_width = 2;
  size_t threads = 1;

  ProtectionConfig protection(uint32_t g, bool interleave, int width) const {
    ProtectionConfig cfg;
    cfg.group_size = g;
    cfg.stride = stride;
    cfg.offset = offset;
    cfg.signature_width = width;
    cfg.interleave = interleave;
    cfg.key_seed = substream_seed(master_seed, "protect-key");
    return cfg;
  }
};

namespace detail {

template <class Fn>
inline void for_rounds(size_t rounds, size_t threads, Fn&& fn) {
  if (threads <= 1 || rounds <= 1) {
    for (size_t r = 0; r < rounds; ++r) fn(r);
    return;
  }
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t r = next.fetch_add(1); r < rounds; r = next.fetch_add(1)) fn(r);
  };
  std::vector<std::thread> pool;
  const size_t n = std::min(threads, rounds);
  pool.reserve(n);
  for (size_t i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

inline double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Attack suites
// ---------------------------------------------------------------------------

// `rounds` independent PBFA runs against the clean model, each on its own
// batch drawn from the test split. Round r is reproducible in isolation.
inline std::vector<AttackProfile> pbfa_rounds(const QuantizedModel& clean, const Dataset& test,
                                              const ExperimentParams& params,
                                              const std::vector<int>& allowed_bits = {0, 1, 2, 3, 4,
                                                                                      5, 6, 7},
                                              const char* batch_stream = "attack-batch") {
  std::vector<AttackProfile> profiles(params.rounds);
  detail::for_rounds(params.rounds, params.threads, [&](size_t r) {
    auto rng = make_rng(params.master_seed, batch_stream, r);
    const Dataset batch = sample_batch(test, params.batch_size, rng);
    QuantizedModel work = clean;
    PbfaOptions opt;
    opt.n_bf = params.n_bf;
    opt.k = params.k;
    opt.allowed_bits = allowed_bits;
    profiles[r] = pbfa(work, batch, opt);
    profiles[r].seed = substream_seed(params.master_seed, batch_stream, r);
  });
  return profiles;
}

inline std::vector<AttackProfile> paired_rounds(const QuantizedModel& clean, const Dataset& test,
                                                const ExperimentParams& params, size_t n_pairs,
                                                uint32_t assumed_group_size) {
  std::vector<AttackProfile> profiles(params.rounds);
  detail::for_rounds(params.rounds, params.threads, [&](size_t r) {
    auto rng = make_rng(params.master_seed, "paired-batch", r);
    const Dataset batch = sample_batch(test, params.batch_size, rng);
    QuantizedModel work = clean;
    PairedOptions opt;
    opt.n_pairs = n_pairs;
    opt.k = params.k;
    opt.assumed_group_size = assumed_group_size;
    profiles[r] = paired_attack(work, batch, opt);
    profiles[r].seed = substream_seed(params.master_seed, "paired-batch", r);
  });
  return profiles;
}

// First n flips of a greedy profile equal the profile the same attack would
// have produced with the smaller budget, so one 10-flip suite also serves
// as the 5-flip suite.
inline AttackProfile truncate_profile(const AttackProfile& p, size_t n) {
  AttackProfile t = p;
  if (t.flips.size() > n) {
    t.flips.resize(n);
    t.requested = n;
    t.loss_after = t.flips.back().loss_after;
    t.halted_early = false;
  }
  return t;
}

// ---------------------------------------------------------------------------
// Detection sweep
// ---------------------------------------------------------------------------

struct DetectionSweepRow {
  uint32_t g = 0;
  bool interleave = true;
  size_t rounds = 0;
  double mean_detected = 0.0;   // ground-truth flips attributed to a flagged group
  double mean_injected = 0.0;
  double mean_flagged_groups = 0.0;
  double detection_ratio = 0.0;
};

// Fixed attack suite replayed against every (G, interleave) protection
// config; detection is config-dependent, the attacks are not, so the
// comparison across configs is paired.
inline std::vector<DetectionSweepRow> detection_sweep(const QuantizedModel& clean,
                                                      const std::vector<AttackProfile>& profiles,
                                                      const ExperimentParams& params) {
  std::vector<DetectionSweepRow> rows;
  for (uint32_t g : params.g_values) {
    for (bool interleave : {true, false}) {
      const auto store = protect(clean, params.protection(g, interleave, params.signature_width));
      DetectionSweepRow row;
      row.g = g;
      row.interleave = interleave;
      row.rounds = profiles.size();
      QuantizedModel work = clean;
      size_t detected = 0, injected = 0, flagged = 0;
      for (const auto& p : profiles) {
        apply_profile(work, p);
        const auto locs = p.locations();
        const auto report = detect(work, store, &locs);
        detected += report.detected_count;
        injected += report.injected_count;
        flagged += report.flagged_group_count();
        revert_profile(work, p);
      }
      const double n = static_cast<double>(profiles.size());
      row.mean_detected = detected / n;
      row.mean_injected = injected / n;
      row.mean_flagged_groups = flagged / n;
      row.detection_ratio = injected ? static_cast<double>(detected) / injected : 0.0;
      rows.push_back(row);
    }
  }
  return rows;
}

inline CsvTable detection_sweep_csv(const std::vector<DetectionSweepRow>& rows) {
  CsvTable t;
  t.schema = "radar.detection-sweep.v1";
  t.header = {"group_size", "interleave", "rounds",
              "mean_detected", "mean_injected", "mean_flagged_groups", "detection_ratio"};
  for (const auto& r : rows)
    t.rows.push_back({fmt(static_cast<size_t>(r.g)), r.interleave ? "1" : "0", fmt(r.rounds),
                      fmt(r.mean_detected), fmt(r.mean_injected), fmt(r.mean_flagged_groups),
                      fmt(r.detection_ratio)});
  return t;
}

// ---------------------------------------------------------------------------
// Recovery table
// ---------------------------------------------------------------------------

struct RecoveryRow {
  uint32_t g = 0;
  bool interleave = true;
  size_t n_bf = 0;
  size_t rounds = 0;
  double clean_accuracy = 0.0;
  double mean_attacked_accuracy = 0.0;
  double mean_recovered_accuracy = 0.0;
};

inline std::vector<RecoveryRow> recovery_table(const QuantizedModel& clean, const Dataset& eval_set,
                                               const std::vector<AttackProfile>& profiles,
                                               const std::vector<size_t>& n_bf_values,
                                               const ExperimentParams& params) {
  const double clean_acc = accuracy(clean, eval_set);
  std::vector<RecoveryRow> rows;
  for (uint32_t g : params.g_values) {
    for (bool interleave : {true, false}) {
      const auto store = protect(clean, params.protection(g, interleave, params.signature_width));
      for (size_t n_bf : n_bf_values) {
        RecoveryRow row;
        row.g = g;
        row.interleave = interleave;
        row.n_bf = n_bf;
        row.rounds = profiles.size();
        row.clean_accuracy = clean_acc;
        std::vector<double> attacked, recovered;
        for (const auto& full : profiles) {
          const AttackProfile p = truncate_profile(full, n_bf);
          QuantizedModel work = clean;
          apply_profile(work, p);
          attacked.push_back(accuracy(work, eval_set));
          const auto report = detect(work, store);
          recover(work, report, store);
          recovered.push_back(accuracy(work, eval_set));
        }
        row.mean_attacked_accuracy = detail::mean(attacked);
        row.mean_recovered_accuracy = detail::mean(recovered);
        rows.push_back(row);
      }
    }
  }
  return rows;
}

inline CsvTable recovery_table_csv(const std::vector<RecoveryRow>& rows) {
  CsvTable t;
  t.schema = "radar.recovery-table.v1";
  t.header = {"group_size", "interleave", "n_bf", "rounds",
              "clean_accuracy", "mean_attacked_accuracy", "mean_recovered_accuracy"};
  for (const auto& r : rows)
    t.rows.push_back({fmt(static_cast<size_t>(r.g)), r.interleave ? "1" : "0", fmt(r.n_bf),
                      fmt(r.rounds), fmt(r.clean_accuracy), fmt(r.mean_attacked_accuracy),
                      fmt(r.mean_recovered_accuracy)});
  return t;
}

// ---------------------------------------------------------------------------
// Miss-rate Monte Carlo
// ---------------------------------------------------------------------------

struct MissRateResult {
  uint32_t g = 0;
  size_t layer_size = 0;
  size_t n_flips = 0;
  size_t rounds = 0;
  size_t misses = 0;
  double rate = 0.0;
  double ci_low = 0.0;   // 95% Wilson interval
  double ci_high = 0.0;
};

namespace detail {

inline void wilson_interval(size_t hits, size_t n, double& lo, double& hi) {
  const double z = 1.959963984540054;  // 97.5th normal quantile
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  lo = std::max(0.0, center - half);
  hi = std::min(1.0, center + half);
  // At the boundaries center and half are algebraically equal; roundoff can
  // leave the interval just shy of the observed proportion. Clamp so the
  // interval always contains hits/n.
  if (hits == 0) lo = 0.0;
  if (hits == n) hi = 1.0;
}

}  // namespace detail

// A round injects `n_flips` distinct random MSB flips into a fixed random
// layer and counts a MISS when no group signature changes. Each MSB flip
// moves its group's masked sum by exactly +-128, so only touched groups
// need re-binarizing; that keeps a million rounds in the seconds range.
inline MissRateResult miss_rate(uint32_t g, size_t rounds, uint64_t master_seed,
                                size_t layer_size = 512, size_t n_flips = 10,
                                int signature_width = 2, uint32_t offset = 3) {
  if (n_flips > layer_size) throw std::invalid_argument("miss_rate: more flips than weights");
  LayerProtection cfg;
  cfg.group_size = g;
  cfg.stride = 0;
  cfg.offset = offset;
  cfg.signature_width = signature_width;
  cfg.interleave = true;
  cfg.key = derive_key16(substream_seed(master_seed, "miss-key"), 0);

  auto wrng = make_rng(master_seed, "miss-layer");
  std::uniform_int_distribution<int> wdist(-128, 127);
  std::vector<int8_t> weights(layer_size);
  for (auto& w : weights) w = static_cast<int8_t>(wdist(wrng));

  const auto perm = interleave_indices(layer_size, cfg);
  const auto inv = invert_permutation(perm);
  const size_t groups = perm.size() / g;

  // Clean group sums and, per weight, its group and masked MSB-flip delta.
  std::vector<int64_t> clean_sum(groups, 0);
  for (size_t p = 0; p < perm.size(); ++p) {
    const uint32_t orig = perm[p];
    if (orig < layer_size)
      clean_sum[p / g] += mask_sign(cfg.key, p % g) * static_cast<int>(weights[orig]);
  }
  std::vector<uint8_t> clean_sig(groups);
  for (size_t j = 0; j < groups; ++j)
    clean_sig[j] = make_signature(clean_sum[j], signature_width).value;
  std::vector<uint32_t> group_of(layer_size);
  std::vector<int32_t> delta_of(layer_size);
  for (size_t i = 0; i < layer_size; ++i) {
    const size_t p = inv[i];
    group_of[i] = static_cast<uint32_t>(p / g);
    delta_of[i] = mask_sign(cfg.key, p % g) * bit_flip_delta(weights[i], kMsb);
  }

  auto rng = make_rng(master_seed, "miss-flips");
  std::uniform_int_distribution<size_t> idist(0, layer_size - 1);
  std::vector<int64_t> group_delta(groups, 0);
  std::vector<uint32_t> touched;
  std::vector<size_t> picked;
  touched.reserve(n_flips);
  picked.reserve(n_flips);
  std::vector<uint8_t> in_use(layer_size, 0);

  MissRateResult res;
  res.g = g;
  res.layer_size = layer_size;
  res.n_flips = n_flips;
  res.rounds = rounds;
  for (size_t round = 0; round < rounds; ++round) {
    picked.clear();
    while (picked.size() < n_flips) {
      const size_t i = idist(rng);
      if (in_use[i]) continue;
      in_use[i] = 1;
      picked.push_back(i);
    }
    touched.clear();
    for (size_t i : picked) {
      const uint32_t grp = group_of[i];
      if (group_delta[grp] == 0) touched.push_back(grp);
      group_delta[grp] += delta_of[i];
    }
    bool missed = true;
    for (uint32_t grp : touched) {
      if (make_signature(clean_sum[grp] + group_delta[grp], signature_width).value !=
          clean_sig[grp]) {
        missed = false;
        break;
      }
    }
    if (missed) ++res.misses;
    for (uint32_t grp : touched) group_delta[grp] = 0;
    for (size_t i : picked) in_use[i] = 0;
  }
  res.rate = static_cast<double>(res.misses) / static_cast<double>(rounds);
  detail::wilson_interval(res.misses, rounds, res.ci_low, res.ci_high);
  return res;
}

inline CsvTable miss_rate_csv(const std::vector<MissRateResult>& results) {
  CsvTable t;
  t.schema = "radar.miss-rate.v1";
  t.header = {"group_size", "layer_size", "n_flips", "rounds", "misses", "rate", "ci_low", "ci_high"};
  for (const auto& r : results)
    t.rows.push_back({fmt(static_cast<size_t>(r.g)), fmt(r.layer_size), fmt(r.n_flips),
                      fmt(r.rounds), fmt(r.misses), fmt(r.rate, 9), fmt(r.ci_low, 9),
                      fmt(r.ci_high, 9)});
  return t;
}

// ---------------------------------------------------------------------------
// Group collision proportions
// ---------------------------------------------------------------------------

struct CollisionRow {
  uint32_t g = 0;
  double contiguous = 0.0;
  double interleaved = 0.0;
  size_t profiles = 0;
};

// Proportion of profiles in which some checksum group holds two or more of
// the profile's flips, under contiguous and interleaved grouping.
inline std::vector<CollisionRow> group_collision(const std::vector<AttackProfile>& profiles,
                                                 const std::vector<size_t>& layer_sizes,
                                                 const ExperimentParams& params) {
  if (profiles.empty()) throw std::invalid_argument("group_collision: no attack profiles");
  std::vector<CollisionRow> rows;
  for (uint32_t g : params.g_values) {
    CollisionRow row;
    row.g = g;
    row.profiles = profiles.size();
    LayerProtection contiguous;
    contiguous.group_size = g;
    contiguous.offset = 0;
    contiguous.interleave = false;
    LayerProtection interleaved = contiguous;
    interleaved.offset = params.offset;
    interleaved.interleave = true;
    std::vector<double> cont, intl;
    for (const auto& p : profiles) {
      const auto locs = p.locations();
      cont.push_back(profile_has_collision(locs, layer_sizes, contiguous));
      intl.push_back(profile_has_collision(locs, layer_sizes, interleaved));
    }
    row.contiguous = detail::mean(cont);
    row.interleaved = detail::mean(intl);
    rows.push_back(row);
  }
  return rows;
}

inline CsvTable group_collision_csv(const std::vector<CollisionRow>& rows) {
  CsvTable t;
  t.schema = "radar.group-collision.v1";
  t.header = {"group_size", "profiles", "contiguous_proportion", "interleaved_proportion"};
  for (const auto& r : rows)
    t.rows.push_back({fmt(static_cast<size_t>(r.g)), fmt(r.profiles), fmt(r.contiguous),
                      fmt(r.interleaved)});
  return t;
}

// ---------------------------------------------------------------------------
// Knowledgeable-attacker suite
// ---------------------------------------------------------------------------

struct KnowledgeableRow {
  std::string suite;  // "pbfa-msb", "paired", "msb1"
  uint32_t g = 0;
  bool interleave = true;
  int signature_width = 2;
  size_t rounds = 0;
  double mean_injected = 0.0;
  double mean_detected = 0.0;
  double detection_ratio = 0.0;
  double mean_recovered_accuracy = 0.0;
};

struct EqualDamageRow {
  int bit = 7;
  size_t n_bf = 0;
  size_t rounds = 0;
  double mean_attacked_accuracy = 0.0;
};

struct KnowledgeableResult {
  std::vector<KnowledgeableRow> detection;
  std::vector<EqualDamageRow> damage;
};

namespace detail {

inline KnowledgeableRow knowledgeable_eval(const std::string& suite, const QuantizedModel& clean,
                                           const Dataset& eval_set,
                                           const std::vector<AttackProfile>& profiles, uint32_t g,
                                           bool interleave, int width,
                                           const ExperimentParams& params) {
  const auto store = protect(clean, params.protection(g, interleave, width));
  KnowledgeableRow row;
  row.suite = suite;
  row.g = g;
  row.interleave = interleave;
  row.signature_width = width;
  row.rounds = profiles.size();
  size_t injected = 0, detected = 0;
  std::vector<double> recovered;
  for (const auto& prof : profiles) {
    QuantizedModel work = clean;
    apply_profile(work, prof);
    const auto locs = prof.locations();
    const auto report = detect(work, store, &locs);
    injected += report.injected_count;
    detected += report.detected_count;
    recover(work, report, store);
    recovered.push_back(accuracy(work, eval_set));
  }
  const double n = static_cast<double>(profiles.size());
  row.mean_injected = injected / n;
  row.mean_detected = detected / n;
  row.detection_ratio = injected ? static_cast<double>(detected) / injected : 0.0;
  row.mean_recovered_accuracy = mean(recovered);
  return row;
}

}  // namespace detail

// Plain MSB-focused PBFA vs the checksum-aware paired attack vs the MSB-1
// fallback, across interleave settings and signature widths. The paired
// attack assumes contiguous grouping of size `g`, so interleaving is
// exactly the defense it probes.
inline KnowledgeableResult knowledgeable(const QuantizedModel& clean, const Dataset& test,
                                         const Dataset& eval_set, uint32_t g,
                                         const ExperimentParams& params) {
  KnowledgeableResult out;

  ExperimentParams plain_params = params;
  plain_params.n_bf = 20;
  const auto plain = pbfa_rounds(clean, test, plain_params, {kMsb}, "attack-batch");
  const auto paired = paired_rounds(clean, test, params, 10, g);

  for (bool interleave : {true, false})
    for (int width : {2, 3}) {
      out.detection.push_back(detail::knowledgeable_eval("pbfa-msb", clean, eval_set, plain, g,
                                                         interleave, width, params));
      out.detection.push_back(detail::knowledgeable_eval("paired", clean, eval_set, paired, g,
                                                         interleave, width, params));
    }

  // Equal-damage comparison: how many MSB-1 flips reproduce the damage of
  // a 10-flip MSB attack.
  const std::vector<size_t> msb1_budgets = {10, 19, 20, 40};
  ExperimentParams msb_params = params;
  msb_params.n_bf = 10;
  const auto msb10 = pbfa_rounds(clean, test, msb_params, {kMsb}, "msb-damage-batch");
  {
    EqualDamageRow row;
    row.bit = kMsb;
    row.n_bf = 10;
    row.rounds = msb10.size();
    std::vector<double> acc;
    for (const auto& prof : msb10) {
      QuantizedModel work = clean;
      apply_profile(work, prof);
      acc.push_back(accuracy(work, eval_set));
    }
    row.mean_attacked_accuracy = detail::mean(acc);
    out.damage.push_back(row);
  }
  std::vector<AttackProfile> msb1_largest;
  for (size_t budget : msb1_budgets) {
    ExperimentParams mp = params;
    mp.n_bf = budget;
    const auto profs = pbfa_rounds(clean, test, mp, {kMsb - 1}, "msb1-damage-batch");
    EqualDamageRow row;
    row.bit = kMsb - 1;
    row.n_bf = budget;
    row.rounds = profs.size();
    std::vector<double> acc;
    for (const auto& prof : profs) {
      QuantizedModel work = clean;
      apply_profile(work, prof);
      acc.push_back(accuracy(work, eval_set));
    }
    row.mean_attacked_accuracy = detail::mean(acc);
    out.damage.push_back(row);
    if (budget == 20) msb1_largest = profs;
  }

  // Detection of the MSB-1 profiles under both signature widths.
  for (int width : {2, 3})
    out.detection.push_back(detail::knowledgeable_eval("msb1", clean, eval_set, msb1_largest, g,
                                                       true, width, params));
  return out;
}

inline CsvTable knowledgeable_csv(const KnowledgeableResult& res) {
  CsvTable t;
  t.schema = "radar.knowledgeable.v1";
  t.header = {"suite", "group_size", "interleave", "signature_width", "rounds", "mean_injected",
              "mean_detected", "detection_ratio", "mean_recovered_accuracy"};
  for (const auto& r : res.detection)
    t.rows.push_back({r.suite, fmt(static_cast<size_t>(r.g)), r.interleave ? "1" : "0",
                      fmt(static_cast<size_t>(r.signature_width)), fmt(r.rounds),
                      fmt(r.mean_injected), fmt(r.mean_detected), fmt(r.detection_ratio),
                      fmt(r.mean_recovered_accuracy)});
  return t;
}

inline CsvTable equal_damage_csv(const KnowledgeableResult& res) {
  CsvTable t;
  t.schema = "radar.equal-damage.v1";
  t.header = {"bit", "n_bf", "rounds", "mean_attacked_accuracy"};
  for (const auto& r : res.damage)
    t.rows.push_back({fmt(static_cast<size_t>(r.bit)), fmt(r.n_bf), fmt(r.rounds),
                      fmt(r.mean_attacked_accuracy)});
  return t;
}

// ---------------------------------------------------------------------------
// Storage overhead and timing
// ---------------------------------------------------------------------------

struct OverheadRow {
  std::string arch;
  uint32_t g = 0;
  std::string code;  // "sig-2", "sig-3", or a CRC name
  int width = 0;
  size_t groups = 0;
  size_t bits = 0;
  double kb = 0.0;
};

inline std::vector<OverheadRow> overhead_table(const std::vector<ArchSpec>& archs,
                                               const std::vector<uint32_t>& g_values,
                                               const std::vector<CrcSpec>& crcs) {
  std::vector<OverheadRow> rows;
  for (const auto& arch : archs)
    for (uint32_t g : g_values) {
      size_t groups = 0;
      for (size_t n : arch.layer_sizes) groups += (n + g - 1) / g;
      for (int width : {2, 3}) {
        OverheadRow row;
        row.arch = arch.name;
        row.g = g;
        row.code = "sig-" + std::to_string(width);
        row.width = width;
        row.groups = groups;
        row.bits = groups * static_cast<size_t>(width);
        row.kb = bits_to_kb(row.bits);
        rows.push_back(row);
      }
      for (const auto& crc : crcs) {
        OverheadRow row;
        row.arch = arch.name;
        row.g = g;
        row.code = crc.name;
        row.width = crc.width;
        row.groups = groups;
        row.bits = groups * static_cast<size_t>(crc.width);
        row.kb = bits_to_kb(row.bits);
        rows.push_back(row);
      }
    }
  return rows;
}

inline CsvTable overhead_csv(const std::vector<OverheadRow>& rows) {
  CsvTable t;
  t.schema = "radar.overhead.v1";
  t.header = {"arch", "group_size", "code", "width", "groups", "bits", "kb"};
  for (const auto& r : rows)
    t.rows.push_back({r.arch, fmt(static_cast<size_t>(r.g)), r.code,
                      fmt(static_cast<size_t>(r.width)), fmt(r.groups), fmt(r.bits),
                      fmt(r.kb, 5)});
  return t;
}

// Measured wall-clock of one full detection pass relative to one full
// forward pass over the evaluation set. Informational only: absolute
// numbers depend entirely on this host.
struct TimingResult {
  double inference_seconds = 0.0;
  double detection_seconds = 0.0;
  double ratio = 0.0;
  size_t repeats = 0;
};

inline TimingResult measure_timing(const QuantizedModel& model, const Dataset& eval_set,
                                   const GoldenSignatureStore& store, size_t repeats = 5) {
  using clock = std::chrono::steady_clock;
  TimingResult res;
  res.repeats = repeats;
  volatile double sink = 0.0;
  const auto t0 = clock::now();
  for (size_t i = 0; i < repeats; ++i) sink = sink + accuracy(model, eval_set);
  const auto t1 = clock::now();
  volatile size_t flags = 0;
  for (size_t i = 0; i < repeats; ++i) flags = flags + detect(model, store).flagged_group_count();
  const auto t2 = clock::now();
  (void)sink;
  (void)flags;
  res.inference_seconds = std::chrono::duration<double>(t1 - t0).count() / repeats;
  res.detection_seconds = std::chrono::duration<double>(t2 - t1).count() / repeats;
  res.ratio = res.inference_seconds > 0 ? res.detection_seconds / res.inference_seconds : 0.0;
  return res;
}

}  // namespace radar
