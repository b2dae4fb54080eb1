// Command-line laboratory for the masked-checksum weight-integrity scheme:
// data generation, training, protection, attacks, detection, recovery, and
// the experiment suites. Exit codes: 0 success/clean, 1 runtime error,
// 2 usage error, 3 attack detected (detect subcommand).

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "radar/radar.hpp"

namespace {

using namespace radar;

struct ExpFlags {
  std::string model_path;
  std::string test_path;
  std::string out = "results.csv";
  size_t rounds = 100;
  size_t n_bf = 10;
  size_t k = 10;
  size_t batch_size = 128;
  std::vector<uint32_t> g_values = {8, 16, 32, 64};
  uint32_t stride = 0;
  uint32_t offset = 3;
  int width = 2;
  uint64_t seed = 1;
  size_t threads = 1;

  void add_common(CLI::App* sub, bool needs_model) {
    if (needs_model) {
      sub->add_option("--model", model_path, "trained model (json)")->required();
      sub->add_option("--test", test_path, "test dataset (csv)")->required();
    }
    sub->add_option("--out", out, "output csv path")->capture_default_str();
    sub->add_option("--rounds", rounds, "independent rounds")->capture_default_str();
    sub->add_option("--seed", seed, "master seed")->capture_default_str();
    sub->add_option("--threads", threads, "worker threads for round generation")
        ->capture_default_str();
  }

  void add_protection(CLI::App* sub) {
    sub->add_option("--g-values", g_values, "group sizes to sweep")
        ->delimiter(',')
        ->capture_default_str();
    sub->add_option("--stride", stride, "interleave stride N_W (0: same as G)")
        ->capture_default_str();
    sub->add_option("--offset", offset, "interleave circular offset")->capture_default_str();
    sub->add_option("--width", width, "signature width in bits (2 or 3)")->capture_default_str();
  }

  void add_attack(CLI::App* sub) {
    sub->add_option("--n-bf", n_bf, "bit flips per attack")->capture_default_str();
    sub->add_option("--k", k, "ranked candidates per layer")->capture_default_str();
    sub->add_option("--batch-size", batch_size, "attack batch size")->capture_default_str();
  }

  ExperimentParams params() const {
    ExperimentParams p;
    p.master_seed = seed;
    p.rounds = rounds;
    p.n_bf = n_bf;
    p.k = k;
    p.batch_size = batch_size;
    p.g_values = g_values;
    p.stride = stride;
    p.offset = offset;
    p.signature_width = width;
    p.threads = threads;
    return p;
  }
};

std::string describe_flags(const DetectionReport& report) {
  size_t layers_hit = 0;
  for (const auto& f : report.flagged) layers_hit += f.empty() ? 0 : 1;
  return std::to_string(report.flagged_group_count()) + " flagged group(s) across " +
         std::to_string(layers_hit) + " layer(s)";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Masked-checksum integrity lab for int8 quantized networks"};
  app.require_subcommand(1);
  int exit_code = 0;

  // ---- gen-data ----
  auto* gen = app.add_subcommand("gen-data", "generate a synthetic classification dataset");
  SyntheticSpec synth;
  std::string out_train = "train.csv", out_test = "test.csv";
  gen->add_option("--out-train", out_train)->capture_default_str();
  gen->add_option("--out-test", out_test)->capture_default_str();
  gen->add_option("--features", synth.features)->capture_default_str();
  gen->add_option("--classes", synth.classes)->capture_default_str();
  gen->add_option("--train-samples", synth.train_samples)->capture_default_str();
  gen->add_option("--test-samples", synth.test_samples)->capture_default_str();
  gen->add_option("--separation", synth.separation)->capture_default_str();
  gen->add_option("--sigma", synth.sigma)->capture_default_str();
  gen->add_flag("--random-labels", synth.random_labels, "shuffle labels (noise ceiling check)");
  gen->add_option("--seed", synth.seed)->capture_default_str();
  gen->callback([&] {
    const TrainTestSplit split = make_synthetic(synth);
    save_dataset(split.train, out_train);
    save_dataset(split.test, out_test);
    std::cout << "wrote " << out_train << " (" << split.train.rows << " rows), " << out_test
              << " (" << split.test.rows << " rows)\n";
  });

  // ---- train ----
  auto* tr = app.add_subcommand("train", "train and quantize the toy classifier");
  std::string train_path, test_path, model_out = "model.json";
  TrainConfig tcfg;
  tr->add_option("--train", train_path, "training dataset (csv)")->required();
  tr->add_option("--test", test_path, "test dataset (csv)")->required();
  tr->add_option("--out", model_out, "output model path")->capture_default_str();
  tr->add_option("--hidden", tcfg.hidden, "hidden layer sizes")->delimiter(',')->capture_default_str();
  tr->add_option("--epochs", tcfg.epochs)->capture_default_str();
  tr->add_option("--batch-size", tcfg.batch_size)->capture_default_str();
  tr->add_option("--lr", tcfg.lr)->capture_default_str();
  tr->add_option("--weight-decay", tcfg.weight_decay)->capture_default_str();
  tr->add_option("--seed", tcfg.seed)->capture_default_str();
  tr->callback([&] {
    TrainTestSplit split;
    split.train = load_dataset(train_path);
    split.test = load_dataset(test_path);
    const QuantizedModel model = train_tiny(split, tcfg);
    save_model(model, model_out);
    std::cout << "trained " << model.num_layers() << " layers, " << model.total_weights()
              << " weights; test accuracy " << model.baseline_accuracy << "\n";
    std::cout << "wrote " << model_out << "\n";
  });

  // ---- protect ----
  auto* prot = app.add_subcommand("protect", "compute the golden signature store");
  std::string prot_model, prot_out = "store.json";
  ProtectionConfig pcfg;
  bool no_interleave = false;
  prot->add_option("--model", prot_model, "model (json)")->required();
  prot->add_option("--out", prot_out, "output store path")->capture_default_str();
  prot->add_option("--group-size", pcfg.group_size)->capture_default_str();
  prot->add_option("--stride", pcfg.stride, "N_W (0: same as G)")->capture_default_str();
  prot->add_option("--offset", pcfg.offset)->capture_default_str();
  prot->add_option("--width", pcfg.signature_width, "signature bits (2 or 3)")->capture_default_str();
  prot->add_option("--key-seed", pcfg.key_seed)->capture_default_str();
  prot->add_flag("--no-interleave", no_interleave, "disable interleaving");
  prot->callback([&] {
    pcfg.interleave = !no_interleave;
    const QuantizedModel model = load_model(prot_model);
    const GoldenSignatureStore store = protect(model, pcfg);
    save_store(store, prot_out);
    std::cout << "signed " << store.layers.size() << " layers, " << store.total_bits()
              << " signature bits (" << store.total_kb() << " KB)\n";
    std::cout << "wrote " << prot_out << "\n";
  });

  // ---- attack ----
  auto* att = app.add_subcommand("attack", "inject bit flips into a model");
  std::string att_model, att_test, att_out_model = "attacked.json",
                                   att_out_profile = "profile.json";
  std::string att_kind = "pbfa";
  size_t att_nbf = 10, att_k = 10, att_batch = 128, att_pairs = 10;
  uint32_t att_assumed_g = 8;
  uint64_t att_seed = 1;
  std::vector<int> att_bits = {0, 1, 2, 3, 4, 5, 6, 7};
  att->add_option("--model", att_model, "model (json)")->required();
  att->add_option("--kind", att_kind, "pbfa | random | paired")
      ->check(CLI::IsMember({"pbfa", "random", "paired"}))
      ->capture_default_str();
  att->add_option("--test", att_test, "dataset to draw the attack batch from (pbfa/paired)");
  att->add_option("--out-model", att_out_model)->capture_default_str();
  att->add_option("--out-profile", att_out_profile)->capture_default_str();
  att->add_option("--n-bf", att_nbf, "flips (pbfa/random)")->capture_default_str();
  att->add_option("--n-pairs", att_pairs, "flip pairs (paired)")->capture_default_str();
  att->add_option("--k", att_k)->capture_default_str();
  att->add_option("--batch-size", att_batch)->capture_default_str();
  att->add_option("--assumed-group", att_assumed_g, "attacker's guess at G (paired)")
      ->capture_default_str();
  att->add_option("--bits", att_bits, "allowed bit positions (pbfa)")
      ->delimiter(',')
      ->capture_default_str();
  att->add_option("--seed", att_seed)->capture_default_str();
  att->callback([&] {
    QuantizedModel model = load_model(att_model);
    AttackProfile profile;
    if (att_kind == "random") {
      profile = random_attack(model, att_nbf, att_seed);
    } else {
      if (att_test.empty())
        throw std::runtime_error("attack: --test is required for kind " + att_kind);
      const Dataset test = load_dataset(att_test);
      auto rng = make_rng(att_seed, "attack-batch");
      const Dataset batch = sample_batch(test, att_batch, rng);
      if (att_kind == "pbfa") {
        PbfaOptions opt;
        opt.n_bf = att_nbf;
        opt.k = att_k;
        opt.allowed_bits = att_bits;
        profile = pbfa(model, batch, opt);
      } else {
        PairedOptions opt;
        opt.n_pairs = att_pairs;
        opt.k = att_k;
        opt.assumed_group_size = att_assumed_g;
        profile = paired_attack(model, batch, opt);
      }
      profile.seed = att_seed;
    }
    save_model(model, att_out_model);
    save_profile(profile, att_out_profile);
    std::cout << "committed " << profile.flips.size() << " flip(s)";
    if (std::isfinite(profile.loss_before))
      std::cout << "; loss " << profile.loss_before << " -> " << profile.loss_after;
    if (profile.halted_early) std::cout << " (halted early)";
    std::cout << "\nwrote " << att_out_model << ", " << att_out_profile << "\n";
  });

  // ---- detect ----
  auto* det = app.add_subcommand("detect", "verify a model against its golden store");
  std::string det_model, det_store, det_profile, det_out;
  det->add_option("--model", det_model, "model (json)")->required();
  det->add_option("--store", det_store, "golden store (json)")->required();
  det->add_option("--profile", det_profile, "attack profile for ground-truth attribution");
  det->add_option("--out", det_out, "write a detection report (json)");
  det->callback([&] {
    const QuantizedModel model = load_model(det_model);
    const GoldenSignatureStore store = load_store(det_store);
    DetectionReport report;
    if (!det_profile.empty()) {
      const AttackProfile profile = load_profile(det_profile);
      const auto locs = profile.locations();
      report = detect(model, store, &locs);
      std::cout << "attributed " << report.detected_count << "/" << report.injected_count
                << " injected flip(s)\n";
    } else {
      report = detect(model, store);
    }
    if (!det_out.empty()) save_report(report, det_out);
    if (report.any_flagged()) {
      std::cout << describe_flags(report) << "\n";
      exit_code = 3;
    } else {
      std::cout << "clean: all signatures match\n";
    }
  });

  // ---- recover ----
  auto* rec = app.add_subcommand("recover", "zero flagged groups and write the repaired model");
  std::string rec_model, rec_store, rec_out = "recovered.json", rec_test;
  rec->add_option("--model", rec_model, "model (json)")->required();
  rec->add_option("--store", rec_store, "golden store (json)")->required();
  rec->add_option("--out", rec_out, "output model path")->capture_default_str();
  rec->add_option("--test", rec_test, "dataset for before/after accuracy report");
  rec->callback([&] {
    QuantizedModel model = load_model(rec_model);
    const GoldenSignatureStore store = load_store(rec_store);
    const DetectionReport report = detect(model, store);
    double before = -1.0;
    if (!rec_test.empty()) before = accuracy(model, load_dataset(rec_test));
    recover(model, report, store);
    save_model(model, rec_out);
    std::cout << describe_flags(report) << "; zeroed their weights\n";
    if (!rec_test.empty()) {
      const double after = accuracy(model, load_dataset(rec_test));
      std::cout << "accuracy " << before << " -> " << after << "\n";
    }
    std::cout << "wrote " << rec_out << "\n";
  });

  // ---- experiment ----
  auto* exp = app.add_subcommand("experiment", "run a full measurement suite");
  exp->require_subcommand(1);

  auto* sweep = exp->add_subcommand("detection-sweep", "mean detected flips per (G, interleave)");
  ExpFlags sweep_f;
  sweep_f.add_common(sweep, true);
  sweep_f.add_protection(sweep);
  sweep_f.add_attack(sweep);
  sweep->callback([&] {
    const QuantizedModel model = load_model(sweep_f.model_path);
    const Dataset test = load_dataset(sweep_f.test_path);
    const auto params = sweep_f.params();
    const auto profiles = pbfa_rounds(model, test, params);
    const auto rows = detection_sweep(model, profiles, params);
    save_csv(detection_sweep_csv(rows), sweep_f.out);
    for (const auto& r : rows)
      std::cout << "G=" << r.g << " interleave=" << r.interleave << " mean detected "
                << r.mean_detected << "/" << r.mean_injected << "\n";
    std::cout << "wrote " << sweep_f.out << "\n";
  });

  auto* recov = exp->add_subcommand("recovery-table", "attacked and recovered accuracy table");
  ExpFlags recov_f;
  recov_f.out = "recovery.csv";
  recov_f.add_common(recov, true);
  recov_f.add_protection(recov);
  recov_f.add_attack(recov);
  std::vector<size_t> recov_nbf = {5, 10};
  recov->add_option("--n-bf-values", recov_nbf, "attack sizes")->delimiter(',')->capture_default_str();
  recov->callback([&] {
    const QuantizedModel model = load_model(recov_f.model_path);
    const Dataset test = load_dataset(recov_f.test_path);
    ExperimentParams params = recov_f.params();
    params.n_bf = *std::max_element(recov_nbf.begin(), recov_nbf.end());
    const auto profiles = pbfa_rounds(model, test, params);
    const auto rows = recovery_table(model, test, profiles, recov_nbf, params);
    save_csv(recovery_table_csv(rows), recov_f.out);
    for (const auto& r : rows)
      std::cout << "G=" << r.g << " interleave=" << r.interleave << " n_bf=" << r.n_bf
                << " attacked " << r.mean_attacked_accuracy << " recovered "
                << r.mean_recovered_accuracy << " (clean " << r.clean_accuracy << ")\n";
    std::cout << "wrote " << recov_f.out << "\n";
  });

  auto* miss = exp->add_subcommand("miss-rate", "Monte Carlo detection miss rate");
  ExpFlags miss_f;
  miss_f.out = "miss_rate.csv";
  miss_f.rounds = 1000000;
  miss_f.g_values = {16, 32};
  miss_f.add_common(miss, false);
  miss_f.add_protection(miss);
  size_t miss_layer = 512, miss_flips = 10;
  miss->add_option("--layer-size", miss_layer)->capture_default_str();
  miss->add_option("--n-flips", miss_flips)->capture_default_str();
  miss->callback([&] {
    std::vector<MissRateResult> results;
    for (uint32_t g : miss_f.g_values) {
      const auto res = miss_rate(g, miss_f.rounds, miss_f.seed, miss_layer, miss_flips,
                                 miss_f.width, miss_f.offset);
      std::cout << "G=" << g << ": " << res.misses << "/" << res.rounds << " misses, rate "
                << res.rate << " [" << res.ci_low << ", " << res.ci_high << "]\n";
      results.push_back(res);
    }
    save_csv(miss_rate_csv(results), miss_f.out);
    std::cout << "wrote " << miss_f.out << "\n";
  });

  auto* coll = exp->add_subcommand("group-collision", "multi-flip proportion vs group size");
  ExpFlags coll_f;
  coll_f.out = "collision.csv";
  coll_f.g_values = {4, 8, 16, 32, 64, 128};
  coll_f.add_common(coll, true);
  coll_f.add_protection(coll);
  coll_f.add_attack(coll);
  std::string coll_profiles_dir;
  coll->add_option("--profiles", coll_profiles_dir,
                   "directory of saved profile_*.json (default: generate)");
  coll->callback([&] {
    const QuantizedModel model = load_model(coll_f.model_path);
    const auto params = coll_f.params();
    std::vector<AttackProfile> profiles;
    if (!coll_profiles_dir.empty()) {
      for (size_t r = 0;; ++r) {
        const std::string path = coll_profiles_dir + "/profile_" + std::to_string(r) + ".json";
        std::ifstream probe(path);
        if (!probe) break;
        profiles.push_back(load_profile(path));
      }
      if (profiles.empty())
        throw std::runtime_error("no profile_*.json files under " + coll_profiles_dir);
    } else {
      const Dataset test = load_dataset(coll_f.test_path);
      profiles = pbfa_rounds(model, test, params);
    }
    const auto rows = group_collision(profiles, model.layer_sizes(), params);
    save_csv(group_collision_csv(rows), coll_f.out);
    for (const auto& r : rows)
      std::cout << "G=" << r.g << " contiguous " << r.contiguous << " interleaved "
                << r.interleaved << "\n";
    std::cout << "wrote " << coll_f.out << "\n";
  });

  auto* know = exp->add_subcommand("knowledgeable", "checksum-aware attacker suites");
  ExpFlags know_f;
  know_f.out = "knowledgeable.csv";
  know_f.add_common(know, true);
  know_f.add_protection(know);
  know_f.add_attack(know);
  std::string know_damage_out = "equal_damage.csv";
  uint32_t know_g = 8;
  know->add_option("--group-size", know_g, "G under test")->capture_default_str();
  know->add_option("--damage-out", know_damage_out)->capture_default_str();
  know->callback([&] {
    const QuantizedModel model = load_model(know_f.model_path);
    const Dataset test = load_dataset(know_f.test_path);
    const auto res = knowledgeable(model, test, test, know_g, know_f.params());
    save_csv(knowledgeable_csv(res), know_f.out);
    save_csv(equal_damage_csv(res), know_damage_out);
    for (const auto& r : res.detection)
      std::cout << r.suite << " w=" << r.signature_width << " interleave=" << r.interleave
                << " detected " << r.mean_detected << "/" << r.mean_injected << "\n";
    for (const auto& r : res.damage)
      std::cout << "bit " << r.bit << " n_bf=" << r.n_bf << " attacked accuracy "
                << r.mean_attacked_accuracy << "\n";
    std::cout << "wrote " << know_f.out << ", " << know_damage_out << "\n";
  });

  auto* over = exp->add_subcommand("overhead", "storage tables and timing ratio");
  ExpFlags over_f;
  over_f.out = "overhead.csv";
  over_f.g_values = {8, 512};
  over_f.add_common(over, false);
  over_f.add_protection(over);
  std::vector<std::string> over_archs = {"resnet20", "resnet18"};
  std::vector<std::string> over_arch_csvs;
  std::string over_model, over_test, over_tradeoff;
  over->add_option("--arch", over_archs, "built-in architecture names")
      ->delimiter(',')
      ->capture_default_str();
  over->add_option("--arch-csv", over_arch_csvs, "extra architecture table files")->delimiter(',');
  over->add_option("--model", over_model, "toy model for tradeoff/timing (json)");
  over->add_option("--test", over_test, "dataset for tradeoff/timing (csv)");
  over->add_option("--tradeoff-out", over_tradeoff, "accuracy-vs-storage csv (needs model+test)");
  over->callback([&] {
    std::vector<ArchSpec> archs;
    for (const auto& name : over_archs) archs.push_back(arch_by_name(name));
    for (const auto& path : over_arch_csvs) archs.push_back(load_arch_csv(path));
    const std::vector<CrcSpec> crcs = {crc7_mmc(), crc13_primitive()};
    const auto rows = overhead_table(archs, over_f.g_values, crcs);
    save_csv(overhead_csv(rows), over_f.out);
    std::cout << "wrote " << over_f.out << " (" << rows.size() << " rows)\n";

    if (!over_model.empty() && !over_test.empty()) {
      const QuantizedModel model = load_model(over_model);
      const Dataset test = load_dataset(over_test);
      ExperimentParams params = over_f.params();
      if (!over_tradeoff.empty()) {
        const auto profiles = pbfa_rounds(model, test, params);
        const auto recovery = recovery_table(model, test, profiles, {params.n_bf}, params);
        CsvTable t;
        t.schema = "radar.tradeoff.v1";
        t.header = {"group_size", "interleave", "code", "width", "kb",
                    "mean_recovered_accuracy"};
        for (const auto& r : recovery) {
          const size_t bits = storage_overhead_bits(model.layer_sizes(),
                                                    r.g, params.signature_width);
          t.rows.push_back({fmt(static_cast<size_t>(r.g)), r.interleave ? "1" : "0",
                            "sig-" + std::to_string(params.signature_width),
                            fmt(static_cast<size_t>(params.signature_width)),
                            fmt(bits_to_kb(bits), 5), fmt(r.mean_recovered_accuracy)});
        }
        for (uint32_t g : params.g_values)
          for (const auto& crc : crcs) {
            const auto cmp = code_storage_compare(model.layer_sizes(), g,
                                                  params.signature_width, crc.width);
            t.rows.push_back({fmt(static_cast<size_t>(g)), "0", crc.name,
                              fmt(static_cast<size_t>(crc.width)), fmt(cmp.crc_kb, 5), "na"});
          }
        save_csv(t, over_tradeoff);
        std::cout << "wrote " << over_tradeoff << "\n";
      }
      const auto store = protect(model, params.protection(over_f.g_values.front(), true,
                                                          params.signature_width));
      const auto timing = measure_timing(model, test, store);
      std::cout << "informational timing: detection " << timing.detection_seconds
                << " s vs inference " << timing.inference_seconds << " s per pass (ratio "
                << timing.ratio << ")\n";
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}
