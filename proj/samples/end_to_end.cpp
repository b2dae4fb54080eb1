// Full defense loop in one sitting: synthesize data, train the toy
// classifier, sign its weights, attack it, then detect and recover.

#include <iostream>

#include "radar/radar.hpp"

int main() {
  using namespace radar;

  SyntheticSpec synth;
  synth.seed = 7;
  const TrainTestSplit data = make_synthetic(synth);

  // Wide enough that no single weight is irreplaceable: recovery zeroes whole
  // groups, and the spare capacity is what absorbs that collateral.
  TrainConfig tcfg;
  tcfg.epochs = 20;
  tcfg.hidden = {64, 32};
  QuantizedModel model = train_tiny(data, tcfg);
  std::cout << "clean test accuracy: " << model.baseline_accuracy << "\n";

  // Small groups keep the flagged regions — and so the zeroing collateral —
  // tight on a net this small; production group sizes scale with the model.
  ProtectionConfig pcfg;
  pcfg.group_size = 2;
  pcfg.key_seed = 99;
  const GoldenSignatureStore store = protect(model, pcfg);
  std::cout << "golden store: " << store.total_bits() << " bits for " << model.total_weights()
            << " weights\n";

  auto rng = make_rng(7, "sample-batch");
  const Dataset batch = sample_batch(data.test, 128, rng);
  // Sign-bit flips are the setting the signature is designed for: each one
  // shifts a masked group sum by +-128, which the two signature bits always see.
  const AttackProfile profile = restricted_pbfa(model, batch, 6, {kMsb});
  std::cout << "attack committed " << profile.flips.size() << " sign-bit flips, loss "
            << profile.loss_before << " -> " << profile.loss_after << "\n";
  std::cout << "attacked accuracy: " << accuracy(model, data.test) << "\n";

  const auto locs = profile.locations();
  const DetectionReport report = detect(model, store, &locs);
  std::cout << "detected " << report.detected_count << "/" << report.injected_count
            << " flips in " << report.flagged_group_count() << " flagged groups\n";

  recover(model, report, store);
  std::cout << "recovered accuracy: " << accuracy(model, data.test) << "\n";
  return 0;
}
