#pragma once
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace radar {

// Weight-bearing layer sizes of a reference architecture, in forward
// order, for storage accounting. Biases and batch-norm parameters are not
// checksummed and are excluded throughout.
struct ArchSpec {
  std::string name;
  std::vector<size_t> layer_sizes;

  size_t total_weights() const {
    return std::accumulate(layer_sizes.begin(), layer_sizes.end(), size_t{0});
  }
};

// CIFAR-style 20-layer residual net, identity (parameter-free) shortcuts:
// 3x3 convs only plus the final linear layer. 268,336 weights.
inline ArchSpec resnet20_arch() {
  ArchSpec a;
  a.name = "resnet20";
  a.layer_sizes.push_back(3 * 16 * 3 * 3);  // stem
  for (int i = 0; i < 6; ++i) a.layer_sizes.push_back(16 * 16 * 3 * 3);
  a.layer_sizes.push_back(16 * 32 * 3 * 3);
  a.layer_sizes.push_back(32 * 32 * 3 * 3);
  for (int i = 0; i < 4; ++i) a.layer_sizes.push_back(32 * 32 * 3 * 3);
  a.layer_sizes.push_back(32 * 64 * 3 * 3);
  a.layer_sizes.push_back(64 * 64 * 3 * 3);
  for (int i = 0; i < 4; ++i) a.layer_sizes.push_back(64 * 64 * 3 * 3);
  a.layer_sizes.push_back(64 * 10);  // classifier
  return a;
}

// ImageNet-style 18-layer residual net with 1x1 projection shortcuts at
// each stage transition. 11,678,912 weights.
inline ArchSpec resnet18_arch() {
  ArchSpec a;
  a.name = "resnet18";
  a.layer_sizes.push_back(3 * 64 * 7 * 7);  // stem
  for (int i = 0; i < 4; ++i) a.layer_sizes.push_back(64 * 64 * 3 * 3);
  a.layer_sizes.push_back(64 * 128 * 3 * 3);
  a.layer_sizes.push_back(128 * 128 * 3 * 3);
  a.layer_sizes.push_back(64 * 128 * 1 * 1);  // projection
  a.layer_sizes.push_back(128 * 128 * 3 * 3);
  a.layer_sizes.push_back(128 * 128 * 3 * 3);
  a.layer_sizes.push_back(128 * 256 * 3 * 3);
  a.layer_sizes.push_back(256 * 256 * 3 * 3);
  a.layer_sizes.push_back(128 * 256 * 1 * 1);  // projection
  a.layer_sizes.push_back(256 * 256 * 3 * 3);
  a.layer_sizes.push_back(256 * 256 * 3 * 3);
  a.layer_sizes.push_back(256 * 512 * 3 * 3);
  a.layer_sizes.push_back(512 * 512 * 3 * 3);
  a.layer_sizes.push_back(256 * 512 * 1 * 1);  // projection
  a.layer_sizes.push_back(512 * 512 * 3 * 3);
  a.layer_sizes.push_back(512 * 512 * 3 * 3);
  a.layer_sizes.push_back(512 * 1000);  // classifier
  return a;
}

inline ArchSpec arch_by_name(const std::string& name) {
  if (name == "resnet20") return resnet20_arch();
  if (name == "resnet18") return resnet18_arch();
  throw std::invalid_argument("unknown architecture: " + name);
}

// CSV form: a "# radar-arch v1" magic line, a header, then layer,weights
// rows. Lets the overhead tooling run on architectures we don't hardcode.
inline void save_arch_csv(const ArchSpec& arch, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# radar-arch v1\n";
  out << "name," << arch.name << "\n";
  out << "layer,weights\n";
  for (size_t i = 0; i < arch.layer_sizes.size(); ++i)
    out << i << "," << arch.layer_sizes[i] << "\n";
}

inline ArchSpec load_arch_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(in, line) || line != "# radar-arch v1")
    throw std::runtime_error(path + ": not an architecture table (bad magic line)");
  ArchSpec arch;
  if (!std::getline(in, line) || line.rfind("name,", 0) != 0)
    throw std::runtime_error(path + ": missing name row");
  arch.name = line.substr(5);
  if (!std::getline(in, line) || line != "layer,weights")
    throw std::runtime_error(path + ": missing header row");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error(path + ": malformed row: " + line);
    const size_t weights = std::stoull(line.substr(comma + 1));
    if (weights == 0) throw std::runtime_error(path + ": zero-weight layer");
    arch.layer_sizes.push_back(weights);
  }
  if (arch.layer_sizes.empty()) throw std::runtime_error(path + ": no layers");
  return arch;
}

}  // namespace radar
