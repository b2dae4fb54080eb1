#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "radar/rng.hpp"

namespace radar {

// Row-major sample matrix with integer class labels.
struct Dataset {
  std::vector<double> x;  // rows * cols
  std::vector<int> labels;
  size_t rows = 0;
  size_t cols = 0;
  int num_classes = 0;

  const double* row(size_t r) const { return x.data() + r * cols; }

  void check() const {
    if (x.size() != rows * cols) throw std::invalid_argument("Dataset: matrix size mismatch");
    if (labels.size() != rows) throw std::invalid_argument("Dataset: label count mismatch");
    for (int y : labels)
      if (y < 0 || y >= num_classes) throw std::invalid_argument("Dataset: label out of range");
  }
};

struct TrainTestSplit {
  Dataset train;
  Dataset test;
};

struct SyntheticSpec {
  size_t features = 64;
  int classes = 4;
  size_t train_samples = 2048;
  size_t test_samples = 1024;
  double separation = 10.0;  // distance of cluster centers from origin
  double sigma = 1.0;        // within-cluster standard deviation
  bool random_labels = false;
  uint64_t seed = 1;
};

// Gaussian cluster mixture: one unit-direction center per class scaled by
// `separation`, points drawn N(center, sigma^2 I). Classes are balanced
// (round-robin) and rows shuffled. Train and test are disjoint draws from
// the same stream.
inline TrainTestSplit make_synthetic(const SyntheticSpec& spec) {
  if (spec.classes < 2) throw std::invalid_argument("make_synthetic: need >= 2 classes");
  auto rng = make_rng(spec.seed, "synthetic-data");
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<std::vector<double>> centers(spec.classes, std::vector<double>(spec.features));
  for (auto& c : centers) {
    double norm2 = 0.0;
    for (auto& v : c) {
      v = gauss(rng);
      norm2 += v * v;
    }
    const double s = spec.separation / std::sqrt(std::max(norm2, 1e-300));
    for (auto& v : c) v *= s;
  }

  auto draw = [&](size_t n) {
    Dataset d;
    d.rows = n;
    d.cols = spec.features;
    d.num_classes = spec.classes;
    d.x.resize(n * spec.features);
    d.labels.resize(n);
    for (size_t i = 0; i < n; ++i) {
      const int cls = static_cast<int>(i % spec.classes);
      d.labels[i] = cls;
      for (size_t j = 0; j < spec.features; ++j)
        d.x[i * spec.features + j] = centers[cls][j] + spec.sigma * gauss(rng);
    }
    // row shuffle
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    Dataset out = d;
    for (size_t i = 0; i < n; ++i) {
      out.labels[i] = d.labels[order[i]];
      std::copy_n(d.row(order[i]), d.cols, out.x.begin() + i * d.cols);
    }
    if (spec.random_labels) {
      std::uniform_int_distribution<int> lab(0, spec.classes - 1);
      for (auto& y : out.labels) y = lab(rng);
    }
    return out;
  };

  TrainTestSplit split;
  split.train = draw(spec.train_samples);
  split.test = draw(spec.test_samples);
  return split;
}

inline Dataset subset(const Dataset& d, const std::vector<size_t>& idx) {
  Dataset out;
  out.rows = idx.size();
  out.cols = d.cols;
  out.num_classes = d.num_classes;
  out.x.resize(out.rows * out.cols);
  out.labels.resize(out.rows);
  for (size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= d.rows) throw std::out_of_range("subset: row index out of range");
    std::copy_n(d.row(idx[i]), d.cols, out.x.begin() + i * d.cols);
    out.labels[i] = d.labels[idx[i]];
  }
  return out;
}

// n rows drawn without replacement.
inline Dataset sample_batch(const Dataset& d, size_t n, std::mt19937_64& rng) {
  n = std::min(n, d.rows);
  std::vector<size_t> order(d.rows);
  std::iota(order.begin(), order.end(), size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(n);
  return subset(d, order);
}

}  // namespace radar
