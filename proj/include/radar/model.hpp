#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "radar/dataset.hpp"
#include "radar/int8.hpp"
#include "radar/tensor.hpp"

namespace radar {

// Dense layer with 8-bit weights: weights shape {out, in}, row-major.
// Biases stay in real arithmetic (only weights are the protected asset).
struct DenseLayer {
  QuantizedTensor weights;
  std::vector<double> bias;

  size_t out_dim() const { return weights.shape.at(0); }
  size_t in_dim() const { return weights.shape.at(1); }
};

// Feedforward classifier: dense layers with ReLU between them and softmax
// cross-entropy at the output. Forward on fixed weights is bit-reproducible.
struct QuantizedModel {
  std::vector<DenseLayer> layers;
  double baseline_accuracy = -1.0;  // clean test accuracy recorded at training time

  size_t num_layers() const { return layers.size(); }
  size_t input_dim() const { return layers.front().in_dim(); }
  size_t output_dim() const { return layers.back().out_dim(); }

  size_t layer_size(size_t l) const { return layers.at(l).weights.size(); }

  size_t total_weights() const {
    size_t n = 0;
    for (const auto& l : layers) n += l.weights.size();
    return n;
  }

  std::vector<size_t> layer_sizes() const {
    std::vector<size_t> s;
    s.reserve(layers.size());
    for (const auto& l : layers) s.push_back(l.weights.size());
    return s;
  }

  void check() const {
    if (layers.empty()) throw std::invalid_argument("QuantizedModel: no layers");
    for (size_t l = 0; l < layers.size(); ++l) {
      layers[l].weights.check();
      if (layers[l].weights.shape.size() != 2)
        throw std::invalid_argument("QuantizedModel: dense weights must be rank 2");
      if (layers[l].bias.size() != layers[l].out_dim())
        throw std::invalid_argument("QuantizedModel: bias width mismatch");
      if (l + 1 < layers.size() && layers[l].out_dim() != layers[l + 1].in_dim())
        throw std::invalid_argument("QuantizedModel: layer width chain broken");
    }
  }
};

// logits = forward(x) for one sample; scratch holds per-layer activations
// when a gradient pass will follow.
namespace detail {

inline void forward_sample(const QuantizedModel& m, const double* x,
                           std::vector<std::vector<double>>* activations,
                           std::vector<double>& out) {
  thread_local std::vector<double> bufa, bufb;
  const std::vector<double>* cur = nullptr;
  bufa.assign(x, x + m.input_dim());
  cur = &bufa;
  if (activations) (*activations)[0] = bufa;
  for (size_t l = 0; l < m.num_layers(); ++l) {
    const DenseLayer& layer = m.layers[l];
    const size_t in = layer.in_dim(), out_n = layer.out_dim();
    std::vector<double>& next = (cur == &bufa) ? bufb : bufa;
    next.assign(out_n, 0.0);
    const int8_t* w = layer.weights.values.data();
    const double scale = layer.weights.scale;
    for (size_t j = 0; j < out_n; ++j) {
      const int8_t* row = w + j * in;
      double acc = 0.0;
      for (size_t i = 0; i < in; ++i) acc += static_cast<double>(row[i]) * (*cur)[i];
      next[j] = scale * acc + layer.bias[j];
    }
    if (l + 1 < m.num_layers())
      for (auto& v : next) v = std::max(0.0, v);  // ReLU on hidden layers
    cur = &next;
    if (activations) (*activations)[l + 1] = next;
  }
  out = *cur;
}

}  // namespace detail

// Batch forward: one logits row per input row, order preserving.
inline std::vector<std::vector<double>> forward(const QuantizedModel& m, const Dataset& batch) {
  m.check();
  if (batch.cols != m.input_dim())
    throw std::invalid_argument("forward: input width " + std::to_string(batch.cols) +
                                " does not match first layer " + std::to_string(m.input_dim()));
  std::vector<std::vector<double>> logits(batch.rows);
  for (size_t r = 0; r < batch.rows; ++r)
    detail::forward_sample(m, batch.row(r), nullptr, logits[r]);
  return logits;
}

// Mean softmax cross-entropy of a batch, without gradients.
inline double loss(const QuantizedModel& m, const Dataset& batch) {
  if (batch.rows == 0) throw std::invalid_argument("loss: empty batch");
  if (batch.cols != m.input_dim()) throw std::invalid_argument("loss: input width mismatch");
  double total = 0.0;
  std::vector<double> z;
  for (size_t r = 0; r < batch.rows; ++r) {
    detail::forward_sample(m, batch.row(r), nullptr, z);
    const double mx = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - mx);
    total += std::log(sum) - (z[batch.labels[r]] - mx);
  }
  return total / static_cast<double>(batch.rows);
}

struct LossGrad {
  double loss = 0.0;
  // Gradient of the mean loss w.r.t. each dequantized weight, aligned with
  // the layer's flattened weights. Gradient w.r.t. the integer weight is
  // this value times the layer scale.
  std::vector<std::vector<double>> weight_grads;
};

inline LossGrad loss_and_grad(const QuantizedModel& m, const Dataset& batch) {
  m.check();
  if (batch.rows == 0) throw std::invalid_argument("loss_and_grad: empty batch");
  if (batch.cols != m.input_dim())
    throw std::invalid_argument("loss_and_grad: input width mismatch");

  const size_t L = m.num_layers();
  LossGrad out;
  out.weight_grads.resize(L);
  for (size_t l = 0; l < L; ++l) out.weight_grads[l].assign(m.layer_size(l), 0.0);

  std::vector<std::vector<double>> acts(L + 1);  // acts[l] = input of layer l
  std::vector<double> z, delta, prev_delta;
  const double inv_n = 1.0 / static_cast<double>(batch.rows);

  for (size_t r = 0; r < batch.rows; ++r) {
    detail::forward_sample(m, batch.row(r), &acts, z);

    // softmax - onehot, scaled by 1/n for the batch mean
    const double mx = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - mx);
    out.loss += (std::log(sum) - (z[batch.labels[r]] - mx)) * inv_n;
    delta.resize(z.size());
    for (size_t j = 0; j < z.size(); ++j)
      delta[j] = (std::exp(z[j] - mx) / sum - (static_cast<int>(j) == batch.labels[r])) * inv_n;

    for (size_t l = L; l-- > 0;) {
      const DenseLayer& layer = m.layers[l];
      const size_t in = layer.in_dim(), out_n = layer.out_dim();
      const std::vector<double>& a = acts[l];
      double* g = out.weight_grads[l].data();
      for (size_t j = 0; j < out_n; ++j) {
        const double d = delta[j];
        if (d == 0.0) continue;
        double* grow = g + j * in;
        for (size_t i = 0; i < in; ++i) grow[i] += d * a[i];
      }
      if (l == 0) break;
      // propagate through dequantized weights, then the ReLU gate
      prev_delta.assign(in, 0.0);
      const int8_t* w = layer.weights.values.data();
      const double scale = layer.weights.scale;
      for (size_t j = 0; j < out_n; ++j) {
        const double d = delta[j] * scale;
        if (d == 0.0) continue;
        const int8_t* row = w + j * in;
        for (size_t i = 0; i < in; ++i) prev_delta[i] += d * static_cast<double>(row[i]);
      }
      for (size_t i = 0; i < in; ++i)
        if (acts[l][i] <= 0.0) prev_delta[i] = 0.0;
      delta = prev_delta;
    }
  }
  return out;
}

// Toggle one bit of one weight; every other piece of state is untouched.
// Flipping the same address twice restores the model.
inline FlipDirection flip_bit(QuantizedModel& m, size_t layer, size_t flat_index, int bit) {
  if (layer >= m.num_layers()) throw std::out_of_range("flip_bit: layer out of range");
  if (bit < 0 || bit >= kWeightBits) throw std::out_of_range("flip_bit: bit position out of range");
  auto& values = m.layers[layer].weights.values;
  if (flat_index >= values.size()) throw std::out_of_range("flip_bit: weight index out of range");
  const int8_t pre = values[flat_index];
  values[flat_index] = toggle_bit(pre, bit);
  return flip_direction(pre, bit);
}

// Fraction of argmax-correct predictions; ties break to the lowest class.
inline double accuracy(const QuantizedModel& m, const Dataset& split) {
  if (split.rows == 0) throw std::invalid_argument("accuracy: empty split");
  if (split.cols != m.input_dim()) throw std::invalid_argument("accuracy: input width mismatch");
  size_t correct = 0;
  std::vector<double> z;
  for (size_t r = 0; r < split.rows; ++r) {
    detail::forward_sample(m, split.row(r), nullptr, z);
    size_t arg = 0;
    for (size_t j = 1; j < z.size(); ++j)
      if (z[j] > z[arg]) arg = j;
    if (static_cast<int>(arg) == split.labels[r]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(split.rows);
}

}  // namespace radar
