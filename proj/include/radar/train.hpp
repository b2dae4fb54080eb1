#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "radar/dataset.hpp"
#include "radar/model.hpp"
#include "radar/rng.hpp"
#include "radar/tensor.hpp"

namespace radar {

struct TrainConfig {
  std::vector<size_t> hidden = {32, 16};  // input -> hidden... -> classes
  size_t epochs = 30;
  size_t batch_size = 64;
  double lr = 1e-3;
  double weight_decay = 1e-4;
  uint64_t seed = 1;
};

namespace detail {

// Real-arithmetic net used only during training; quantization happens once
// at the end.
struct RealLayer {
  std::vector<double> w;  // out*in, row-major
  std::vector<double> b;
  size_t in = 0, out = 0;
};

struct RealNet {
  std::vector<RealLayer> layers;
};

inline void real_forward(const RealNet& net, const double* x, std::vector<std::vector<double>>& acts,
                         std::vector<double>& z_out) {
  acts[0].assign(x, x + net.layers.front().in);
  std::vector<double>* cur = &acts[0];
  for (size_t l = 0; l < net.layers.size(); ++l) {
    const RealLayer& layer = net.layers[l];
    std::vector<double> next(layer.out);
    for (size_t j = 0; j < layer.out; ++j) {
      const double* row = layer.w.data() + j * layer.in;
      double acc = layer.b[j];
      for (size_t i = 0; i < layer.in; ++i) acc += row[i] * (*cur)[i];
      next[j] = acc;
    }
    if (l + 1 < net.layers.size())
      for (auto& v : next) v = std::max(0.0, v);
    acts[l + 1] = std::move(next);
    cur = &acts[l + 1];
  }
  z_out = *cur;
}

}  // namespace detail

// Train a dense classifier in real arithmetic (Adam), then quantize each
// layer to 8 bits. Deterministic under a fixed seed; records the clean test
// accuracy as the model baseline.
inline QuantizedModel train_tiny(const TrainTestSplit& data, const TrainConfig& cfg) {
  const Dataset& train = data.train;
  if (train.num_classes < 2) throw std::invalid_argument("train_tiny: need >= 2 classes");
  if (train.rows == 0) throw std::invalid_argument("train_tiny: empty training set");

  std::vector<size_t> dims;
  dims.push_back(train.cols);
  for (size_t h : cfg.hidden) dims.push_back(h);
  dims.push_back(static_cast<size_t>(train.num_classes));

  auto rng = make_rng(cfg.seed, "train-init");
  std::normal_distribution<double> gauss(0.0, 1.0);

  detail::RealNet net;
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    detail::RealLayer layer;
    layer.in = dims[l];
    layer.out = dims[l + 1];
    layer.w.resize(layer.in * layer.out);
    layer.b.assign(layer.out, 0.0);
    const double std_dev = std::sqrt(2.0 / static_cast<double>(layer.in));
    for (auto& v : layer.w) v = std_dev * gauss(rng);
    net.layers.push_back(std::move(layer));
  }

  // Adam state
  struct Moments {
    std::vector<double> mw, vw, mb, vb;
  };
  std::vector<Moments> adam(net.layers.size());
  for (size_t l = 0; l < net.layers.size(); ++l) {
    adam[l].mw.assign(net.layers[l].w.size(), 0.0);
    adam[l].vw.assign(net.layers[l].w.size(), 0.0);
    adam[l].mb.assign(net.layers[l].b.size(), 0.0);
    adam[l].vb.assign(net.layers[l].b.size(), 0.0);
  }
  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  size_t step = 0;

  auto order_rng = make_rng(cfg.seed, "train-order");
  std::vector<size_t> order(train.rows);
  std::iota(order.begin(), order.end(), size_t{0});

  const size_t L = net.layers.size();
  std::vector<std::vector<double>> acts(L + 1);
  std::vector<double> z, delta, prev_delta;

  for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), order_rng);
    for (size_t start = 0; start < train.rows; start += cfg.batch_size) {
      const size_t end = std::min(train.rows, start + cfg.batch_size);
      const double inv_n = 1.0 / static_cast<double>(end - start);

      std::vector<std::vector<double>> gw(L), gb(L);
      for (size_t l = 0; l < L; ++l) {
        gw[l].assign(net.layers[l].w.size(), 0.0);
        gb[l].assign(net.layers[l].b.size(), 0.0);
      }
      double batch_loss = 0.0;

      for (size_t s = start; s < end; ++s) {
        const size_t r = order[s];
        detail::real_forward(net, train.row(r), acts, z);
        const double mx = *std::max_element(z.begin(), z.end());
        double sum = 0.0;
        for (double v : z) sum += std::exp(v - mx);
        batch_loss += (std::log(sum) - (z[train.labels[r]] - mx)) * inv_n;
        delta.resize(z.size());
        for (size_t j = 0; j < z.size(); ++j)
          delta[j] = (std::exp(z[j] - mx) / sum - (static_cast<int>(j) == train.labels[r])) * inv_n;

        for (size_t l = L; l-- > 0;) {
          const detail::RealLayer& layer = net.layers[l];
          const std::vector<double>& a = acts[l];
          for (size_t j = 0; j < layer.out; ++j) {
            const double d = delta[j];
            if (d == 0.0) continue;
            double* grow = gw[l].data() + j * layer.in;
            for (size_t i = 0; i < layer.in; ++i) grow[i] += d * a[i];
            gb[l][j] += d;
          }
          if (l == 0) break;
          prev_delta.assign(layer.in, 0.0);
          for (size_t j = 0; j < layer.out; ++j) {
            const double d = delta[j];
            if (d == 0.0) continue;
            const double* row = layer.w.data() + j * layer.in;
            for (size_t i = 0; i < layer.in; ++i) prev_delta[i] += d * row[i];
          }
          for (size_t i = 0; i < layer.in; ++i)
            if (acts[l][i] <= 0.0) prev_delta[i] = 0.0;
          delta = prev_delta;
        }
      }

      if (!std::isfinite(batch_loss))
        throw std::runtime_error("train_tiny: training diverged (non-finite loss at epoch " +
                                 std::to_string(epoch) + ")");

      ++step;
      const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
      for (size_t l = 0; l < L; ++l) {
        auto update = [&](std::vector<double>& p, std::vector<double>& g, std::vector<double>& mo,
                          std::vector<double>& ve, bool decay) {
          for (size_t i = 0; i < p.size(); ++i) {
            double grad = g[i] + (decay ? cfg.weight_decay * p[i] : 0.0);
            mo[i] = beta1 * mo[i] + (1.0 - beta1) * grad;
            ve[i] = beta2 * ve[i] + (1.0 - beta2) * grad * grad;
            p[i] -= cfg.lr * (mo[i] / bc1) / (std::sqrt(ve[i] / bc2) + eps);
          }
        };
        update(net.layers[l].w, gw[l], adam[l].mw, adam[l].vw, true);
        update(net.layers[l].b, gb[l], adam[l].mb, adam[l].vb, false);
      }
    }
  }

  QuantizedModel model;
  for (const auto& layer : net.layers) {
    DenseLayer q;
    q.weights = quantize(layer.w, {layer.out, layer.in});
    q.bias = layer.b;
    model.layers.push_back(std::move(q));
  }
  model.check();
  model.baseline_accuracy = accuracy(model, data.test);
  return model;
}

}  // namespace radar
