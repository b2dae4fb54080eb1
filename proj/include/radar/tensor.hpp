#pragma once
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace radar {

// Fixed-point tensor: 8-bit two's-complement integers plus one per-tensor
// scale. real_value = scale * integer.
struct QuantizedTensor {
  std::vector<int8_t> values;
  std::vector<size_t> shape;
  double scale = 1.0;

  size_t size() const { return values.size(); }

  size_t shape_product() const {
    size_t n = 1;
    for (size_t d : shape) n *= d;
    return n;
  }

  double dequant(size_t i) const { return scale * static_cast<double>(values[i]); }

  void check() const {
    if (shape_product() != values.size())
      throw std::invalid_argument("QuantizedTensor: shape does not match value count");
    if (!(scale > 0.0) || !std::isfinite(scale))
      throw std::invalid_argument("QuantizedTensor: scale must be positive and finite");
  }
};

// Symmetric per-tensor linear quantization: scale = max|w| / 127, integers
// rounded half away from zero and clamped to [-128, 127]. An all-zero tensor
// gets scale 1.
inline QuantizedTensor quantize(const std::vector<double>& w, std::vector<size_t> shape) {
  double maxabs = 0.0;
  for (double x : w) {
    if (!std::isfinite(x)) throw std::invalid_argument("quantize: non-finite input");
    maxabs = std::max(maxabs, std::fabs(x));
  }
  QuantizedTensor t;
  t.shape = std::move(shape);
  t.scale = (maxabs == 0.0) ? 1.0 : maxabs / 127.0;
  t.values.resize(w.size());
  for (size_t i = 0; i < w.size(); ++i) {
    double q = std::round(w[i] / t.scale);  // std::round = half away from zero
    q = std::min(127.0, std::max(-128.0, q));
    t.values[i] = static_cast<int8_t>(q);
  }
  t.check();
  return t;
}

inline std::vector<double> dequantize(const QuantizedTensor& t) {
  std::vector<double> out(t.values.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = t.dequant(i);
  return out;
}

}  // namespace radar
