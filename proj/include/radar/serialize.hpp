#pragma once
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "radar/attack.hpp"
#include "radar/codec.hpp"
#include "radar/dataset.hpp"
#include "radar/model.hpp"

namespace radar {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Small encoding helpers
// ---------------------------------------------------------------------------

namespace detail {

inline const char* b64_alphabet() {
  return "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

inline std::string b64_encode(const uint8_t* data, size_t len) {
  const char* tab = b64_alphabet();
  std::string out;
  out.reserve((len + 2) / 3 * 4);
  for (size_t i = 0; i < len; i += 3) {
    uint32_t v = static_cast<uint32_t>(data[i]) << 16;
    if (i + 1 < len) v |= static_cast<uint32_t>(data[i + 1]) << 8;
    if (i + 2 < len) v |= data[i + 2];
    out.push_back(tab[(v >> 18) & 63]);
    out.push_back(tab[(v >> 12) & 63]);
    out.push_back(i + 1 < len ? tab[(v >> 6) & 63] : '=');
    out.push_back(i + 2 < len ? tab[v & 63] : '=');
  }
  return out;
}

inline std::vector<uint8_t> b64_decode(const std::string& text) {
  std::array<int8_t, 256> rev;
  rev.fill(-1);
  const char* tab = b64_alphabet();
  for (int i = 0; i < 64; ++i) rev[static_cast<uint8_t>(tab[i])] = static_cast<int8_t>(i);
  std::vector<uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  uint32_t acc = 0;
  int bits = 0;
  for (char c : text) {
    if (c == '=' || c == '\n' || c == '\r') continue;
    const int8_t v = rev[static_cast<uint8_t>(c)];
    if (v < 0) throw std::runtime_error("base64: invalid character");
    acc = (acc << 6) | static_cast<uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<uint8_t>((acc >> bits) & 0xFF));
    }
  }
  return out;
}

inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline double number_or_nan(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j[key].get<double>();
}

inline json load_json_file(const std::string& path, const char* expected_format) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  if (j.value("format", "") != expected_format)
    throw std::runtime_error(path + ": expected format \"" + expected_format + "\"");
  return j;
}

inline void save_json_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Model
// ---------------------------------------------------------------------------

inline void save_model(const QuantizedModel& model, const std::string& path) {
  model.check();
  json j;
  j["format"] = "radar-model";
  j["version"] = 1;
  if (model.baseline_accuracy >= 0.0) j["meta"]["baseline_accuracy"] = model.baseline_accuracy;
  j["layers"] = json::array();
  for (const auto& layer : model.layers) {
    json lj;
    lj["shape"] = layer.weights.shape;
    lj["scale"] = layer.weights.scale;
    lj["weights_b64"] = detail::b64_encode(
        reinterpret_cast<const uint8_t*>(layer.weights.values.data()), layer.weights.values.size());
    lj["bias"] = layer.bias;
    j["layers"].push_back(std::move(lj));
  }
  detail::save_json_file(j, path);
}

inline QuantizedModel load_model(const std::string& path) {
  const json j = detail::load_json_file(path, "radar-model");
  QuantizedModel model;
  model.baseline_accuracy = j.contains("meta")
                                ? j["meta"].value("baseline_accuracy", -1.0)
                                : -1.0;
  for (const auto& lj : j.at("layers")) {
    DenseLayer layer;
    layer.weights.shape = lj.at("shape").get<std::vector<size_t>>();
    layer.weights.scale = lj.at("scale").get<double>();
    const auto bytes = detail::b64_decode(lj.at("weights_b64").get<std::string>());
    layer.weights.values.assign(reinterpret_cast<const int8_t*>(bytes.data()),
                                reinterpret_cast<const int8_t*>(bytes.data()) + bytes.size());
    layer.bias = lj.at("bias").get<std::vector<double>>();
    model.layers.push_back(std::move(layer));
  }
  model.check();
  return model;
}

// ---------------------------------------------------------------------------
// Dataset
// ---------------------------------------------------------------------------

inline void save_dataset(const Dataset& d, const std::string& path) {
  d.check();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# radar-dataset v1\n";
  out << "# classes," << d.num_classes << "\n";
  for (size_t c = 0; c < d.cols; ++c) out << "f" << c << ",";
  out << "label\n";
  out.precision(17);
  for (size_t r = 0; r < d.rows; ++r) {
    const double* row = d.row(r);
    for (size_t c = 0; c < d.cols; ++c) out << row[c] << ",";
    out << d.labels[r] << "\n";
  }
}

inline Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(in, line) || line != "# radar-dataset v1")
    throw std::runtime_error(path + ": not a dataset file (bad magic line)");
  if (!std::getline(in, line) || line.rfind("# classes,", 0) != 0)
    throw std::runtime_error(path + ": missing classes line");
  Dataset d;
  d.num_classes = std::stoi(line.substr(10));
  if (!std::getline(in, line)) throw std::runtime_error(path + ": missing header");
  d.cols = static_cast<size_t>(std::count(line.begin(), line.end(), ','));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != d.cols + 1)
      throw std::runtime_error(path + ": row has " + std::to_string(cells.size()) +
                               " cells, expected " + std::to_string(d.cols + 1));
    for (size_t c = 0; c < d.cols; ++c) d.x.push_back(std::stod(cells[c]));
    d.labels.push_back(std::stoi(cells.back()));
    ++d.rows;
  }
  d.check();
  return d;
}

// ---------------------------------------------------------------------------
// Golden signature store
// ---------------------------------------------------------------------------

namespace detail {

// Signatures pack densely: signature j of width w occupies stream bits
// [j*w, (j+1)*w), low value bit first, and stream bit k lives at bit k%8
// of byte k/8.
inline std::vector<uint8_t> pack_signatures(const std::vector<Signature>& sigs, int width) {
  std::vector<uint8_t> bytes((sigs.size() * width + 7) / 8, 0);
  for (size_t j = 0; j < sigs.size(); ++j)
    for (int b = 0; b < width; ++b)
      if ((sigs[j].value >> b) & 1) {
        const size_t k = j * width + b;
        bytes[k / 8] |= static_cast<uint8_t>(1u << (k % 8));
      }
  return bytes;
}

inline std::vector<Signature> unpack_signatures(const std::vector<uint8_t>& bytes, size_t count,
                                                int width) {
  if (bytes.size() < (count * width + 7) / 8)
    throw std::runtime_error("signature blob shorter than declared group count");
  std::vector<Signature> sigs(count);
  for (size_t j = 0; j < count; ++j) {
    uint8_t v = 0;
    for (int b = 0; b < width; ++b) {
      const size_t k = j * width + b;
      if ((bytes[k / 8] >> (k % 8)) & 1) v |= static_cast<uint8_t>(1u << b);
    }
    sigs[j] = Signature{v, static_cast<uint8_t>(width)};
  }
  return sigs;
}

inline json protection_to_json(const LayerProtection& p) {
  return json{{"group_size", p.group_size}, {"stride", p.stride},
              {"offset", p.offset},         {"key", p.key},
              {"signature_width", p.signature_width}, {"interleave", p.interleave}};
}

inline LayerProtection protection_from_json(const json& j) {
  LayerProtection p;
  p.group_size = j.at("group_size").get<uint32_t>();
  p.stride = j.at("stride").get<uint32_t>();
  p.offset = j.at("offset").get<uint32_t>();
  p.key = j.at("key").get<uint16_t>();
  p.signature_width = j.at("signature_width").get<int>();
  p.interleave = j.at("interleave").get<bool>();
  p.check();
  return p;
}

}  // namespace detail

inline void save_store(const GoldenSignatureStore& store, const std::string& path) {
  json j;
  j["format"] = "radar-store";
  j["version"] = 1;
  j["key_seed"] = store.key_seed;
  j["layers"] = json::array();
  for (const auto& l : store.layers) {
    const auto bytes = detail::pack_signatures(l.sigs, l.cfg.signature_width);
    j["layers"].push_back(json{{"layer_size", l.layer_size},
                               {"groups", l.sigs.size()},
                               {"cfg", detail::protection_to_json(l.cfg)},
                               {"signatures_b64", detail::b64_encode(bytes.data(), bytes.size())}});
  }
  detail::save_json_file(j, path);
}

inline GoldenSignatureStore load_store(const std::string& path) {
  const json j = detail::load_json_file(path, "radar-store");
  GoldenSignatureStore store;
  store.key_seed = j.at("key_seed").get<uint64_t>();
  for (const auto& lj : j.at("layers")) {
    LayerSignatures ls;
    ls.cfg = detail::protection_from_json(lj.at("cfg"));
    ls.layer_size = lj.at("layer_size").get<uint32_t>();
    const auto bytes = detail::b64_decode(lj.at("signatures_b64").get<std::string>());
    ls.sigs = detail::unpack_signatures(bytes, lj.at("groups").get<size_t>(),
                                        ls.cfg.signature_width);
    store.layers.push_back(std::move(ls));
  }
  return store;
}

// ---------------------------------------------------------------------------
// Attack profile
// ---------------------------------------------------------------------------

inline void save_profile(const AttackProfile& p, const std::string& path) {
  json j;
  j["format"] = "radar-attack";
  j["version"] = 1;
  j["kind"] = p.kind;
  j["seed"] = p.seed;
  j["requested"] = p.requested;
  j["loss_before"] = detail::finite_or_null(p.loss_before);
  j["loss_after"] = detail::finite_or_null(p.loss_after);
  j["halted_early"] = p.halted_early;
  j["unpaired"] = p.unpaired;
  j["flips"] = json::array();
  for (const auto& f : p.flips)
    j["flips"].push_back(json{{"layer", f.layer},
                              {"index", f.flat_index},
                              {"bit", f.bit},
                              {"direction", to_string(f.direction)},
                              {"pre", static_cast<int>(f.pre_flip_weight)},
                              {"loss_after", detail::finite_or_null(f.loss_after)},
                              {"companion", f.companion}});
  detail::save_json_file(j, path);
}

inline AttackProfile load_profile(const std::string& path) {
  const json j = detail::load_json_file(path, "radar-attack");
  AttackProfile p;
  p.kind = j.at("kind").get<std::string>();
  p.seed = j.at("seed").get<uint64_t>();
  p.requested = j.at("requested").get<size_t>();
  p.loss_before = detail::number_or_nan(j, "loss_before");
  p.loss_after = detail::number_or_nan(j, "loss_after");
  p.halted_early = j.at("halted_early").get<bool>();
  p.unpaired = j.at("unpaired").get<size_t>();
  for (const auto& fj : j.at("flips")) {
    BitFlip f;
    f.layer = fj.at("layer").get<size_t>();
    f.flat_index = fj.at("index").get<size_t>();
    f.bit = fj.at("bit").get<int>();
    const std::string dir = fj.at("direction").get<std::string>();
    if (dir == "0to1")
      f.direction = FlipDirection::ZeroToOne;
    else if (dir == "1to0")
      f.direction = FlipDirection::OneToZero;
    else
      throw std::runtime_error(path + ": bad direction \"" + dir + "\"");
    f.pre_flip_weight = static_cast<int8_t>(fj.at("pre").get<int>());
    f.loss_after = detail::number_or_nan(fj, "loss_after");
    f.companion = fj.at("companion").get<bool>();
    p.flips.push_back(f);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Detection report
// ---------------------------------------------------------------------------

inline void save_report(const DetectionReport& r, const std::string& path) {
  json j;
  j["format"] = "radar-report";
  j["version"] = 1;
  j["flagged"] = r.flagged;
  j["flagged_group_count"] = r.flagged_group_count();
  j["injected"] = r.injected_count;
  j["detected"] = r.detected_count;
  j["attributions"] = json::array();
  for (const auto& a : r.attributions)
    j["attributions"].push_back(json{{"layer", a.flip.layer},
                                     {"index", a.flip.flat_index},
                                     {"bit", a.flip.bit},
                                     {"group", a.group},
                                     {"detected", a.detected}});
  detail::save_json_file(j, path);
}

// ---------------------------------------------------------------------------
// Results tables
// ---------------------------------------------------------------------------

struct CsvTable {
  std::string schema;  // e.g. "radar.detection-sweep.v1"
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline void save_csv(const CsvTable& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# schema: " << t.schema << "\n";
  for (size_t c = 0; c < t.header.size(); ++c)
    out << t.header[c] << (c + 1 < t.header.size() ? "," : "");
  out << "\n";
  for (const auto& row : t.rows) {
    if (row.size() != t.header.size())
      throw std::logic_error("csv row width " + std::to_string(row.size()) + " != header width " +
                             std::to_string(t.header.size()));
    for (size_t c = 0; c < row.size(); ++c) out << row[c] << (c + 1 < row.size() ? "," : "");
    out << "\n";
  }
}

inline std::string fmt(double v, int precision = 6) {
  std::ostringstream ss;
  ss.precision(precision);
  ss << v;
  return ss.str();
}

inline std::string fmt(size_t v) { return std::to_string(v); }

}  // namespace radar
