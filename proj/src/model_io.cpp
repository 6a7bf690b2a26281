// Copyright 2026 The goalpred Authors
// SPDX-License-Identifier: Apache-2.0

// Binary model container. Layout is documented in docs/model_format.md.

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "goalpred/error.hpp"
#include "goalpred/lstm.hpp"

namespace goalpred {

static_assert(std::endian::native == std::endian::little, "model I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'G', 'P', 'L', 'S', 'T', 'M', '\r', '\n'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  template <typename T>
  void pod(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void u32(std::size_t v) { pod(static_cast<std::uint32_t>(v)); }
  void f64(double v) { pod(v); }
  void str(std::string_view s) {
    u32(s.size());
    out_.append(s);
  }
  void tensor(std::string_view name, const double* data, std::size_t rows, std::size_t cols) {
    str(name);
    u32(rows);
    u32(cols);
    out_.append(reinterpret_cast<const char*>(data), rows * cols * sizeof(double));
  }
  std::string& bytes() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  template <typename T>
  T pod() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, in_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::uint32_t u32() { return pod<std::uint32_t>(); }
  double f64() { return pod<double>(); }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  void tensor(std::string_view name, double* data, std::size_t rows, std::size_t cols) {
    const std::string got = str();
    if (got != name) corrupt("expected tensor '" + std::string(name) + "', found '" + got + "'");
    const std::uint32_t r = u32();
    const std::uint32_t c = u32();
    if (r != rows || c != cols) {
      corrupt("tensor '" + got + "' has shape " + std::to_string(r) + "x" + std::to_string(c) +
              ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
    }
    const std::size_t n = rows * cols * sizeof(double);
    need(n);
    std::memcpy(data, in_.data() + pos_, n);
    pos_ += n;
  }
  std::size_t position() const { return pos_; }
  [[noreturn]] static void corrupt(const std::string& what) {
    throw Error(ErrorKind::parse, "corrupt model file: " + what);
  }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) corrupt("truncated at byte " + std::to_string(pos_));
  }

  std::string_view in_;
  std::size_t pos_ = 0;
};

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

std::string serialize_model(const TrainedModel& model) {
  const NetworkConfig& net = model.network();
  const std::size_t h = net.hidden_units;
  const std::size_t f = net.input_size;
  if (model.features.channels.size() != f || model.norm.mean.size() != f) {
    throw Error(ErrorKind::numeric, "model channels, normalizer and network input size disagree");
  }
  Writer w;
  w.bytes().append(kMagic, sizeof kMagic);
  w.u32(kVersion);
  w.str(model.variant);
  w.u32(f);
  w.u32(h);
  w.u32(NetworkConfig::kClasses);
  w.u32(model.features.channels.size());
  for (FeatureChannel c : model.features.channels) w.str(channel_name(c));
  w.f64(model.features.gaze_fix_threshold_m);
  w.str(gaze_distance_name(model.features.gaze_distance));
  w.u32(model.buffer_len.value_or(0));
  w.pod<std::uint8_t>(model.enhanced ? 1 : 0);
  const EnhancedConfig enhanced = model.enhanced.value_or(EnhancedConfig{});
  w.f64(enhanced.score_threshold);
  w.f64(enhanced.gaze_threshold);
  for (double m : model.norm.mean) w.f64(m);
  const LstmParams& p = model.params;
  w.u32(5);
  w.tensor("input_weights", p.input_weights().data(), 4 * h, f);
  w.tensor("recurrent_weights", p.recurrent_weights().data(), 4 * h, h);
  w.tensor("gate_bias", p.gate_bias().data(), 4 * h, 1);
  w.tensor("dense_weights", p.dense_weights().data(), NetworkConfig::kClasses, h);
  w.tensor("dense_bias", p.dense_bias().data(), NetworkConfig::kClasses, 1);
  const std::uint64_t checksum = fnv1a(w.bytes());
  w.pod(checksum);
  return std::move(w.bytes());
}

TrainedModel deserialize_model(std::string_view bytes) {
  if (bytes.size() < sizeof kMagic || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    Reader::corrupt("bad magic");
  }
  if (bytes.size() < sizeof kMagic + sizeof(std::uint64_t)) Reader::corrupt("truncated");
  const std::string_view body = bytes.substr(0, bytes.size() - sizeof(std::uint64_t));
  Reader r(bytes.substr(sizeof kMagic));
  const std::uint32_t version = r.u32();
  if (version != kVersion) {
    throw Error(ErrorKind::parse, "unsupported model version " + std::to_string(version) + " (expected " +
                                      std::to_string(kVersion) + ")");
  }
  std::uint64_t stored = 0;
  std::memcpy(&stored, bytes.data() + body.size(), sizeof stored);
  if (stored != fnv1a(body)) Reader::corrupt("checksum mismatch");

  TrainedModel model;
  model.variant = r.str();
  NetworkConfig net;
  net.input_size = r.u32();
  net.hidden_units = r.u32();
  if (r.u32() != NetworkConfig::kClasses) Reader::corrupt("class count must be 2");
  if (net.input_size == 0 || net.hidden_units == 0 || net.input_size > 4096 || net.hidden_units > 4096) {
    Reader::corrupt("implausible network shape");
  }
  const std::uint32_t n_channels = r.u32();
  if (n_channels != net.input_size) Reader::corrupt("channel count differs from input size");
  for (std::uint32_t i = 0; i < n_channels; ++i) {
    try {
      model.features.channels.push_back(channel_from_name(r.str()));
    } catch (const Error& e) {
      Reader::corrupt(e.what());
    }
  }
  model.features.gaze_fix_threshold_m = r.f64();
  try {
    model.features.gaze_distance = gaze_distance_from_name(r.str());
  } catch (const Error& e) {
    Reader::corrupt(e.what());
  }
  if (const std::uint32_t buffer = r.u32(); buffer > 0) model.buffer_len = buffer;
  const auto has_enhanced = r.pod<std::uint8_t>();
  EnhancedConfig enhanced;
  enhanced.score_threshold = r.f64();
  enhanced.gaze_threshold = r.f64();
  if (has_enhanced) model.enhanced = enhanced;
  model.norm.channels = model.features.channels;
  for (std::uint32_t i = 0; i < n_channels; ++i) model.norm.mean.push_back(r.f64());

  const std::size_t h = net.hidden_units;
  const std::size_t f = net.input_size;
  LstmParams p(net);
  if (r.u32() != 5) Reader::corrupt("expected 5 weight tensors");
  r.tensor("input_weights", p.input_weights().data(), 4 * h, f);
  r.tensor("recurrent_weights", p.recurrent_weights().data(), 4 * h, h);
  r.tensor("gate_bias", p.gate_bias().data(), 4 * h, 1);
  r.tensor("dense_weights", p.dense_weights().data(), NetworkConfig::kClasses, h);
  r.tensor("dense_bias", p.dense_bias().data(), NetworkConfig::kClasses, 1);
  if (sizeof kMagic + r.position() != body.size()) Reader::corrupt("trailing bytes");
  model.params = std::move(p);
  return model;
}

void save_model(const std::filesystem::path& path, const TrainedModel& model) {
  const std::string bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write model '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::io, "write failed for '" + path.string() + "'");
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open model '" + path.string() + "'");
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return deserialize_model(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace goalpred
