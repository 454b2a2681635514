// Copyright 2026 The pvqnet Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pvqnet/model_file.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <sstream>
#include <utility>

#include "pvqnet/error.hpp"
#include "pvqnet/idx.hpp"

namespace pvqnet {
namespace {

std::string FormatDouble(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <typename T>
T ParseNumber(std::string_view text, std::string_view what) {
  T v{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    Fail(ErrorKind::kFormat, "model header: bad value '" + std::string(text) + "' for " + std::string(what));
  }
  return v;
}

Shape ParseShape(std::string_view text) {
  Shape s;
  std::size_t start = 0;
  for (;;) {
    const std::size_t x = text.find('x', start);
    s.push_back(ParseNumber<std::size_t>(text.substr(start, x - start), "shape"));
    if (x == std::string_view::npos) break;
    start = x + 1;
  }
  return s;
}

// ---- header ---------------------------------------------------------------

void AppendParams(std::ostringstream& os, const Layer& l) {
  if (l.is_float()) {
    os << " params=float";
  } else if (l.is_quantized()) {
    const QuantizedParams& q = l.quantized_params();
    os << " params=pvq k=" << q.k << " rho=" << FormatDouble(q.rho)
       << " bias_scale=" << FormatDouble(q.bias_scale);
  } else {
    Fail(ErrorKind::kShape, "layer " + l.name + " has no parameters to write");
  }
}

void CheckToken(std::string_view token, std::string_view what) {
  if (token.empty() || token.find_first_of(" \t\r\n=") != std::string_view::npos) {
    Fail(ErrorKind::kShape, std::string(what) + " '" + std::string(token) +
                                "' must be non-empty and free of whitespace and '='");
  }
}

struct ParamHeader {
  bool quantized = false;
  std::int64_t k = 0;
  double rho = 0.0;
  double bias_scale = 1.0;
};

struct ParsedHeader {
  Network net;
  std::vector<ParamHeader> params;  // index-aligned with net.layers
};

class Record {
 public:
  Record(std::string_view name, std::map<std::string, std::string> kv)
      : name_(name), kv_(std::move(kv)) {}

  std::string Take(const std::string& key) {
    auto it = kv_.find(key);
    if (it == kv_.end()) Fail(ErrorKind::kFormat, "model header: layer " + name_ + " lacks " + key);
    std::string v = std::move(it->second);
    kv_.erase(it);
    return v;
  }

  template <typename T>
  T Number(const std::string& key) {
    return ParseNumber<T>(Take(key), key);
  }

  void Done() const {
    if (!kv_.empty()) {
      Fail(ErrorKind::kFormat, "model header: layer " + name_ + " has unknown key " + kv_.begin()->first);
    }
  }

 private:
  std::string name_;
  std::map<std::string, std::string> kv_;
};

Activation TakeActivation(Record& r) {
  const std::string s = r.Take("activation");
  const auto a = parse_activation(s);
  if (!a) Fail(ErrorKind::kFormat, "model header: unknown activation " + s);
  return *a;
}

ParamHeader TakeParams(Record& r) {
  ParamHeader p;
  const std::string kind = r.Take("params");
  if (kind == "float") return p;
  if (kind != "pvq") Fail(ErrorKind::kFormat, "model header: unknown params kind " + kind);
  p.quantized = true;
  p.k = r.Number<std::int64_t>("k");
  p.rho = r.Number<double>("rho");
  p.bias_scale = r.Number<double>("bias_scale");
  if (p.k < 1 || !std::isfinite(p.rho) || p.rho < 0.0 || !std::isfinite(p.bias_scale) ||
      p.bias_scale <= 0.0) {
    Fail(ErrorKind::kFormat, "model header: invalid quantization parameters");
  }
  return p;
}

ParsedHeader ParseHeader(std::string_view text) {
  ParsedHeader h;
  bool have_name = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) Fail(ErrorKind::kFormat, "model header: missing final newline");
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.starts_with("name ")) {
      if (have_name || !h.net.layers.empty()) Fail(ErrorKind::kFormat, "model header: misplaced name record");
      h.net.name = std::string(line.substr(5));
      have_name = true;
      continue;
    }
    if (!line.starts_with("layer ")) {
      Fail(ErrorKind::kFormat, "model header: unexpected record '" + std::string(line) + "'");
    }
    std::vector<std::string_view> tokens;
    std::size_t t = 6;
    while (t <= line.size()) {
      const std::size_t sp = std::min(line.find(' ', t), line.size());
      if (sp == t) Fail(ErrorKind::kFormat, "model header: doubled space in layer record");
      tokens.push_back(line.substr(t, sp - t));
      t = sp + 1;
    }
    if (tokens.size() < 2) Fail(ErrorKind::kFormat, "model header: short layer record");
    std::map<std::string, std::string> kv;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      const std::size_t eq = tokens[i].find('=');
      if (eq == std::string_view::npos) Fail(ErrorKind::kFormat, "model header: expected key=value");
      if (!kv.emplace(std::string(tokens[i].substr(0, eq)), std::string(tokens[i].substr(eq + 1))).second) {
        Fail(ErrorKind::kFormat, "model header: repeated key in layer " + std::string(tokens[0]));
      }
    }
    Record r(tokens[0], std::move(kv));
    Layer l;
    l.name = std::string(tokens[0]);
    ParamHeader p;
    const std::string kind = r.Take("kind");
    const auto lk = parse_layer_kind(kind);
    if (!lk) Fail(ErrorKind::kFormat, "model header: unknown layer kind " + kind);
    l.kind = *lk;
    switch (l.kind) {
      case LayerKind::kInput:
        l.input_shape = ParseShape(r.Take("shape"));
        break;
      case LayerKind::kFullyConnected:
        l.units = r.Number<std::size_t>("units");
        l.activation = TakeActivation(r);
        l.shift = r.Number<unsigned>("shift");
        p = TakeParams(r);
        break;
      case LayerKind::kConv2d: {
        l.filters = r.Number<std::size_t>("filters");
        const Shape kernel = ParseShape(r.Take("kernel"));
        if (kernel.size() != 2) Fail(ErrorKind::kFormat, "model header: kernel must be HxW");
        l.kernel_h = kernel[0];
        l.kernel_w = kernel[1];
        l.stride = r.Number<std::size_t>("stride");
        l.padding = r.Number<std::size_t>("pad");
        l.activation = TakeActivation(r);
        l.shift = r.Number<unsigned>("shift");
        p = TakeParams(r);
        break;
      }
      case LayerKind::kMaxPool:
        l.pool = r.Number<std::size_t>("pool");
        l.stride = r.Number<std::size_t>("stride");
        break;
      case LayerKind::kDropout:
        l.rate = r.Number<double>("rate");
        break;
    }
    r.Done();
    if (l.shift > 62) Fail(ErrorKind::kFormat, "model header: shift out of range");
    h.net.layers.push_back(std::move(l));
    h.params.push_back(p);
  }
  if (!have_name) Fail(ErrorKind::kFormat, "model header: missing name record");
  return h;
}

// ---- body -------------------------------------------------------------------

class Cursor {
 public:
  explicit Cursor(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::span<const std::uint8_t> Take(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) Fail(ErrorKind::kFormat, std::string("truncated ") + what);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  std::uint64_t U64() {
    const auto s = Take(8, "length field");
    std::uint64_t v = 0;
    for (std::size_t i = 8; i-- > 0;) v = (v << 8) | s[i];
    return v;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void PutLe32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

void PutLe64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int s = 0; s < 64; s += 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

std::uint32_t GetLe32(std::span<const std::uint8_t> in) {
  return std::uint32_t{in[0]} | (std::uint32_t{in[1]} << 8) | (std::uint32_t{in[2]} << 16) |
         (std::uint32_t{in[3]} << 24);
}

void PutFloats(std::vector<std::uint8_t>& out, std::span<const double> values, const std::string& layer) {
  for (double d : values) {
    const auto f = static_cast<float>(d);
    if (!std::isfinite(f) && std::isfinite(d)) {
      Fail(ErrorKind::kOverflow, "layer " + layer + ": parameter exceeds the float32 range");
    }
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    PutLe32(out, u);
  }
}

void PutInts(std::vector<std::uint8_t>& out, std::span<const std::int64_t> values, const std::string& layer) {
  for (std::int64_t v : values) {
    if (v < std::numeric_limits<std::int32_t>::min() || v > std::numeric_limits<std::int32_t>::max()) {
      Fail(ErrorKind::kOverflow, "layer " + layer + ": coordinate exceeds the int32 range");
    }
    PutLe32(out, static_cast<std::uint32_t>(static_cast<std::int32_t>(v)));
  }
}

std::vector<double> GetFloats(Cursor& c, std::size_t n) {
  const auto s = c.Take(n * 4, "model body");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t u = GetLe32(s.subspan(i * 4, 4));
    float f;
    std::memcpy(&f, &u, 4);
    out[i] = f;
  }
  return out;
}

std::vector<std::int64_t> GetInts(Cursor& c, std::size_t n) {
  const auto s = c.Take(n * 4, "model body");
  std::vector<std::int64_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<std::int32_t>(GetLe32(s.subspan(i * 4, 4)));
  return out;
}

std::vector<std::uint8_t> Frame(std::string_view magic, const std::string& header) {
  if (header.size() > std::numeric_limits<std::uint32_t>::max()) {
    Fail(ErrorKind::kOverflow, "model header too large");
  }
  std::vector<std::uint8_t> out(magic.begin(), magic.end());
  PutLe32(out, static_cast<std::uint32_t>(header.size()));
  out.insert(out.end(), header.begin(), header.end());
  return out;
}

// Splits magic and header off bytes; returns the parsed header and a cursor
// over the body.
std::pair<ParsedHeader, Cursor> Unframe(std::span<const std::uint8_t> bytes, std::string_view magic) {
  if (bytes.size() < magic.size() + 4) Fail(ErrorKind::kFormat, "file too short for a model header");
  if (std::string_view(reinterpret_cast<const char*>(bytes.data()), magic.size()) != magic) {
    Fail(ErrorKind::kFormat, "bad magic, expected " + std::string(magic));
  }
  const std::uint32_t len = GetLe32(bytes.subspan(magic.size(), 4));
  const std::size_t start = magic.size() + 4;
  if (bytes.size() - start < len) Fail(ErrorKind::kFormat, "truncated model header");
  const std::string_view text(reinterpret_cast<const char*>(bytes.data()) + start, len);
  return {ParseHeader(text), Cursor(bytes.subspan(start + len))};
}

std::vector<Shape> ValidateHeader(const Network& net) {
  try {
    return net.Validate();
  } catch (const Error& e) {
    Fail(ErrorKind::kFormat, std::string("model header: ") + e.what());
  }
}

std::size_t BiasCount(const Layer& l) {
  return l.kind == LayerKind::kConv2d ? l.filters : l.units;
}

template <typename ReadQuantized>
Network ReadBody(ParsedHeader h, Cursor& c, ReadQuantized&& read_quantized) {
  // Parameter shapes depend on the output shape of the preceding layers, so
  // the network is rebuilt one layer at a time.
  Network net;
  net.name = std::move(h.net.name);
  for (std::size_t i = 0; i < h.net.layers.size(); ++i) {
    Layer& l = h.net.layers[i];
    if (l.has_params()) {
      if (net.layers.empty()) Fail(ErrorKind::kFormat, "model header: network must start with an input layer");
      const Shape ws = l.weight_shape(ValidateHeader(net).back());
      const std::size_t nw = ShapeSize(ws);
      const std::size_t nb = BiasCount(l);
      const ParamHeader& p = h.params[i];
      if (!p.quantized) {
        FloatParams f;
        f.weights = RealTensor(ws, GetFloats(c, nw));
        f.biases = GetFloats(c, nb);
        l.params = std::move(f);
      } else {
        std::vector<std::int64_t> coords = read_quantized(c, l, nw + nb, p.k);
        std::int64_t pulses = 0;
        for (std::int64_t v : coords) pulses += v < 0 ? -v : v;
        if (pulses != p.k) Fail(ErrorKind::kFormat, "layer " + l.name + ": coordinates do not sum to k");
        QuantizedParams q;
        q.biases.assign(coords.begin() + static_cast<std::ptrdiff_t>(nw), coords.end());
        coords.resize(nw);
        q.weights = IntTensor(ws, std::move(coords));
        q.k = p.k;
        q.rho = p.rho;
        q.bias_scale = p.bias_scale;
        l.params = std::move(q);
      }
    }
    net.layers.push_back(std::move(l));
  }
  ValidateHeader(net);
  if (!c.done()) Fail(ErrorKind::kFormat, "trailing bytes after the model body");
  return net;
}

}  // namespace

std::string model_header(const Network& net) {
  if (net.name.find('\n') != std::string::npos) Fail(ErrorKind::kShape, "network name contains a newline");
  std::ostringstream os;
  os << "name " << net.name << '\n';
  for (const Layer& l : net.layers) {
    CheckToken(l.name, "layer name");
    os << "layer " << l.name << " kind=" << to_string(l.kind);
    switch (l.kind) {
      case LayerKind::kInput:
        os << " shape=" << ShapeToString(l.input_shape);
        break;
      case LayerKind::kFullyConnected:
        os << " units=" << l.units << " activation=" << to_string(l.activation) << " shift=" << l.shift;
        AppendParams(os, l);
        break;
      case LayerKind::kConv2d:
        os << " filters=" << l.filters << " kernel=" << l.kernel_h << 'x' << l.kernel_w
           << " stride=" << l.stride << " pad=" << l.padding << " activation=" << to_string(l.activation)
           << " shift=" << l.shift;
        AppendParams(os, l);
        break;
      case LayerKind::kMaxPool:
        os << " pool=" << l.pool << " stride=" << l.stride;
        break;
      case LayerKind::kDropout:
        os << " rate=" << FormatDouble(l.rate);
        break;
    }
    os << '\n';
  }
  return os.str();
}

std::vector<std::uint8_t> serialize_model(const Network& net) {
  net.Validate();
  std::vector<std::uint8_t> out = Frame(kModelMagic, model_header(net));
  for (const Layer& l : net.layers) {
    if (!l.has_params()) continue;
    if (l.is_float()) {
      PutFloats(out, l.float_params().weights.data(), l.name);
      PutFloats(out, l.float_params().biases, l.name);
    } else {
      PutInts(out, l.quantized_params().weights.data(), l.name);
      PutInts(out, l.quantized_params().biases, l.name);
    }
  }
  return out;
}

Network parse_model(std::span<const std::uint8_t> bytes) {
  auto [header, cursor] = Unframe(bytes, kModelMagic);
  return ReadBody(std::move(header), cursor,
                  [](Cursor& c, const Layer&, std::size_t n, std::int64_t) { return GetInts(c, n); });
}

Network read_model(const std::filesystem::path& path) { return parse_model(read_file(path)); }

void write_model(const std::filesystem::path& path, const Network& net) {
  write_file(path, serialize_model(net));
}

CompressedModel compress_model(const Network& net, const CompressOptions& options) {
  net.Validate();
  CompressedModel out;
  out.bytes = Frame(kCompressedMagic, model_header(net));
  for (const Layer& l : net.layers) {
    if (!l.has_params()) continue;
    if (l.is_float()) {
      PutFloats(out.bytes, l.float_params().weights.data(), l.name);
      PutFloats(out.bytes, l.float_params().biases, l.name);
      continue;
    }
    const PvqPoint p = l.quantized_params().point();
    Bitstream b;
    switch (options.codec) {
      case CodecId::kExpGolomb:
        b = golomb_encode(p.coords());
        break;
      case CodecId::kRleZero:
        b = rle_encode(p.coords());
        break;
      case CodecId::kHuffmanEscape:
        b = huffman_encode(p.coords(), options.huffman_threshold);
        break;
      case CodecId::kPvqIndex:
        b = index_encode(p);
        break;
    }
    const std::vector<std::uint8_t> container = b.Serialize();
    PutLe64(out.bytes, container.size());
    out.bytes.insert(out.bytes.end(), container.begin(), container.end());
    out.layers.push_back({l.name, p.n(), p.k(), b.bit_length, container.size()});
  }
  if (out.layers.empty()) Fail(ErrorKind::kShape, "model has no quantized layers to compress");
  return out;
}

Network decompress_model(std::span<const std::uint8_t> bytes) {
  auto [header, cursor] = Unframe(bytes, kCompressedMagic);
  return ReadBody(std::move(header), cursor,
                  [](Cursor& c, const Layer& l, std::size_t n, std::int64_t k) {
                    const std::uint64_t len = c.U64();
                    if (len > std::numeric_limits<std::size_t>::max() / 2) {
                      Fail(ErrorKind::kFormat, "container length out of range");
                    }
                    const auto span = c.Take(static_cast<std::size_t>(len), "container");
                    std::size_t used = 0;
                    const Bitstream b = Bitstream::Parse(span, &used);
                    if (used != span.size()) Fail(ErrorKind::kFormat, "layer " + l.name + ": container size mismatch");
                    if (b.n != n || b.k != static_cast<std::uint64_t>(k)) {
                      Fail(ErrorKind::kFormat, "layer " + l.name + ": container (n, k) disagrees with the header");
                    }
                    return decode(b);
                  });
}

}  // namespace pvqnet
