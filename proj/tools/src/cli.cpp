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

#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "pvqnet/codec.hpp"
#include "pvqnet/error.hpp"
#include "pvqnet/idx.hpp"
#include "pvqnet/kernels.hpp"
#include "pvqnet/model_file.hpp"
#include "pvqnet/network.hpp"
#include "pvqnet/quantizer.hpp"

namespace pvqnet::cli {
namespace {

constexpr int kExitUsage = static_cast<int>(ErrorKind::kUsage);
constexpr int kExitIo = static_cast<int>(ErrorKind::kIo);

std::string Fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string Rho(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// ---- quantize -----------------------------------------------------------------

struct QuantizeArgs {
  std::string model;
  std::string config;
  std::string preset;
  std::string ratio;
  std::string bias;
  std::string out;
};

void RunQuantize(const QuantizeArgs& a, std::ostream& out) {
  const int sources = !a.config.empty() + !a.preset.empty() + !a.ratio.empty();
  if (sources != 1) Fail(ErrorKind::kUsage, "quantize: give exactly one of --config, --preset, --ratio");
  QuantConfig cfg;
  if (!a.config.empty()) {
    const std::vector<std::uint8_t> text = read_file(a.config);
    cfg = QuantConfig::Parse(std::string_view(reinterpret_cast<const char*>(text.data()), text.size()));
  } else if (!a.preset.empty()) {
    cfg = QuantConfig::Preset(a.preset);
  } else {
    cfg.default_fc = Ratio::Parse(a.ratio);
    cfg.default_conv = cfg.default_fc;
  }
  if (!a.bias.empty()) cfg.bias_mode = *parse_bias_mode(a.bias);
  const Network net = read_model(a.model);
  const QuantizeResult q = quantize_network(net, cfg);
  write_model(a.out, q.network);
  out << "model=" << net.name << " quantized_layers=" << q.report.size()
      << " bias=" << to_string(cfg.bias_mode) << '\n';
  PrintQuantizeReport(out, q.report);
}

// ---- eval -----------------------------------------------------------------------

struct EvalArgs {
  std::string model;
  std::string images;
  std::string labels;
  std::string path = "pvq";
  unsigned threads = 0;
  std::size_t limit = 0;
};

void RunEval(const EvalArgs& a, std::ostream& out) {
  const auto path = parse_inference_path(a.path);
  if (!path) Fail(ErrorKind::kUsage, "eval: unknown path " + a.path);
  const Network net = read_model(a.model);
  LabeledSamples data = read_idx_dataset(a.images, a.labels);
  if (a.limit > 0 && a.limit < data.size()) {
    data.labels.resize(a.limit);
    data.pixels.resize(a.limit * ShapeSize(data.sample_shape));
  }
  const unsigned threads = a.threads ? a.threads : std::max(1u, std::thread::hardware_concurrency());
  const Evaluation e = evaluate(net, data, *path, threads);
  out << "path=" << to_string(*path) << " samples=" << e.samples << " correct=" << e.correct
      << " accuracy=" << Fixed(100.0 * e.accuracy, 2) << "%\n";
  out << "ops additions=" << e.stats.additions << " subtractions=" << e.stats.subtractions
      << " addsub=" << e.stats.addsub() << " multiplications=" << e.stats.multiplications << '\n';
}

// ---- stats ----------------------------------------------------------------------

void RunStats(const std::string& model, std::ostream& out) {
  PrintHistogramTable(out, weight_stats(read_model(model)));
}

// ---- compress / decompress --------------------------------------------------------

struct CompressArgs {
  std::string model;
  std::string codec = "golomb";
  std::string out;
  std::uint32_t huffman_threshold = 8;
};

void RunCompress(const CompressArgs& a, std::ostream& out) {
  const auto codec = parse_codec(a.codec);
  if (!codec) Fail(ErrorKind::kUsage, "compress: unknown codec " + a.codec);
  const Network net = read_model(a.model);
  const CompressedModel c = compress_model(net, {*codec, a.huffman_threshold});
  // Nothing is written unless the container decodes back to the same model.
  if (serialize_model(decompress_model(c.bytes)) != serialize_model(net)) {
    Fail(ErrorKind::kFormat, "compress: decompression check failed");
  }
  write_file(a.out, c.bytes);
  std::uint64_t bits = 0;
  std::uint64_t n = 0;
  out << "codec=" << to_string(*codec) << '\n';
  for (const LayerCompression& l : c.layers) {
    out << "layer=" << l.name << " n=" << l.n << " k=" << l.k << " payload_bits=" << l.payload_bits
        << " container_bytes=" << l.container_bytes << " bits/weight=" << Fixed(l.bits_per_weight(), 4)
        << '\n';
    bits += l.payload_bits;
    n += l.n;
  }
  out << "total n=" << n << " payload_bits=" << bits << " bits/weight="
      << Fixed(n ? static_cast<double>(bits) / static_cast<double>(n) : 0.0, 4)
      << " file_bytes=" << c.bytes.size() << " verified=yes\n";
}

void RunDecompress(const std::string& in, const std::string& out_path, std::ostream& out) {
  const Network net = decompress_model(read_file(in));
  write_model(out_path, net);
  out << "model=" << net.name << " written=" << out_path << '\n';
}

// ---- cycles ---------------------------------------------------------------------

struct LayerCycles {
  std::uint64_t dots = 0;
  std::uint64_t cycles = 0;
  std::uint64_t multiplier = 0;
  std::uint64_t addsub = 0;
};

// Each weight row (plus its bias coordinate) is one dot product, applied once
// per output position.
LayerCycles CountLayer(const Layer& l, const Shape& out_shape, Arch arch) {
  const QuantizedParams& q = l.quantized_params();
  const std::size_t rows = q.biases.size();
  const std::size_t width = q.weights.size() / rows;
  const std::uint64_t positions = l.kind == LayerKind::kConv2d ? out_shape[1] * out_shape[2] : 1;
  LayerCycles c;
  std::vector<std::int64_t> row(width + 1);
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(q.weights.data().begin() + static_cast<std::ptrdiff_t>(r * width), width, row.begin());
    row[width] = q.biases[r];
    c.cycles += estimate_cycles(row, arch).cycles * positions;
    c.multiplier += estimate_cycles(row, Arch::kMultiplier).cycles * positions;
    c.addsub += estimate_cycles(row, Arch::kAddSub).cycles * positions;
  }
  c.dots = rows * positions;
  return c;
}

void RunCycles(const std::string& model, const std::string& arch_name, std::ostream& out) {
  const auto arch = parse_arch(arch_name);
  if (!arch) Fail(ErrorKind::kUsage, "cycles: unknown arch " + arch_name);
  const Network net = read_model(model);
  const std::vector<Shape> shapes = net.Validate();
  std::ostringstream report;
  LayerCycles total;
  bool any = false;
  report << "arch=" << to_string(*arch) << '\n';
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const Layer& l = net.layers[i];
    if (!l.is_quantized()) continue;
    any = true;
    const LayerCycles c = CountLayer(l, shapes[i], *arch);
    report << "layer=" << l.name << " k=" << l.quantized_params().k << " dots=" << c.dots
        << " cycles=" << c.cycles << '\n';
    total.dots += c.dots;
    total.cycles += c.cycles;
    total.multiplier += c.multiplier;
    total.addsub += c.addsub;
  }
  if (!any) Fail(ErrorKind::kShape, "cycles: model has no quantized layers");
  out << report.str();
  out << "total dots=" << total.dots << " cycles=" << total.cycles << '\n';
  out << "compare multiplier=" << total.multiplier << " addsub=" << total.addsub
      << " multiplier/addsub=" << Fixed(static_cast<double>(total.multiplier) / static_cast<double>(total.addsub), 4)
      << '\n';
}

int ExitCode(const Error& e) {
  return e.kind() == ErrorKind::kInvalidArgument ? kExitUsage : e.exit_code();
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pyramid vector quantization of neural network weights", "pvqnet"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "pvqnet 0.1.0");

  QuantizeArgs qa;
  auto* quantize = app.add_subcommand("quantize", "Quantize the layers of a float model");
  quantize->add_option("--model", qa.model, "Input model file")->required();
  quantize->add_option("--config", qa.config, "Per-layer ratio / k directives");
  quantize->add_option("--preset", qa.preset, "Named ratio table")
      ->check(CLI::IsMember(QuantConfig::PresetNames()));
  quantize->add_option("--ratio", qa.ratio, "N/k ratio for every layer, e.g. 5 or 5/2");
  quantize->add_option("--bias", qa.bias, "Bias scaling: joint (default) or integer")
      ->check(CLI::IsMember({"joint", "integer"}));
  quantize->add_option("--out", qa.out, "Output model file")->required();

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Classification accuracy on an IDX dataset");
  eval->add_option("--model", ea.model)->required();
  eval->add_option("--images", ea.images, "IDX image file")->required();
  eval->add_option("--labels", ea.labels, "IDX label file")->required();
  eval->add_option("--path", ea.path, "float, pvq or binary")
      ->check(CLI::IsMember({"float", "pvq", "binary"}));
  eval->add_option("--threads", ea.threads, "Worker threads (0: all cores)");
  eval->add_option("--limit", ea.limit, "Evaluate only the first N samples");

  std::string stats_model;
  auto* stats = app.add_subcommand("stats", "Weight histograms of a quantized model");
  stats->add_option("--model", stats_model)->required();

  CompressArgs ca;
  auto* compress = app.add_subcommand("compress", "Losslessly code the quantized layers");
  compress->add_option("--model", ca.model)->required();
  compress->add_option("--codec", ca.codec, "golomb, rle, huffman or index")
      ->check(CLI::IsMember({"golomb", "rle", "huffman", "index", "exp-golomb", "rle-zero",
                             "huffman-escape", "pvq-index"}));
  compress->add_option("--out", ca.out)->required();
  compress->add_option("--huffman-threshold", ca.huffman_threshold,
                       "Values with |v| at or above this are escaped")
      ->check(CLI::Range(1u, 65536u));

  std::string dc_in;
  std::string dc_out;
  auto* decompress = app.add_subcommand("decompress", "Restore a model from a compressed file");
  decompress->add_option("--in", dc_in)->required();
  decompress->add_option("--out", dc_out)->required();

  std::string cy_model;
  std::string cy_arch = "addsub";
  auto* cycles = app.add_subcommand("cycles", "Serial dot-product cycle estimate");
  cycles->add_option("--model", cy_model)->required();
  cycles->add_option("--arch", cy_arch, "multiplier, addsub, binary-accumulate or binary-counter");

  std::vector<const char*> argv{"pvqnet"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : kExitUsage;
  }

  try {
    if (*quantize) RunQuantize(qa, out);
    if (*eval) RunEval(ea, out);
    if (*stats) RunStats(stats_model, out);
    if (*compress) RunCompress(ca, out);
    if (*decompress) RunDecompress(dc_in, dc_out, out);
    if (*cycles) RunCycles(cy_model, cy_arch, out);
  } catch (const Error& e) {
    err << "pvqnet: " << e.what() << '\n';
    return ExitCode(e);
  } catch (const std::filesystem::filesystem_error& e) {
    err << "pvqnet: " << e.what() << '\n';
    return kExitIo;
  }
  return 0;
}

}  // namespace pvqnet::cli
