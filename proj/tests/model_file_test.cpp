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

#include <gtest/gtest.h>

#include <algorithm>
#include <cstring>
#include <functional>
#include <random>
#include <string>

#include "pvqnet/error.hpp"
#include "pvqnet/idx.hpp"
#include "pvqnet/quantizer.hpp"
#include "test_util.hpp"

namespace pvqnet {
namespace {

ErrorKind KindOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kInvalidArgument;
}

std::vector<std::uint8_t> Bytes(std::string_view s) { return {s.begin(), s.end()}; }

// Builds a model file from a header text and a body.
std::vector<std::uint8_t> Assemble(std::string_view header, const std::vector<std::uint8_t>& body) {
  std::vector<std::uint8_t> out = Bytes(kModelMagic);
  const auto len = static_cast<std::uint32_t>(header.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(len >> (8 * i)));
  out.insert(out.end(), header.begin(), header.end());
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

Network QuantizedConvNet(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Network net = testing::RandomConvNet(rng);
  return quantize_network(net, QuantConfig::Parse("CONV0 ratio 1\nCONV1 k 40\nFC2 ratio 1/2")).network;
}

TEST(ModelFile, FloatRoundTripIsByteIdentical) {
  std::mt19937_64 rng(1);
  const Network net = testing::RandomConvNet(rng);
  const auto a = serialize_model(net);
  const Network back = parse_model(a);
  EXPECT_EQ(serialize_model(back), a);
  EXPECT_EQ(back.name, net.name);
  ASSERT_EQ(back.layers.size(), net.layers.size());
  EXPECT_EQ(back.find("CONV0")->padding, 1u);
  EXPECT_DOUBLE_EQ(back.find("DRP0")->rate, 0.25);
}

TEST(ModelFile, QuantizedRoundTripIsByteIdentical) {
  const Network q = QuantizedConvNet(2);
  const auto a = serialize_model(q);
  const Network back = parse_model(a);
  EXPECT_EQ(serialize_model(back), a);
  const QuantizedParams& p = back.find("CONV1")->quantized_params();
  const QuantizedParams& o = q.find("CONV1")->quantized_params();
  EXPECT_EQ(p.point(), o.point());
  EXPECT_EQ(p.rho, o.rho);
  EXPECT_EQ(p.bias_scale, o.bias_scale);
  EXPECT_TRUE(back.find("FC2")->is_quantized());
}

TEST(ModelFile, FixtureRoundTripIsByteIdentical) {
  const auto bytes = read_file(testing::DataDir() / "mnist_mlp.pvqnet");
  const Network net = parse_model(bytes);
  EXPECT_EQ(net.layers.size(), 6u);
  EXPECT_EQ(net.find("FC0")->parameter_count(), 401920u);
  EXPECT_EQ(net.find("FC2")->parameter_count(), 5130u);
  EXPECT_EQ(serialize_model(net), bytes);
}

TEST(ModelFile, FileHelpers) {
  testing::TempDir dir("model");
  const Network q = QuantizedConvNet(3);
  write_model(dir / "m.pvqnet", q);
  EXPECT_EQ(serialize_model(read_model(dir / "m.pvqnet")), serialize_model(q));
  EXPECT_EQ(KindOf([&] { read_model(dir / "missing.pvqnet"); }), ErrorKind::kIo);
}

TEST(ModelFile, RejectsMalformedContainers) {
  const auto good = serialize_model(QuantizedConvNet(4));
  auto bad_magic = good;
  bad_magic[7] = '2';
  EXPECT_EQ(KindOf([&] { parse_model(bad_magic); }), ErrorKind::kFormat);
  for (std::size_t cut : {std::size_t{0}, std::size_t{5}, std::size_t{10}, good.size() - 1}) {
    const std::vector<std::uint8_t> t(good.begin(), good.begin() + static_cast<std::ptrdiff_t>(cut));
    EXPECT_EQ(KindOf([&] { parse_model(t); }), ErrorKind::kFormat) << cut;
  }
  auto trailing = good;
  trailing.push_back(0);
  EXPECT_EQ(KindOf([&] { parse_model(trailing); }), ErrorKind::kFormat);
}

TEST(ModelFile, RejectsMalformedHeaders) {
  const std::vector<std::uint8_t> body(4 * 6, 0);  // 2x2 weights + 2 biases
  const std::string ok = "name t\nlayer IN kind=input shape=2\n"
                         "layer FC0 kind=fc units=2 activation=none shift=0 params=float\n";
  EXPECT_NO_THROW(parse_model(Assemble(ok, body)));
  for (const char* bad : {
           "name t\nlayer IN kind=input shape=2\nlayer FC0 kind=fc units=2 activation=none shift=0 params=float color=red\n",
           "name t\nlayer IN kind=input shape=2\nlayer FC0 kind=fc units=2 units=2 activation=none shift=0 params=float\n",
           "name t\nlayer IN kind=input shape=2\nlayer FC0 kind=fc units=x activation=none shift=0 params=float\n",
           "name t\nlayer IN kind=input shape=2\nlayer FC0 kind=dense units=2 activation=none shift=0 params=float\n",
           "name t\nlayer IN kind=input shape=2\nlayer FC0 kind=fc units=2 activation=tanh shift=0 params=float\n",
           "name t\nlayer IN kind=input shape=2\nbogus FC0\n",
       }) {
    EXPECT_EQ(KindOf([&] { parse_model(Assemble(bad, body)); }), ErrorKind::kFormat) << bad;
  }
}

TEST(ModelFile, QuantizedCoordinatesMustFitInt32) {
  Network q = QuantizedConvNet(5);
  for (Layer& l : q.layers) {
    if (l.name == "FC2") std::get<QuantizedParams>(l.params).biases[0] = std::int64_t{1} << 31;
  }
  EXPECT_EQ(KindOf([&] { serialize_model(q); }), ErrorKind::kOverflow);
}

class CompressedModelTest : public ::testing::TestWithParam<CodecId> {};

TEST_P(CompressedModelTest, RoundTripsEveryCodec) {
  const Network q = QuantizedConvNet(6);
  CompressOptions opt;
  opt.codec = GetParam();
  opt.huffman_threshold = 3;
  const CompressedModel c = compress_model(q, opt);
  ASSERT_EQ(c.layers.size(), 3u);
  EXPECT_EQ(std::string(c.bytes.begin(), c.bytes.begin() + 8), kCompressedMagic);
  for (const LayerCompression& l : c.layers) {
    EXPECT_EQ(l.n, q.find(l.name)->parameter_count());
    EXPECT_EQ(l.k, q.find(l.name)->quantized_params().k);
    EXPECT_GT(l.bits_per_weight(), 0.0);
  }
  EXPECT_EQ(serialize_model(decompress_model(c.bytes)), serialize_model(q));
  auto trailing = c.bytes;
  trailing.push_back(0);
  EXPECT_EQ(KindOf([&] { decompress_model(trailing); }), ErrorKind::kFormat);
  const std::vector<std::uint8_t> cut(c.bytes.begin(), c.bytes.end() - 1);
  EXPECT_EQ(KindOf([&] { decompress_model(cut); }), ErrorKind::kFormat);
}

INSTANTIATE_TEST_SUITE_P(Codecs, CompressedModelTest,
                         ::testing::Values(CodecId::kExpGolomb, CodecId::kRleZero,
                                           CodecId::kHuffmanEscape, CodecId::kPvqIndex),
                         [](const auto& info) {
                           std::string s(to_string(info.param));
                           std::replace(s.begin(), s.end(), '-', '_');
                           return s;
                         });

TEST(CompressedModel, NeedsQuantizedLayers) {
  std::mt19937_64 rng(7);
  EXPECT_EQ(KindOf([&] { compress_model(testing::RandomMlp(rng, {3, 2}), {}); }), ErrorKind::kShape);
}

TEST(CompressedModel, IndexCodecRefusesLargeLayers) {
  std::mt19937_64 rng(8);
  const Network net = testing::RandomMlp(rng, {1000, 40});
  const Network q = quantize_network(net, QuantConfig::Parse("FC0 ratio 1")).network;
  CompressOptions opt;
  opt.codec = CodecId::kPvqIndex;
  EXPECT_EQ(KindOf([&] { compress_model(q, opt); }), ErrorKind::kOverflow);
}

TEST(Idx, RoundTripAndValidation) {
  IdxImages im;
  im.count = 3;
  im.rows = 2;
  im.cols = 2;
  im.pixels = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 255};
  const auto bytes = serialize_idx_images(im);
  ASSERT_EQ(bytes.size(), 16u + 12u);
  EXPECT_EQ(bytes[3], 0x03);
  const IdxImages back = parse_idx_images(bytes);
  EXPECT_EQ(back.pixels, im.pixels);
  EXPECT_EQ(back.rows, 2u);
  const std::vector<std::uint8_t> labels{1, 2, 3};
  EXPECT_EQ(parse_idx_labels(serialize_idx_labels(labels)), labels);

  auto wrong = bytes;
  wrong[3] = 0x01;
  EXPECT_EQ(KindOf([&] { parse_idx_images(wrong); }), ErrorKind::kFormat);
  const std::vector<std::uint8_t> cut(bytes.begin(), bytes.end() - 1);
  EXPECT_EQ(KindOf([&] { parse_idx_images(cut); }), ErrorKind::kFormat);
  auto extra = serialize_idx_labels(labels);
  extra.push_back(0);
  EXPECT_EQ(KindOf([&] { parse_idx_labels(extra); }), ErrorKind::kFormat);
  EXPECT_EQ(KindOf([&] { parse_idx_labels(bytes); }), ErrorKind::kFormat);
}

TEST(Idx, DatasetCountsMustAgree) {
  testing::TempDir dir("idx");
  IdxImages im;
  im.count = 2;
  im.rows = 1;
  im.cols = 3;
  im.pixels = {1, 2, 3, 4, 5, 6};
  write_file(dir / "img", serialize_idx_images(im));
  const std::vector<std::uint8_t> two{7, 8};
  write_file(dir / "lab", serialize_idx_labels(two));
  const LabeledSamples s = read_idx_dataset(dir / "img", dir / "lab");
  EXPECT_EQ(s.sample_shape, (Shape{1, 1, 3}));
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.sample(1).values(), (std::vector<std::int64_t>{4, 5, 6}));
  const std::vector<std::uint8_t> three{7, 8, 9};
  write_file(dir / "lab3", serialize_idx_labels(three));
  EXPECT_EQ(KindOf([&] { read_idx_dataset(dir / "img", dir / "lab3"); }), ErrorKind::kShape);
  EXPECT_EQ(KindOf([&] { read_idx_dataset(dir / "nope", dir / "lab"); }), ErrorKind::kIo);
}

TEST(Idx, FixtureLoads) {
  const LabeledSamples s = read_idx_dataset(testing::DataDir() / "mnist-heldout-images-idx3-ubyte",
                                            testing::DataDir() / "mnist-heldout-labels-idx1-ubyte");
  EXPECT_EQ(s.size(), 2000u);
  EXPECT_EQ(s.sample_shape, (Shape{1, 28, 28}));
  EXPECT_TRUE(std::all_of(s.labels.begin(), s.labels.end(), [](std::uint8_t l) { return l < 10; }));
}

}  // namespace
}  // namespace pvqnet
