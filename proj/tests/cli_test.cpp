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

#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pvqnet/idx.hpp"
#include "pvqnet/model_file.hpp"
#include "pvqnet/quantizer.hpp"
#include "test_util.hpp"

namespace pvqnet {
namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result Cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  Result r;
  r.code = cli::Run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// Value of "key=" in the first line that starts with prefix.
std::string Field(const std::string& text, const std::string& prefix, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(prefix, 0) != 0) continue;
    const auto at = line.find(" " + key + "=");
    if (at == std::string::npos) return {};
    const auto start = at + key.size() + 2;
    return line.substr(start, line.find(' ', start) - start);
  }
  return {};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::mt19937_64 rng(77);
    write_model(dir_ / "float.pvqnet", testing::RandomConvNet(rng));
    IdxImages im;
    im.count = 40;
    im.rows = 8;
    im.cols = 8;
    std::vector<std::uint8_t> labels;
    for (std::uint32_t i = 0; i < im.count; ++i) {
      for (const auto px : testing::RandomPixels(rng, 64)) im.pixels.push_back(static_cast<std::uint8_t>(px));
      labels.push_back(static_cast<std::uint8_t>(i % 5));
    }
    write_file(dir_ / "images", serialize_idx_images(im));
    write_file(dir_ / "labels", serialize_idx_labels(labels));
  }

  std::string P(const std::string& name) const { return (dir_ / name).string(); }

  Result Quantize(const std::string& out = "q.pvqnet") {
    return Cli({"quantize", "--model", P("float.pvqnet"), "--ratio", "1", "--out", P(out)});
  }
  Result Eval(const std::string& model, const std::string& path) {
    return Cli({"eval", "--model", P(model), "--images", P("images"), "--labels", P("labels"), "--path",
                path, "--threads", "2"});
  }

  testing::TempDir dir_{"cli"};
};

TEST_F(CliTest, QuantizeReportsEveryLayer) {
  const Result r = Quantize();
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Field(r.out, "model=", "quantized_layers"), "3");
  EXPECT_EQ(Field(r.out, "model=", "bias"), "joint");
  EXPECT_EQ(Field(r.out, "index=1", "layer"), "CONV0");
  EXPECT_EQ(Field(r.out, "index=1", "N"), "40");
  EXPECT_EQ(Field(r.out, "index=1", "k"), "40");
  EXPECT_TRUE(read_model(P("q.pvqnet")).find("FC2")->is_quantized());
}

TEST_F(CliTest, QuantizeFromConfigFile) {
  const std::string cfg = "CONV1 k 30\nbias integer\n";
  write_file(P("cfg.txt"), std::vector<std::uint8_t>(cfg.begin(), cfg.end()));
  const Result r = Cli({"quantize", "--model", P("float.pvqnet"), "--config", P("cfg.txt"), "--out", P("c.pvqnet")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Field(r.out, "model=", "bias"), "integer");
  EXPECT_EQ(read_model(P("c.pvqnet")).find("CONV1")->quantized_params().k, 30);
}

TEST_F(CliTest, EvalPathsAgreeAndPvqHasNoMultiplications) {
  ASSERT_EQ(Quantize().code, 0);
  const Result f = Eval("q.pvqnet", "float");
  const Result p = Eval("q.pvqnet", "pvq");
  ASSERT_EQ(f.code, 0) << f.err;
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_EQ(Field(f.out, "path=", "samples"), "40");
  EXPECT_EQ(Field(f.out, "path=", "accuracy"), Field(p.out, "path=", "accuracy"));
  EXPECT_EQ(Field(p.out, "ops", "multiplications"), "0");
  EXPECT_NE(Field(p.out, "ops", "addsub"), "0");
  const Result lim = Cli({"eval", "--model", P("q.pvqnet"), "--images", P("images"), "--labels",
                          P("labels"), "--limit", "7"});
  EXPECT_EQ(Field(lim.out, "path=", "samples"), "7");
}

TEST_F(CliTest, PvqEvalOfFloatModelIsAShapeError) {
  const Result r = Eval("float.pvqnet", "pvq");
  EXPECT_EQ(r.code, 5);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(Eval("float.pvqnet", "float").code, 0);
}

TEST_F(CliTest, CompressDecompressPreservesAccuracy) {
  ASSERT_EQ(Quantize().code, 0);
  const std::string before = Field(Eval("q.pvqnet", "pvq").out, "path=", "accuracy");
  for (const std::string codec : {"golomb", "rle", "huffman", "index"}) {
    const Result c = Cli({"compress", "--model", P("q.pvqnet"), "--codec", codec, "--out", P("q.cmp")});
    ASSERT_EQ(c.code, 0) << codec << c.err;
    EXPECT_EQ(Field(c.out, "total", "verified"), "yes");
    EXPECT_EQ(Field(c.out, "layer=CONV1", "n"), "222");
    const Result d = Cli({"decompress", "--in", P("q.cmp"), "--out", P("d.pvqnet")});
    ASSERT_EQ(d.code, 0) << d.err;
    EXPECT_EQ(read_file(P("d.pvqnet")), read_file(P("q.pvqnet")));
    EXPECT_EQ(Field(Eval("d.pvqnet", "pvq").out, "path=", "accuracy"), before);
  }
}

TEST_F(CliTest, StatsPrintsHistogramTable) {
  ASSERT_EQ(Quantize().code, 0);
  const Result r = Cli({"stats", "--model", P("q.pvqnet")});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("Layer", 0), 0u);
  EXPECT_NE(r.out.find("CONV0"), std::string::npos);
  EXPECT_NE(r.out.find("%"), std::string::npos);
  EXPECT_EQ(Cli({"stats", "--model", P("float.pvqnet")}).code, 5);
}

TEST_F(CliTest, CyclesComparesArchitectures) {
  ASSERT_EQ(Quantize().code, 0);
  const Result r = Cli({"cycles", "--model", P("q.pvqnet")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("arch=addsub", 0), 0u);
  // CONV0: 4 filters over 8x8 positions; FC2: 5 rows.
  EXPECT_EQ(Field(r.out, "layer=CONV0", "dots"), "256");
  EXPECT_EQ(Field(r.out, "layer=FC2", "dots"), "5");
  const double ratio = std::stod(Field(r.out, "compare", "multiplier/addsub"));
  // nnz over pulses: one cycle per non-zero against one per unit of |w|.
  EXPECT_GT(ratio, 0.0);
  EXPECT_LE(ratio, 1.0);
  const Result m = Cli({"cycles", "--model", P("q.pvqnet"), "--arch", "multiplier"});
  EXPECT_EQ(Field(m.out, "total", "cycles"), Field(r.out, "compare", "multiplier"));
  EXPECT_EQ(Cli({"cycles", "--model", P("q.pvqnet"), "--arch", "abacus"}).code, 2);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(Cli({}).code, 2);
  EXPECT_EQ(Cli({"frobnicate"}).code, 2);
  EXPECT_EQ(Cli({"quantize", "--model", P("float.pvqnet"), "--out", P("x")}).code, 2);
  EXPECT_EQ(Cli({"quantize", "--model", P("float.pvqnet"), "--ratio", "2", "--preset", "mnist-a", "--out", P("x")}).code, 2);
  EXPECT_EQ(Cli({"eval", "--model", P("float.pvqnet")}).code, 2);
  EXPECT_EQ(Cli({"quantize", "--model", P("missing"), "--ratio", "2", "--out", P("x")}).code, 3);
  write_file(P("junk"), std::vector<std::uint8_t>{'n', 'o', 'p', 'e'});
  EXPECT_EQ(Cli({"stats", "--model", P("junk")}).code, 4);
  EXPECT_EQ(Cli({"decompress", "--in", P("junk"), "--out", P("x")}).code, 4);
  EXPECT_EQ(Cli({"quantize", "--model", P("float.pvqnet"), "--ratio", "0", "--out", P("x")}).code, 5);
  // The mnist-a preset names layers this network does not have.
  EXPECT_EQ(Cli({"quantize", "--model", P("float.pvqnet"), "--preset", "mnist-a", "--out", P("x")}).code, 5);
  EXPECT_EQ(Cli({"--version"}).code, 0);
}

TEST_F(CliTest, IndexCodecOverflowExitCode) {
  std::mt19937_64 rng(3);
  write_model(P("wide.pvqnet"), testing::RandomMlp(rng, {1000, 40}));
  ASSERT_EQ(Cli({"quantize", "--model", P("wide.pvqnet"), "--ratio", "1", "--out", P("wq.pvqnet")}).code, 0);
  const Result r = Cli({"compress", "--model", P("wq.pvqnet"), "--codec", "index", "--out", P("w.cmp")});
  EXPECT_EQ(r.code, 6);
  EXPECT_NE(r.err.find("exp-golomb"), std::string::npos);
  EXPECT_FALSE(std::filesystem::exists(P("w.cmp")));
}

}  // namespace
}  // namespace pvqnet
