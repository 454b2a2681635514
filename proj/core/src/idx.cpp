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

#include "pvqnet/idx.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>

#include "pvqnet/error.hpp"

namespace pvqnet {
namespace {

std::uint32_t GetU32(std::span<const std::uint8_t> in, std::size_t at) {
  return (std::uint32_t{in[at]} << 24) | (std::uint32_t{in[at + 1]} << 16) |
         (std::uint32_t{in[at + 2]} << 8) | std::uint32_t{in[at + 3]};
}

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

std::uint32_t ExpectMagic(std::span<const std::uint8_t> bytes, std::uint32_t magic, const char* what) {
  if (bytes.size() < 4) Fail(ErrorKind::kFormat, std::string("truncated IDX ") + what + " header");
  const std::uint32_t got = GetU32(bytes, 0);
  if (got != magic) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "bad IDX %s magic 0x%08x", what, static_cast<unsigned>(got));
    Fail(ErrorKind::kFormat, buf);
  }
  return got;
}

void ExpectPayload(std::span<const std::uint8_t> bytes, std::size_t header, std::uint64_t expected,
                   const char* what) {
  const std::uint64_t got = bytes.size() - header;
  if (got < expected) Fail(ErrorKind::kFormat, std::string("truncated IDX ") + what + " payload");
  if (got > expected) Fail(ErrorKind::kFormat, std::string("trailing bytes after IDX ") + what);
}

}  // namespace

IdxImages parse_idx_images(std::span<const std::uint8_t> bytes) {
  ExpectMagic(bytes, kIdxImagesMagic, "images");
  if (bytes.size() < 16) Fail(ErrorKind::kFormat, "truncated IDX images header");
  IdxImages img;
  img.count = GetU32(bytes, 4);
  img.rows = GetU32(bytes, 8);
  img.cols = GetU32(bytes, 12);
  const std::uint64_t size = std::uint64_t{img.count} * img.rows * img.cols;
  ExpectPayload(bytes, 16, size, "images");
  img.pixels.assign(bytes.begin() + 16, bytes.end());
  return img;
}

std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes) {
  ExpectMagic(bytes, kIdxLabelsMagic, "labels");
  if (bytes.size() < 8) Fail(ErrorKind::kFormat, "truncated IDX labels header");
  const std::uint32_t count = GetU32(bytes, 4);
  ExpectPayload(bytes, 8, count, "labels");
  return {bytes.begin() + 8, bytes.end()};
}

std::vector<std::uint8_t> serialize_idx_images(const IdxImages& images) {
  if (images.pixels.size() != std::uint64_t{images.count} * images.rows * images.cols) {
    Fail(ErrorKind::kShape, "IDX images: pixel count does not match the dimensions");
  }
  std::vector<std::uint8_t> out;
  out.reserve(16 + images.pixels.size());
  PutU32(out, kIdxImagesMagic);
  PutU32(out, images.count);
  PutU32(out, images.rows);
  PutU32(out, images.cols);
  out.insert(out.end(), images.pixels.begin(), images.pixels.end());
  return out;
}

std::vector<std::uint8_t> serialize_idx_labels(std::span<const std::uint8_t> labels) {
  std::vector<std::uint8_t> out;
  out.reserve(8 + labels.size());
  PutU32(out, kIdxLabelsMagic);
  PutU32(out, static_cast<std::uint32_t>(labels.size()));
  out.insert(out.end(), labels.begin(), labels.end());
  return out;
}

LabeledSamples read_idx_dataset(const std::filesystem::path& images,
                                const std::filesystem::path& labels) {
  IdxImages img = parse_idx_images(read_file(images));
  std::vector<std::uint8_t> lab = parse_idx_labels(read_file(labels));
  if (lab.size() != img.count) {
    Fail(ErrorKind::kShape, "dataset has " + std::to_string(img.count) + " images but " +
                                std::to_string(lab.size()) + " labels");
  }
  LabeledSamples s;
  s.sample_shape = {1, img.rows, img.cols};
  s.pixels = std::move(img.pixels);
  s.labels = std::move(lab);
  return s;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) Fail(ErrorKind::kIo, "cannot read " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorKind::kIo, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) Fail(ErrorKind::kIo, "cannot write " + path.string());
}

}  // namespace pvqnet
