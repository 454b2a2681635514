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

// IDX dataset files: big-endian magic and dimension fields, unsigned byte
// payload. Images use magic 0x00000803 (count, rows, cols), labels use
// 0x00000801 (count).

#ifndef PVQNET_IDX_HPP_
#define PVQNET_IDX_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pvqnet/quantizer.hpp"

namespace pvqnet {

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

struct IdxImages {
  std::uint32_t count = 0;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::uint8_t> pixels;
};

// Throw Error(kFormat) on a wrong magic, a truncated payload or trailing
// bytes.
IdxImages parse_idx_images(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> serialize_idx_images(const IdxImages& images);
std::vector<std::uint8_t> serialize_idx_labels(std::span<const std::uint8_t> labels);

// Reads both files; samples are shaped {1, rows, cols}. Throws Error(kIo)
// for unreadable files and Error(kShape) when the counts disagree.
LabeledSamples read_idx_dataset(const std::filesystem::path& images,
                                const std::filesystem::path& labels);

// Whole-file helpers shared by the model and dataset readers.
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace pvqnet

#endif  // PVQNET_IDX_HPP_
