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

#ifndef PVQNET_TENSOR_HPP_
#define PVQNET_TENSOR_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pvqnet/error.hpp"

namespace pvqnet {

using Shape = std::vector<std::size_t>;

std::size_t ShapeSize(const Shape& shape);
// "1x28x28"
std::string ShapeToString(const Shape& shape);

// Dense row-major tensor.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  explicit Tensor(Shape shape) : shape_(std::move(shape)), data_(ShapeSize(shape_)) {}
  Tensor(Shape shape, std::vector<T> data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (ShapeSize(shape_) != data_.size()) {
      Fail(ErrorKind::kShape, "Tensor: shape " + ShapeToString(shape_) + " holds " +
                                  std::to_string(ShapeSize(shape_)) + " values, got " +
                                  std::to_string(data_.size()));
    }
  }

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  std::span<const T> data() const { return data_; }
  std::span<T> data() { return data_; }
  const std::vector<T>& values() const { return data_; }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  // Same data under a different shape of equal size.
  Tensor Reshaped(Shape shape) const { return Tensor(std::move(shape), data_); }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<T> data_;
};

using RealTensor = Tensor<double>;
using IntTensor = Tensor<std::int64_t>;
// Values restricted to +1 / -1.
using BinaryTensor = Tensor<std::int8_t>;

// Bit view of binary activations: bit 0 is +1, bit 1 is -1.
std::vector<std::uint8_t> ToBits(const BinaryTensor& t);
BinaryTensor FromBits(Shape shape, std::span<const std::uint8_t> bits);

}  // namespace pvqnet

#endif  // PVQNET_TENSOR_HPP_
