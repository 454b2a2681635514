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

#ifndef PVQNET_ERROR_HPP_
#define PVQNET_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace pvqnet {

// Error categories. The numeric values are the process exit codes used by
// the command-line tool.
enum class ErrorKind : int {
  kInvalidArgument = 1,
  kUsage = 2,
  kIo = 3,
  kFormat = 4,
  kShape = 5,
  kOverflow = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void Fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace pvqnet

#endif  // PVQNET_ERROR_HPP_
