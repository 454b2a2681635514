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

// Command-line front end. Exit codes: 0 success, 2 usage, 3 I/O, 4 format,
// 5 shape/config, 6 overflow.

#ifndef PVQNET_TOOLS_CLI_HPP_
#define PVQNET_TOOLS_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace pvqnet::cli {

// args excludes the program name. Reports go to out, diagnostics to err.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pvqnet::cli

#endif  // PVQNET_TOOLS_CLI_HPP_
