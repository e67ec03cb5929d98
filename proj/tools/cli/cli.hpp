// Copyright 2026 The cqed-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CQED_TOOLS_CLI_HPP_
#define CQED_TOOLS_CLI_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cqed/model.hpp"

namespace cqed::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitUsage = 64;

/// Runs one subcommand (spectrum, modes, sweep, readout, fit, validate).
/// `args` excludes the program name. Artifacts and manifest.json go to --out.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses and validates a configuration file, reporting all errors at once.
ValidatedConfig load_config(const std::filesystem::path& path);

}  // namespace cqed::cli

#endif  // CQED_TOOLS_CLI_HPP_
