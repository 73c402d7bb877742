// Copyright 2026 The Concept Forge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CONCEPT_FORGE_CLI_CLI_HPP_
#define CONCEPT_FORGE_CLI_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace concept_forge::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kMissingArtifact = 3,
  kBadReference = 4,
  kUsage = 64,
};

// Runs one command line (args[0] is the program name) and returns the exit
// code. Output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace concept_forge::cli

#endif  // CONCEPT_FORGE_CLI_CLI_HPP_
