// Copyright 2026 The umlsqa Authors.
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

#ifndef UMLSQA_TOOLS_CLI_H_
#define UMLSQA_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace umlsqa::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kValidation = 2,  // usage errors, bad input files, unknown ids
  kProvider = 3,    // LLM / UMLS / embedder failures, bad credentials
  kStorage = 4,     // local I/O
};

// `args` excludes the program name.
int Dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace umlsqa::cli

#endif  // UMLSQA_TOOLS_CLI_H_
