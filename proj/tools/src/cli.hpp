// Copyright 2026 The embprobe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EMBPROBE_TOOLS_CLI_HPP_
#define EMBPROBE_TOOLS_CLI_HPP_

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "embprobe/synthbench.hpp"

namespace embprobe::cli {

enum class Command { kValidate, kTrials, kEer, kSimilarity, kProbe, kTsne, kSynth, kReport, kAll };

std::string_view ToString(Command command);

struct EmbeddingInput {
  std::string name;  // architecture
  std::string path;
};

struct Plan {
  Command command = Command::kAll;
  std::string manifest;
  std::vector<EmbeddingInput> embeddings;
  std::string out;
  std::uint64_t seed = 0;
  int threads = 1;

  int per_speaker = 1000;
  int same = 200;
  std::string trials;  // existing trials CSV; empty = sample

  double train_fraction = 0.8;
  std::vector<std::string> tasks;  // empty = all

  double perplexity = 30.0;
  int iterations = 1000;
  std::string scope = "global";

  SynthSpec synth;
};

class UsageError : public std::runtime_error {
 public:
  UsageError(const std::string &message, std::string help)
      : std::runtime_error(message), help_(std::move(help)) {}
  const std::string &help() const noexcept { return help_; }

 private:
  std::string help_;
};

// Throws UsageError. `--help` is reported as a UsageError with an empty
// message.
Plan ParseArgs(const std::vector<std::string> &args);

// Runs the plan; module errors propagate as embprobe::Error.
void Execute(const Plan &plan, std::ostream &out, std::ostream &err);

// Full command-line entry point: 0 ok, 1 domain error, 2 usage error.
int Run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace embprobe::cli

#endif  // EMBPROBE_TOOLS_CLI_HPP_
