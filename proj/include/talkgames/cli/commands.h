// Copyright 2026 The Talkgames Authors
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

#ifndef TALKGAMES_CLI_COMMANDS_H_
#define TALKGAMES_CLI_COMMANDS_H_

#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "talkgames/agents/remote.h"
#include "talkgames/training/trainer.h"

namespace talkgames::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Everything a command can be configured with.
struct RunConfig {
  training::TrainRunConfig train;
  agents::RemoteAgentConfig remote;
};

// INI text with sections [game], [agents], [training] and [shaping]. Unknown
// keys are rejected. Players are numbered 1 and 2 in the file. Throws
// ConfigError.
RunConfig ParseConfig(const std::string& text);
RunConfig LoadConfig(const std::string& path);
// Fully populated INI text for `config`; ParseConfig(Dump(c)) == c.
std::string DumpConfig(const RunConfig& config);

// Builds the fixed agent for `spec` ("remote" or a scripted agent spec).
std::unique_ptr<agents::AgentPolicy> MakeOpponent(const std::string& spec,
                                                  const RunConfig& config);
// Builds the naturalness judge named in the config, or nullptr for "none".
std::unique_ptr<agents::ChatBackend> MakeJudge(const RunConfig& config);

// Runs the command line `args` (without the program name). Returns the exit
// code.
int Run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace talkgames::cli

#endif  // TALKGAMES_CLI_COMMANDS_H_
