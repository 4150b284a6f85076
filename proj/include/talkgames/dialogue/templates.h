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

#ifndef TALKGAMES_DIALOGUE_TEMPLATES_H_
#define TALKGAMES_DIALOGUE_TEMPLATES_H_

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "talkgames/game/types.h"

namespace talkgames::dialogue {

inline constexpr std::string_view kRpsInitial = "rps_initial";
inline constexpr std::string_view kRpsInitialNoPaper = "rps_initial_no_paper";
inline constexpr std::string_view kRpsOtherPlayed = "rps_other_played";
inline constexpr std::string_view kBertrandInitial = "bertrand_initial";
inline constexpr std::string_view kBertrandRoundResult = "bertrand_round_result";
inline constexpr std::string_view kBargainingBuyer = "bargaining_buyer";
inline constexpr std::string_view kBargainingSeller = "bargaining_seller";
inline constexpr std::string_view kNaturalnessJudge = "naturalness_judge";
inline constexpr std::string_view kElicitation = "elicitation";

class TemplateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using TemplateVars = std::map<std::string, std::string, std::less<>>;

// Named prompt templates with `{placeholder}` substitution. The built-in set
// is compiled from templates/*.txt; a directory can override any entry.
class TemplateLibrary {
 public:
  static const TemplateLibrary& Builtin();
  // Built-in templates overlaid with every *.txt file found in `dir`.
  static TemplateLibrary WithOverrides(const std::string& dir);

  const std::string& Raw(std::string_view name) const;
  // Throws TemplateError for unknown templates or placeholders without a value.
  std::string Render(std::string_view name, const TemplateVars& vars) const;

 private:
  std::map<std::string, std::string, std::less<>> templates_;
};

// Shortest decimal text that round-trips (70 -> "70", 0.2 -> "0.2").
std::string FormatNumber(double value);

std::string PlayerName(int player);

// Setting prompt shown to `player` as the opening system message.
std::string RenderSettingPrompt(const game::GameSpec& spec, int player,
                                const TemplateLibrary& templates =
                                    TemplateLibrary::Builtin());

// Mid-conversation notice that the opponent already played (RPS).
std::string RenderOpponentPlayed(const TemplateLibrary& templates =
                                     TemplateLibrary::Builtin());

// End-of-round notice for Bertrand; `my_benefit` is this player's profit.
std::string RenderRoundResult(std::int64_t my_price, std::int64_t other_price,
                              double my_benefit,
                              const TemplateLibrary& templates =
                                  TemplateLibrary::Builtin());

// Wraps a system text in Llama-3 header tokens, as the prompts are listed.
std::string WrapLlama3System(std::string_view text);

}  // namespace talkgames::dialogue

#endif  // TALKGAMES_DIALOGUE_TEMPLATES_H_
