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

#ifndef TALKGAMES_DIALOGUE_EPISODE_H_
#define TALKGAMES_DIALOGUE_EPISODE_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "talkgames/agents/policy.h"
#include "talkgames/dialogue/conversation.h"
#include "talkgames/game/types.h"
#include "talkgames/util/random.h"

namespace talkgames::dialogue {

struct Episode {
  std::string episode_id;
  game::GameSpec spec;
  std::uint64_t seed = 0;
  std::array<std::string, 2> players;
  std::vector<Turn> turns;
  std::array<double, 2> utilities{0.0, 0.0};
  std::string algo_tag;
  int trained_player = -1;
  // Free-form annotations such as elicited distributions or rollout groups.
  nlohmann::json extra = nlohmann::json::object();

  // Rebuilds the conversation by stepping through the logged turns.
  Conversation Replay(const TemplateLibrary* templates = nullptr) const;
};

struct EpisodeOptions {
  // Extra attempts after an unusable agent output before falling back.
  int max_resamples = 3;
};

// Uniform random legal game action for `player`, used after repeated failures.
game::Action FallbackAction(const Conversation& conversation, int player,
                            util::Rng& rng);

// Per-player streams used to continue a conversation from its seed.
struct PlayerStreams {
  explicit PlayerStreams(std::uint64_t seed);
  std::array<util::Rng, 2> players;
  util::Rng fallback;
};

// Lets the current player act once: up to 1 + max_resamples attempts, then a
// forced fallback turn. AgentUnavailable propagates.
const Turn& TakeTurn(Conversation& conversation, agents::AgentPolicy& agent,
                     PlayerStreams& streams, const EpisodeOptions& options = {});

// Plays until terminal.
void PlayOut(Conversation& conversation,
             const std::array<agents::AgentPolicy*, 2>& agents,
             const EpisodeOptions& options = {});

Episode ToEpisode(const Conversation& conversation,
                  const std::array<agents::AgentPolicy*, 2>& agents);

// `first` is Player-1, `second` is Player-2.
Episode RunEpisode(const game::GameSpec& spec, agents::AgentPolicy& first,
                   agents::AgentPolicy& second, std::uint64_t seed,
                   const EpisodeOptions& options = {});

// JSON forms used by the JSONL episode log.
nlohmann::json SpecToJson(const game::GameSpec& spec);
game::GameSpec SpecFromJson(const nlohmann::json& j);
nlohmann::json TurnToJson(const Turn& turn);
Turn TurnFromJson(const nlohmann::json& j, game::GameKind kind);
nlohmann::json EpisodeToJson(const Episode& episode);
Episode EpisodeFromJson(const nlohmann::json& j);

void WriteEpisodeLine(std::ostream& out, const Episode& episode);
std::vector<Episode> ReadEpisodes(std::istream& in);
std::vector<Episode> ReadEpisodesFile(const std::string& path);

}  // namespace talkgames::dialogue

#endif  // TALKGAMES_DIALOGUE_EPISODE_H_
