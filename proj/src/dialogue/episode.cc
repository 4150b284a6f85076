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

#include "talkgames/dialogue/episode.h"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "talkgames/game/rules.h"

namespace talkgames::dialogue {

using nlohmann::json;

Conversation Episode::Replay(const TemplateLibrary* templates) const {
  Conversation conversation(spec, seed, templates);
  for (const auto& turn : turns) conversation.Step(turn);
  return conversation;
}

game::Action FallbackAction(const Conversation& conversation, int player,
                            util::Rng& rng) {
  const auto& spec = conversation.spec();
  switch (spec.kind) {
    case game::GameKind::kRps: {
      const auto moves = conversation.legal_actions(player).moves;
      return moves[static_cast<std::size_t>(
          rng.UniformInt(0, static_cast<std::int64_t>(moves.size()) - 1))];
    }
    case game::GameKind::kBertrand: {
      const auto top = static_cast<std::int64_t>(std::floor(spec.bertrand.p_max));
      return game::Price{rng.UniformInt(0, top)};
    }
    case game::GameKind::kBargaining: {
      const auto& b = spec.bargaining;
      if (conversation.offer_to(player) && rng.Uniform01() < 0.5) {
        return game::Accept{};
      }
      const int n_eq = std::max(1, static_cast<int>(std::floor(b.value / b.cost)));
      game::Proposal proposal;
      proposal.units = static_cast<int>(rng.UniformInt(1, 3 * n_eq));
      const auto lo = static_cast<std::int64_t>(std::ceil(b.cost));
      const auto hi = std::max(lo, static_cast<std::int64_t>(std::floor(b.value)));
      proposal.price_cents = 100 * rng.UniformInt(lo, hi);
      return proposal;
    }
  }
  throw std::logic_error("unknown game");
}

PlayerStreams::PlayerStreams(std::uint64_t seed)
    : players{util::Rng(util::DeriveSeed(seed, {0})),
              util::Rng(util::DeriveSeed(seed, {1}))},
      fallback(util::DeriveSeed(seed, {2})) {}

const Turn& TakeTurn(Conversation& conversation, agents::AgentPolicy& agent,
                     PlayerStreams& streams, const EpisodeOptions& options) {
  const int player = conversation.current_player();
  if (player < 0) throw TerminalConversation("conversation is over");
  for (int attempt = 0; attempt <= options.max_resamples; ++attempt) {
    auto result = agent.Act(conversation, player, streams.players[player]);
    try {
      const auto content = ParseAgentOutput(result.text, conversation.spec());
      return conversation.Apply(content, false, std::move(result.trace));
    } catch (const ParseError&) {
    } catch (const IllegalAction&) {
    }
  }
  TurnContent forced;
  forced.play = FallbackAction(conversation, player, streams.fallback);
  if (conversation.spec().kind == game::GameKind::kBertrand) forced.talk = "";
  return conversation.Apply(forced, true);
}

void PlayOut(Conversation& conversation,
             const std::array<agents::AgentPolicy*, 2>& agents,
             const EpisodeOptions& options) {
  PlayerStreams streams(conversation.seed());
  while (!conversation.terminal()) {
    TakeTurn(conversation, *agents[conversation.current_player()], streams, options);
  }
}

Episode ToEpisode(const Conversation& conversation,
                  const std::array<agents::AgentPolicy*, 2>& agents) {
  Episode episode;
  episode.episode_id = "ep-" + std::to_string(conversation.seed());
  episode.spec = conversation.spec();
  episode.seed = conversation.seed();
  for (int p = 0; p < 2; ++p) episode.players[p] = agents[p] ? agents[p]->name() : "";
  episode.turns = conversation.turns();
  if (conversation.outcome()) episode.utilities = *conversation.outcome();
  return episode;
}

Episode RunEpisode(const game::GameSpec& spec, agents::AgentPolicy& first,
                   agents::AgentPolicy& second, std::uint64_t seed,
                   const EpisodeOptions& options) {
  Conversation conversation(spec, seed);
  const std::array<agents::AgentPolicy*, 2> agents{&first, &second};
  PlayOut(conversation, agents, options);
  return ToEpisode(conversation, agents);
}

json SpecToJson(const game::GameSpec& spec) {
  return {
      {"kind", game::GameKindName(spec.kind)},
      {"max_interactions", spec.max_interactions},
      {"rps_constrained", spec.rps_constrained},
      {"constrained_player", spec.constrained_player},
      {"seller_player", spec.seller_player},
      {"bertrand",
       {{"product", spec.bertrand.product},
        {"cost", spec.bertrand.cost},
        {"demand_slope", spec.bertrand.demand_slope},
        {"p_max", spec.bertrand.p_max},
        {"rounds", spec.bertrand.rounds}}},
      {"bargaining",
       {{"product", spec.bargaining.product},
        {"cost", spec.bargaining.cost},
        {"value", spec.bargaining.value}}},
  };
}

game::GameSpec SpecFromJson(const json& j) {
  game::GameSpec spec;
  spec.kind = game::ParseGameKind(j.at("kind").get<std::string>());
  spec.max_interactions = j.value("max_interactions", spec.max_interactions);
  spec.rps_constrained = j.value("rps_constrained", spec.rps_constrained);
  spec.constrained_player = j.value("constrained_player", spec.constrained_player);
  spec.seller_player = j.value("seller_player", spec.seller_player);
  if (j.contains("bertrand")) {
    const auto& b = j.at("bertrand");
    spec.bertrand.product = b.value("product", spec.bertrand.product);
    spec.bertrand.cost = b.value("cost", spec.bertrand.cost);
    spec.bertrand.demand_slope = b.value("demand_slope", spec.bertrand.demand_slope);
    spec.bertrand.p_max = b.value("p_max", spec.bertrand.p_max);
    spec.bertrand.rounds = b.value("rounds", spec.bertrand.rounds);
  }
  if (j.contains("bargaining")) {
    const auto& b = j.at("bargaining");
    spec.bargaining.product = b.value("product", spec.bargaining.product);
    spec.bargaining.cost = b.value("cost", spec.bargaining.cost);
    spec.bargaining.value = b.value("value", spec.bargaining.value);
  }
  spec.Validate();
  return spec;
}

json TurnToJson(const Turn& turn) {
  json j = {
      {"index", turn.index},
      {"player", turn.player},
      {"think", turn.think},
      {"talk", turn.talk ? json(*turn.talk) : json(nullptr)},
      {"play", turn.play ? json(FormatAction(*turn.play)) : json(nullptr)},
      {"forced", turn.forced},
      {"injections_before", turn.injections_before},
  };
  if (!turn.trace.empty()) j["trace"] = turn.trace;
  return j;
}

Turn TurnFromJson(const json& j, game::GameKind kind) {
  Turn turn;
  turn.index = j.at("index").get<int>();
  turn.player = j.at("player").get<int>();
  turn.think = j.value("think", "");
  if (j.contains("talk") && !j.at("talk").is_null()) {
    turn.talk = j.at("talk").get<std::string>();
  }
  if (j.contains("play") && !j.at("play").is_null()) {
    turn.play = ParsePlay(j.at("play").get<std::string>(), kind);
  }
  turn.forced = j.value("forced", false);
  if (j.contains("injections_before")) {
    turn.injections_before = j.at("injections_before").get<std::vector<std::string>>();
  }
  if (j.contains("trace")) turn.trace = j.at("trace").get<std::vector<int>>();
  return turn;
}

json EpisodeToJson(const Episode& episode) {
  json turns = json::array();
  for (const auto& t : episode.turns) turns.push_back(TurnToJson(t));
  json j = {
      {"episode_id", episode.episode_id},
      {"spec", SpecToJson(episode.spec)},
      {"seed", episode.seed},
      {"players", episode.players},
      {"turns", std::move(turns)},
      {"outcome", {{"utilities", episode.utilities}}},
      {"algo_tag", episode.algo_tag},
      {"trained_player", episode.trained_player},
  };
  if (!episode.extra.empty()) j["extra"] = episode.extra;
  return j;
}

Episode EpisodeFromJson(const json& j) {
  Episode episode;
  episode.episode_id = j.value("episode_id", "");
  episode.spec = SpecFromJson(j.at("spec"));
  episode.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("players")) {
    episode.players = j.at("players").get<std::array<std::string, 2>>();
  }
  for (const auto& t : j.at("turns")) {
    episode.turns.push_back(TurnFromJson(t, episode.spec.kind));
  }
  episode.utilities =
      j.at("outcome").at("utilities").get<std::array<double, 2>>();
  episode.algo_tag = j.value("algo_tag", "");
  episode.trained_player = j.value("trained_player", -1);
  if (j.contains("extra")) episode.extra = j.at("extra");
  return episode;
}

void WriteEpisodeLine(std::ostream& out, const Episode& episode) {
  out << EpisodeToJson(episode).dump() << '\n';
}

std::vector<Episode> ReadEpisodes(std::istream& in) {
  std::vector<Episode> episodes;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      episodes.push_back(EpisodeFromJson(json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error("episode log line " + std::to_string(line_no) +
                               ": " + e.what());
    }
  }
  return episodes;
}

std::vector<Episode> ReadEpisodesFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return ReadEpisodes(in);
}

}  // namespace talkgames::dialogue
