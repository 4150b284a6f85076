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

#include "talkgames/training/rollout.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <ostream>
#include <regex>
#include <sstream>

namespace talkgames::training {
namespace {

using nlohmann::json;

constexpr char kResponsesMarker[] = "Now evaluate the following responses:";

std::string OneLine(const std::string& text) {
  std::string out = text;
  std::replace(out.begin(), out.end(), '\n', ' ');
  std::replace(out.begin(), out.end(), '\r', ' ');
  return out;
}

json MessagesToJson(const std::vector<dialogue::Message>& messages) {
  json out = json::array();
  for (const auto& m : messages) out.push_back({{"role", m.role}, {"content", m.content}});
  return out;
}

std::vector<dialogue::Message> MessagesFromJson(const json& j) {
  std::vector<dialogue::Message> out;
  for (const auto& m : j) {
    out.push_back({m.at("role").get<std::string>(), m.at("content").get<std::string>()});
  }
  return out;
}

}  // namespace

RewardShapingConfig RewardShapingConfig::Unshaped() {
  RewardShapingConfig c;
  c.lo_weight = 0.0;
  c.ise_weight = 0.0;
  c.naturalness_weight = 0.0;
  return c;
}

void RewardShapingConfig::Validate() const {
  if (!std::isfinite(lo_weight) || !std::isfinite(ise_weight) ||
      !std::isfinite(naturalness_weight)) {
    throw std::invalid_argument("shaping weights must be finite");
  }
  if (!(naturalness_threshold >= 0.0 && naturalness_threshold <= 1.0)) {
    throw std::invalid_argument("naturalness threshold must be in [0, 1]");
  }
}

RewardBreakdown ShapedReward(double utility, const std::optional<signals::SignalReport>& report,
                             std::optional<double> natural_fraction,
                             const RewardShapingConfig& config) {
  RewardBreakdown r;
  r.utility = utility;
  r.total = utility;
  if (report) {
    r.lo = report->lo;
    r.ise = report->ise;
    r.total += config.lo_weight * r.lo + config.ise_weight * r.ise;
  }
  r.natural_fraction = natural_fraction;
  if (natural_fraction && *natural_fraction >= config.naturalness_threshold) {
    r.naturalness_bonus = config.naturalness_weight;
    r.total += r.naturalness_bonus;
  }
  return r;
}

std::optional<signals::ScheduledSignal> FinalActionSignals(const dialogue::Episode& episode,
                                                           int trained,
                                                           agents::AgentPolicy& trained_agent,
                                                           agents::AgentPolicy& opponent) {
  if (episode.spec.kind == game::GameKind::kBargaining) return std::nullopt;
  auto schedule = signals::SignalSchedule(episode, trained, trained_agent, opponent);
  if (schedule.empty()) return std::nullopt;
  return std::move(schedule.back());
}

std::string RenderJudgePrompt(std::span<const std::string> texts,
                              const dialogue::TemplateLibrary& templates) {
  std::string prompt = templates.Render(dialogue::kNaturalnessJudge, {});
  if (!prompt.empty() && prompt.back() != '\n') prompt += '\n';
  for (const auto& t : texts) prompt += "Response: \"" + OneLine(t) + "\"\n";
  return prompt;
}

std::vector<bool> ParseJudgeVerdicts(const std::string& reply, std::size_t n) {
  static const std::regex kVerdict(R"(naturalness score:\s*(yes|no))", std::regex::icase);
  std::vector<bool> out(n, false);
  std::size_t i = 0;
  for (auto it = std::sregex_iterator(reply.begin(), reply.end(), kVerdict);
       it != std::sregex_iterator() && i < n; ++it, ++i) {
    const auto word = (*it)[1].str();
    out[i] = std::tolower(static_cast<unsigned char>(word[0])) == 'y';
  }
  return out;
}

bool LooksNatural(const std::string& text) {
  std::vector<std::string> words;
  std::string word;
  bool letters = false;
  for (char ch : text + " ") {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || ch == '\'') {
      letters = letters || std::isalpha(c);
      word += static_cast<char>(std::tolower(c));
    } else if (!word.empty()) {
      words.push_back(word);
      word.clear();
    }
  }
  if (!letters || words.size() < 3) return false;
  std::map<std::string, int> counts;
  int top = 0;
  for (const auto& w : words) top = std::max(top, ++counts[w]);
  return 2 * top <= static_cast<int>(words.size());
}

std::string HeuristicJudge::Complete(const std::vector<dialogue::Message>& messages) {
  if (messages.empty()) return "";
  const std::string& prompt = messages.back().content;
  const auto start = prompt.find(kResponsesMarker);
  std::istringstream in(start == std::string::npos ? prompt : prompt.substr(start));
  std::string line;
  std::string reply;
  while (std::getline(in, line)) {
    if (line.rfind("Response: \"", 0) != 0) continue;
    const auto first = line.find('"');
    const auto last = line.rfind('"');
    const std::string text = last > first ? line.substr(first + 1, last - first - 1) : "";
    reply += std::string("Naturalness score: ") + (LooksNatural(text) ? "Yes" : "No") + "\n";
  }
  return reply;
}

double NaturalnessFraction(std::span<const std::string> texts, agents::ChatBackend& judge,
                           const dialogue::TemplateLibrary& templates) {
  if (texts.empty()) return 0.0;
  std::string reply;
  try {
    reply = judge.Complete({{"user", RenderJudgePrompt(texts, templates)}});
  } catch (const agents::ChatError& e) {
    throw JudgeError(std::string("naturalness judge unavailable: ") + e.what());
  }
  const auto verdicts = ParseJudgeVerdicts(reply, texts.size());
  const auto yes = std::count(verdicts.begin(), verdicts.end(), true);
  return static_cast<double>(yes) / static_cast<double>(texts.size());
}

std::vector<std::string> TalkTexts(const dialogue::Episode& episode, int player) {
  std::vector<std::string> out;
  for (const auto& t : episode.turns) {
    if (t.player == player && t.talk && !t.talk->empty()) out.push_back(*t.talk);
  }
  return out;
}

BranchSelector ParseBranchSelector(const std::string& name) {
  if (name == "first") return BranchSelector::kFirst;
  if (name == "uniform") return BranchSelector::kUniform;
  if (name == "last") return BranchSelector::kLast;
  throw std::invalid_argument("unknown branch selector '" + name + "'");
}

std::string BranchSelectorName(BranchSelector selector) {
  switch (selector) {
    case BranchSelector::kFirst:
      return "first";
    case BranchSelector::kUniform:
      return "uniform";
    case BranchSelector::kLast:
      return "last";
  }
  return "uniform";
}

std::array<agents::AgentPolicy*, 2> RolloutSetup::seats() const {
  std::array<agents::AgentPolicy*, 2> s{};
  s[trained_player] = trained;
  s[1 - trained_player] = opponent;
  return s;
}

RewardBreakdown ScoreEpisode(const RolloutSetup& setup, const dialogue::Episode& episode) {
  std::optional<signals::SignalReport> report;
  if (setup.shaping.needs_signals()) {
    if (auto s = FinalActionSignals(episode, setup.trained_player, *setup.trained,
                                    *setup.opponent)) {
      report = s->report;
    }
  }
  std::optional<double> fraction;
  if (setup.shaping.naturalness_weight != 0.0 && setup.judge) {
    try {
      fraction = NaturalnessFraction(TalkTexts(episode, setup.trained_player), *setup.judge,
                                     dialogue::TemplateLibrary::Builtin());
    } catch (const JudgeError& e) {
      if (setup.warn) setup.warn(std::string(e.what()) + "; naturalness bonus set to 0");
    }
  }
  return ShapedReward(episode.utilities[setup.trained_player], report, fraction,
                      setup.shaping);
}

RolloutGroup BranchAndRollout(const RolloutSetup& setup, int k, std::uint64_t seed,
                              BranchSelector selector) {
  if (!setup.trained || !setup.opponent) throw std::invalid_argument("rollout needs two agents");
  if (k < 1) throw std::invalid_argument("rollout needs k >= 1");
  const auto seats = setup.seats();
  dialogue::Conversation root(setup.spec, seed);
  dialogue::PlayOut(root, seats, setup.episode_options);

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < root.turns().size(); ++i) {
    const auto& t = root.turns()[i];
    if (t.player == setup.trained_player && !t.forced) candidates.push_back(i);
  }
  if (candidates.empty()) {
    throw NoBranchPoint("root conversation ended before the trained player acted");
  }
  std::size_t pick = 0;
  switch (selector) {
    case BranchSelector::kFirst:
      pick = candidates.front();
      break;
    case BranchSelector::kLast:
      pick = candidates.back();
      break;
    case BranchSelector::kUniform: {
      util::Rng rng(util::DeriveSeed(seed, {0x5E1}));
      pick = candidates[static_cast<std::size_t>(
          rng.UniformInt(0, static_cast<std::int64_t>(candidates.size()) - 1))];
      break;
    }
  }

  const auto prefix = root.Prefix(pick);
  RolloutGroup group;
  group.root_id = "root-" + std::to_string(seed);
  group.root_seed = seed;
  group.branch_turn = static_cast<int>(pick);
  group.context = prefix.View(setup.trained_player).messages;
  const auto& theta = setup.trained->params();
  const auto& model = setup.trained->model();
  for (auto& branch : dialogue::Fork(prefix, k)) {
    dialogue::PlayOut(branch, seats, setup.episode_options);
    const auto& turn = branch.turns()[pick];
    Completion c;
    c.decisions = setup.trained->DecisionsFor(prefix, turn);
    c.logprob_old = model.SequenceLogProb(theta, c.decisions);
    if (!setup.ref_params.empty()) {
      c.logprob_ref = model.SequenceLogProb(setup.ref_params, c.decisions);
    }
    auto episode = dialogue::ToEpisode(branch, seats);
    episode.trained_player = setup.trained_player;
    episode.extra["root_id"] = group.root_id;
    episode.extra["branch_turn"] = group.branch_turn;
    const auto reward = ScoreEpisode(setup, episode);
    c.reward = reward.total;
    group.completions.push_back(std::move(c));
    group.texts.push_back(dialogue::SerializeTurn(turn.content()));
    group.rewards.push_back(reward);
    group.episodes.push_back(std::move(episode));
  }
  return group;
}

json RolloutGroupToJson(const RolloutGroup& group) {
  json rewards = json::array();
  json breakdown = json::array();
  for (const auto& r : group.rewards) {
    rewards.push_back(r.total);
    json b = {{"utility", r.utility}, {"lo", r.lo}, {"ise", r.ise},
              {"naturalness_bonus", r.naturalness_bonus}};
    if (r.natural_fraction) b["natural_fraction"] = *r.natural_fraction;
    breakdown.push_back(std::move(b));
  }
  json episode_ids = json::array();
  for (const auto& e : group.episodes) episode_ids.push_back(e.episode_id);
  return {{"root_id", group.root_id},
          {"root_seed", group.root_seed},
          {"branch_turn", group.branch_turn},
          {"context", MessagesToJson(group.context)},
          {"completions", group.texts},
          {"rewards", std::move(rewards)},
          {"reward_breakdown", std::move(breakdown)},
          {"episode_ids", std::move(episode_ids)}};
}

LoggedGroup LoggedGroupFromJson(const json& j) {
  LoggedGroup g;
  g.root_id = j.value("root_id", "");
  g.branch_turn = j.value("branch_turn", 0);
  g.context = MessagesFromJson(j.at("context"));
  g.texts = j.at("completions").get<std::vector<std::string>>();
  g.rewards = j.at("rewards").get<std::vector<double>>();
  if (g.texts.size() != g.rewards.size()) {
    throw std::invalid_argument("rollout record has mismatched completions and rewards");
  }
  return g;
}

ExportFormat ParseExportFormat(const std::string& name) {
  if (name == "dpo") return ExportFormat::kDpo;
  if (name == "grpo") return ExportFormat::kGrpo;
  throw std::invalid_argument("unknown export format '" + name + "' (expected dpo or grpo)");
}

std::size_t ExportPreferences(std::span<const LoggedGroup> groups, ExportFormat format,
                              std::ostream& out) {
  std::size_t lines = 0;
  for (const auto& g : groups) {
    const auto context = MessagesToJson(g.context);
    if (format == ExportFormat::kGrpo) {
      const bool informative = std::any_of(g.rewards.begin(), g.rewards.end(),
                                           [&](double r) { return r != g.rewards.front(); });
      if (!informative) continue;
      out << json{{"context", context}, {"completions", g.texts}, {"rewards", g.rewards}}.dump()
          << '\n';
      ++lines;
      continue;
    }
    for (std::size_t i = 0; i < g.texts.size(); ++i) {
      for (std::size_t j = i + 1; j < g.texts.size(); ++j) {
        if (g.rewards[i] == g.rewards[j]) continue;
        const std::size_t w = g.rewards[i] > g.rewards[j] ? i : j;
        const std::size_t l = w == i ? j : i;
        out << json{{"context", context},
                    {"chosen", g.texts[w]},
                    {"rejected", g.texts[l]},
                    {"chosen_reward", g.rewards[w]},
                    {"rejected_reward", g.rewards[l]}}
                   .dump()
            << '\n';
        ++lines;
      }
    }
  }
  return lines;
}

}  // namespace talkgames::training
