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

#include "talkgames/cli/commands.h"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "CLI11.hpp"
#include "json.hpp"
#include "talkgames/agents/scripted.h"
#include "talkgames/agents/template_policy.h"
#include "talkgames/dialogue/episode.h"
#include "talkgames/signals/signals.h"

#ifndef TALKGAMES_GIT_DESCRIBE
#define TALKGAMES_GIT_DESCRIBE "unknown"
#endif

namespace talkgames::cli {
namespace {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;
using nlohmann::json;

constexpr char kExportHelp[] =
    "Reads a rollout log (rollouts.jsonl from a training run) and writes JSONL.\n"
    "dpo:  one line per pair of completions with different rewards:\n"
    "      {\"context\": [{\"role\",\"content\"}...], \"chosen\": str, \"rejected\": str,\n"
    "       \"chosen_reward\": num, \"rejected_reward\": num}\n"
    "grpo: one line per group with at least two distinct rewards:\n"
    "      {\"context\": [...], \"completions\": [str...], \"rewards\": [num...]}";

template <typename T>
T ParseValue(const std::string& key, const std::string& raw) {
  std::istringstream in(raw);
  T value{};
  in >> value;
  if (in.fail() || !(in >> std::ws).eof()) {
    throw ConfigError("bad value '" + raw + "' for " + key);
  }
  return value;
}

template <>
bool ParseValue<bool>(const std::string& key, const std::string& raw) {
  if (raw == "true" || raw == "1" || raw == "yes") return true;
  if (raw == "false" || raw == "0" || raw == "no") return false;
  throw ConfigError("bad boolean '" + raw + "' for " + key);
}

int ParsePlayerNumber(const std::string& key, const std::string& raw) {
  const int p = ParseValue<int>(key, raw);
  if (p != 1 && p != 2) throw ConfigError(key + " must be 1 or 2");
  return p - 1;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& Setters() {
  static const auto* setters = new std::map<std::string, Setter>{
      {"game.kind",
       [](RunConfig& c, const std::string& v) {
         try {
           c.train.game.kind = game::ParseGameKind(v);
         } catch (const std::invalid_argument& e) {
           throw ConfigError(e.what());
         }
       }},
      {"game.max_interactions",
       [](RunConfig& c, const std::string& v) {
         c.train.game.max_interactions = ParseValue<int>("game.max_interactions", v);
       }},
      {"game.rps_constrained",
       [](RunConfig& c, const std::string& v) {
         c.train.game.rps_constrained = ParseValue<bool>("game.rps_constrained", v);
       }},
      {"game.constrained_player",
       [](RunConfig& c, const std::string& v) {
         c.train.game.constrained_player = ParsePlayerNumber("game.constrained_player", v);
       }},
      {"game.seller_player",
       [](RunConfig& c, const std::string& v) {
         c.train.game.seller_player = ParsePlayerNumber("game.seller_player", v);
       }},
      {"game.bertrand_product",
       [](RunConfig& c, const std::string& v) { c.train.game.bertrand.product = v; }},
      {"game.bertrand_cost",
       [](RunConfig& c, const std::string& v) {
         c.train.game.bertrand.cost = ParseValue<double>("game.bertrand_cost", v);
       }},
      {"game.bargaining_product",
       [](RunConfig& c, const std::string& v) { c.train.game.bargaining.product = v; }},
      {"game.bargaining_cost",
       [](RunConfig& c, const std::string& v) {
         c.train.game.bargaining.cost = ParseValue<double>("game.bargaining_cost", v);
       }},
      {"game.demand_slope",
       [](RunConfig& c, const std::string& v) {
         c.train.game.bertrand.demand_slope = ParseValue<double>("game.demand_slope", v);
       }},
      {"game.p_max",
       [](RunConfig& c, const std::string& v) {
         c.train.game.bertrand.p_max = ParseValue<double>("game.p_max", v);
       }},
      {"game.rounds",
       [](RunConfig& c, const std::string& v) {
         c.train.game.bertrand.rounds = ParseValue<int>("game.rounds", v);
       }},
      {"game.value",
       [](RunConfig& c, const std::string& v) {
         c.train.game.bargaining.value = ParseValue<double>("game.value", v);
       }},
      {"agents.opponent", [](RunConfig& c, const std::string& v) { c.train.opponent = v; }},
      {"agents.trained_player",
       [](RunConfig& c, const std::string& v) {
         c.train.trained_player = ParsePlayerNumber("agents.trained_player", v);
       }},
      {"agents.max_resamples",
       [](RunConfig& c, const std::string& v) {
         c.train.max_resamples = ParseValue<int>("agents.max_resamples", v);
       }},
      {"agents.trained_temperature",
       [](RunConfig& c, const std::string& v) {
         c.train.trained_temperature = ParseValue<double>("agents.trained_temperature", v);
       }},
      {"agents.fixed_temperature",
       [](RunConfig& c, const std::string& v) {
         c.train.fixed_temperature = ParseValue<double>("agents.fixed_temperature", v);
       }},
      {"agents.endpoint", [](RunConfig& c, const std::string& v) { c.remote.endpoint = v; }},
      {"agents.model", [](RunConfig& c, const std::string& v) { c.remote.model = v; }},
      {"agents.max_tokens",
       [](RunConfig& c, const std::string& v) {
         c.remote.max_tokens = ParseValue<int>("agents.max_tokens", v);
       }},
      {"agents.max_retries",
       [](RunConfig& c, const std::string& v) {
         c.remote.max_retries = ParseValue<int>("agents.max_retries", v);
       }},
      {"agents.timeout_seconds",
       [](RunConfig& c, const std::string& v) {
         c.remote.timeout_seconds = ParseValue<double>("agents.timeout_seconds", v);
       }},
      {"agents.backoff_seconds",
       [](RunConfig& c, const std::string& v) {
         c.remote.backoff_seconds = ParseValue<double>("agents.backoff_seconds", v);
       }},
      {"training.algo",
       [](RunConfig& c, const std::string& v) {
         try {
           c.train.algo = training::ParseAlgo(v);
         } catch (const std::invalid_argument& e) {
           throw ConfigError(e.what());
         }
       }},
      {"training.steps",
       [](RunConfig& c, const std::string& v) {
         c.train.steps = ParseValue<int>("training.steps", v);
       }},
      {"training.group_size",
       [](RunConfig& c, const std::string& v) {
         c.train.group_size = ParseValue<int>("training.group_size", v);
       }},
      {"training.batch_size",
       [](RunConfig& c, const std::string& v) {
         c.train.batch_size = ParseValue<int>("training.batch_size", v);
       }},
      {"training.eval_every",
       [](RunConfig& c, const std::string& v) {
         c.train.eval_every = ParseValue<int>("training.eval_every", v);
       }},
      {"training.eval_episodes",
       [](RunConfig& c, const std::string& v) {
         c.train.eval_episodes = ParseValue<int>("training.eval_episodes", v);
       }},
      {"training.seed",
       [](RunConfig& c, const std::string& v) {
         c.train.seed = ParseValue<std::uint64_t>("training.seed", v);
       }},
      {"training.optimizer",
       [](RunConfig& c, const std::string& v) {
         try {
           c.train.optimizer.kind = training::ParseOptimizerKind(v);
         } catch (const std::invalid_argument& e) {
           throw ConfigError(e.what());
         }
       }},
      {"training.lr",
       [](RunConfig& c, const std::string& v) {
         c.train.optimizer.lr = ParseValue<double>("training.lr", v);
       }},
      {"training.adam_beta1",
       [](RunConfig& c, const std::string& v) {
         c.train.optimizer.beta1 = ParseValue<double>("training.adam_beta1", v);
       }},
      {"training.adam_beta2",
       [](RunConfig& c, const std::string& v) {
         c.train.optimizer.beta2 = ParseValue<double>("training.adam_beta2", v);
       }},
      {"training.adam_eps",
       [](RunConfig& c, const std::string& v) {
         c.train.optimizer.eps = ParseValue<double>("training.adam_eps", v);
       }},
      {"training.clip_epsilon",
       [](RunConfig& c, const std::string& v) {
         c.train.grpo.clip_epsilon = ParseValue<double>("training.clip_epsilon", v);
       }},
      {"training.kl_beta",
       [](RunConfig& c, const std::string& v) {
         c.train.grpo.kl_beta = ParseValue<double>("training.kl_beta", v);
       }},
      {"training.entropy_gamma",
       [](RunConfig& c, const std::string& v) {
         c.train.grpo.entropy_gamma = ParseValue<double>("training.entropy_gamma", v);
       }},
      {"training.std_floor",
       [](RunConfig& c, const std::string& v) {
         c.train.grpo.std_floor = ParseValue<double>("training.std_floor", v);
       }},
      {"training.dpo_beta",
       [](RunConfig& c, const std::string& v) {
         c.train.dpo_beta = ParseValue<double>("training.dpo_beta", v);
       }},
      {"training.permutation_cap",
       [](RunConfig& c, const std::string& v) {
         c.train.permutation_cap = ParseValue<std::size_t>("training.permutation_cap", v);
       }},
      {"training.star_quantile",
       [](RunConfig& c, const std::string& v) {
         c.train.star_quantile = ParseValue<double>("training.star_quantile", v);
       }},
      {"training.selector",
       [](RunConfig& c, const std::string& v) {
         try {
           c.train.selector = training::ParseBranchSelector(v);
         } catch (const std::invalid_argument& e) {
           throw ConfigError(e.what());
         }
       }},
      {"shaping.lo_weight",
       [](RunConfig& c, const std::string& v) {
         c.train.shaping.lo_weight = ParseValue<double>("shaping.lo_weight", v);
       }},
      {"shaping.ise_weight",
       [](RunConfig& c, const std::string& v) {
         c.train.shaping.ise_weight = ParseValue<double>("shaping.ise_weight", v);
       }},
      {"shaping.naturalness_weight",
       [](RunConfig& c, const std::string& v) {
         c.train.shaping.naturalness_weight =
             ParseValue<double>("shaping.naturalness_weight", v);
       }},
      {"shaping.naturalness_threshold",
       [](RunConfig& c, const std::string& v) {
         c.train.shaping.naturalness_threshold =
             ParseValue<double>("shaping.naturalness_threshold", v);
       }},
      {"shaping.judge", [](RunConfig& c, const std::string& v) { c.train.judge = v; }},
  };
  return *setters;
}

void ValidateRunConfig(const RunConfig& c) {
  try {
    c.train.Validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::string Timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::ofstream OpenOutput(const fs::path& path, std::ios::openmode mode = std::ios::trunc) {
  std::ofstream out(path, std::ios::out | mode);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

// Resolves the run configuration for commands that accept --config.
RunConfig ConfigFromFlag(const std::string& path) {
  RunConfig c = path.empty() ? RunConfig{} : LoadConfig(path);
  c.remote = agents::RemoteAgentConfig::FromEnvironment(c.remote);
  return c;
}

void PrintSummary(const training::EvalSummary& s, std::ostream& out) {
  const auto line = [&](const std::string& name, const std::optional<double>& v) {
    if (v) out << std::left << std::setw(14) << name << training::FormatDouble(*v) << '\n';
  };
  out << std::left << std::setw(14) << "episodes" << s.episodes << '\n';
  if (s.episodes == 0) return;
  line("R", s.reward_mean);
  line("NRA", s.nra);
  line("ISE", s.ise);
  line("SRP", s.srp);
  line("LO", s.lo);
  line("win", s.win);
  line("draw", s.draw);
  line("lose", s.lose);
  line("NE", s.ne);
  line("BP", s.bp);
  line("naturalness", s.nat_fraction);
}

// Parameters and configuration for a trained policy, from a checkpoint or
// fresh (all zero).
struct LoadedPolicy {
  std::unique_ptr<agents::TemplatePolicy> policy;
  RunConfig config;
  int step = 0;
};

// Swaps a scripted opponent written for another game for the default of the
// configured game.
void MatchOpponentToGame(RunConfig& config) {
  const auto plays = agents::ScriptedAgentGame(config.train.opponent);
  if (plays && *plays != config.train.game.kind) {
    config.train.opponent = agents::DefaultScriptedAgent(config.train.game.kind);
  }
}

LoadedPolicy LoadPolicy(const std::string& checkpoint, const std::string& config_path,
                        const std::string& game_override) {
  LoadedPolicy lp;
  lp.config = ConfigFromFlag(config_path);
  std::optional<training::Checkpoint> ck;
  if (!checkpoint.empty()) {
    ck = training::LoadCheckpoint(checkpoint);
    if (config_path.empty() && ck->metadata.contains("config")) {
      try {
        lp.config.train = training::TrainRunConfig::FromJson(ck->metadata.at("config"));
      } catch (const std::exception& e) {
        throw ConfigError(std::string("checkpoint configuration is unreadable: ") + e.what());
      }
    }
    lp.step = ck->metadata.value("step", 0);
  }
  if (!game_override.empty()) {
    try {
      lp.config.train.game.kind = game::ParseGameKind(game_override);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    MatchOpponentToGame(lp.config);
  }
  ValidateRunConfig(lp.config);
  lp.policy = std::make_unique<agents::TemplatePolicy>(lp.config.train.game.kind, "trained");
  if (ck) {
    const std::string ck_game = ck->metadata.value("game", "");
    if (!ck_game.empty() && ck_game != game::GameKindName(lp.config.train.game.kind)) {
      throw ConfigError("checkpoint was trained on " + ck_game + ", not " +
                        std::string(game::GameKindName(lp.config.train.game.kind)));
    }
    if (ck->params.size() != lp.policy->params().size()) {
      throw ConfigError("checkpoint has " + std::to_string(ck->params.size()) +
                        " parameters; the policy needs " +
                        std::to_string(lp.policy->params().size()));
    }
    lp.policy->params() = ck->params;
  }
  return lp;
}

int CmdTrain(const RunConfig& base, const std::string& out_dir, std::ostream& out,
             std::ostream& err) {
  RunConfig config = base;
  ValidateRunConfig(config);
  auto opponent = MakeOpponent(config.train.opponent, config);
  auto judge = MakeJudge(config);
  agents::TemplatePolicy policy(config.train.game.kind, "trained");

  const fs::path dir(out_dir);
  fs::create_directories(dir / "checkpoints");
  const std::string started = Timestamp();
  {
    auto ini = OpenOutput(dir / "config.ini");
    ini << DumpConfig(config);
  }

  training::Trainer trainer(config.train, policy, *opponent, judge.get());
  trainer.set_warn([&](const std::string& m) { err << "warning: " << m << '\n'; });
  training::SaveCheckpoint((dir / "checkpoints" / "step-000000").string(), policy.params(),
                           trainer.CheckpointMetadata());

  auto metrics = OpenOutput(dir / "metrics.csv");
  metrics << training::MetricsHeader() << '\n';
  auto episodes = OpenOutput(dir / "episodes.jsonl");
  auto rollouts = OpenOutput(dir / "rollouts.jsonl");
  int eval_round = 0;

  training::Trainer::Callbacks callbacks;
  callbacks.on_metrics = [&](const training::MetricsRow& row) {
    metrics << training::FormatMetricsRow(row) << '\n';
    metrics.flush();
    err << "step " << row.step << "  R=" << training::FormatDouble(row.eval.reward_mean)
        << "  NRA=" << training::FormatDouble(row.eval.nra) << '\n';
  };
  callbacks.on_eval_episodes = [&](const std::vector<dialogue::Episode>& eps) {
    for (auto e : eps) {
      e.algo_tag = training::AlgoName(config.train.algo);
      e.extra["eval_step"] = trainer.step();
      e.extra["eval_round"] = eval_round;
      dialogue::WriteEpisodeLine(episodes, e);
    }
    ++eval_round;
  };
  callbacks.on_step = [&](const training::StepResult& result) {
    for (const auto& g : result.groups) {
      auto record = training::RolloutGroupToJson(g);
      record["step"] = trainer.step() - 1;
      rollouts << record.dump() << '\n';
    }
  };
  trainer.Run(callbacks);
  training::SaveCheckpoint((dir / "checkpoints" / "final").string(), policy.params(),
                           trainer.CheckpointMetadata());

  json manifest = {
      {"tool", "talkgames"},
      {"git_describe", TALKGAMES_GIT_DESCRIBE},
      {"seed", config.train.seed},
      {"config", config.train.ToJson()},
      {"config_hash", config.train.Hash()},
      {"remote", {{"endpoint", config.remote.endpoint}, {"model", config.remote.model}}},
      {"started_at", started},
      {"finished_at", Timestamp()},
      {"steps_completed", trainer.step()},
      {"layout",
       {{"config", "config.ini"},
        {"metrics", "metrics.csv"},
        {"episodes", "episodes.jsonl"},
        {"rollouts", "rollouts.jsonl"},
        {"initial_checkpoint", "checkpoints/step-000000"},
        {"final_checkpoint", "checkpoints/final"}}}};
  auto mf = OpenOutput(dir / "manifest.json");
  mf << manifest.dump(2) << '\n';
  out << "run written to " << dir.string() << '\n';
  return kExitOk;
}

int CmdEval(const std::string& checkpoint, const std::string& config_path,
            const std::string& game, int episodes, const std::string& opponent_spec,
            std::optional<std::uint64_t> seed, const std::string& csv_path,
            const std::string& log_path, std::ostream& out) {
  auto lp = LoadPolicy(checkpoint, config_path, game);
  auto& config = lp.config;
  if (!opponent_spec.empty()) config.train.opponent = opponent_spec;
  if (seed) config.train.seed = *seed;
  auto opponent = MakeOpponent(config.train.opponent, config);
  auto judge = MakeJudge(config);
  std::vector<dialogue::Episode> eps;
  dialogue::EpisodeOptions options;
  options.max_resamples = config.train.max_resamples;
  const auto summary = training::Evaluate(
      config.train.game, *lp.policy, *opponent, config.train.trained_player, episodes,
      util::DeriveSeed(config.train.seed, {0xE7A1}), judge.get(), &eps, options);
  PrintSummary(summary, out);
  if (!csv_path.empty()) {
    auto csv = OpenOutput(csv_path);
    csv << training::MetricsHeader() << '\n';
    if (episodes > 0) {
      training::MetricsRow row;
      row.step = lp.step;
      row.algo = "eval";
      row.game = game::GameKindName(config.train.game.kind);
      row.eval = summary;
      csv << training::FormatMetricsRow(row) << '\n';
    }
  }
  if (!log_path.empty()) {
    auto log = OpenOutput(log_path, std::ios::app);
    for (auto& e : eps) {
      e.algo_tag = "eval";
      dialogue::WriteEpisodeLine(log, e);
    }
  }
  return kExitOk;
}

int CmdSignals(const std::string& log_path, const std::string& out_path,
               const std::string& opponent_spec, const std::string& checkpoint,
               const std::string& config_path, int player_flag, std::ostream& out,
               std::ostream& err) {
  std::vector<dialogue::Episode> episodes;
  try {
    episodes = dialogue::ReadEpisodesFile(log_path);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("cannot read episode log: ") + e.what());
  }
  std::ofstream file;
  if (!out_path.empty()) file = OpenOutput(out_path);
  std::ostream& csv = out_path.empty() ? out : file;
  csv << "episode_id,turn,ise,srp,lo,bound_lower,e_true,bound_upper,violation_flag\n";

  std::unique_ptr<agents::AgentPolicy> opponent;
  std::map<game::GameKind, std::unique_ptr<agents::TemplatePolicy>> trained;
  RunConfig config = ConfigFromFlag(config_path);
  const auto live_trained = [&](game::GameKind kind) -> agents::TemplatePolicy& {
    auto& slot = trained[kind];
    if (!slot) {
      if (!checkpoint.empty()) {
        auto lp = LoadPolicy(checkpoint, config_path, std::string(game::GameKindName(kind)));
        slot = std::move(lp.policy);
      } else {
        slot = std::make_unique<agents::TemplatePolicy>(kind, "trained");
      }
    }
    return *slot;
  };
  const auto opponent_game = agents::ScriptedAgentGame(opponent_spec);
  if (!opponent_spec.empty()) {
    RunConfig for_opponent = config;
    if (opponent_game) for_opponent.train.game.kind = *opponent_game;
    opponent = MakeOpponent(opponent_spec, for_opponent);
  }

  bool warned = false;
  const auto row = [&](const std::string& id, const signals::ScheduledSignal& s) {
    const auto& r = s.report;
    csv << id << ',' << s.turn_index << ',' << training::FormatDouble(r.ise) << ','
        << training::FormatDouble(r.srp) << ',' << training::FormatDouble(r.lo) << ','
        << training::FormatDouble(r.bound_lower) << ',' << training::FormatDouble(r.e_true)
        << ',' << training::FormatDouble(r.bound_upper) << ',' << (r.violation ? 1 : 0)
        << '\n';
  };
  for (const auto& e : episodes) {
    if (e.spec.kind == game::GameKind::kBargaining) {
      if (!warned) err << "warning: behavioural signals are not defined for bargaining\n";
      warned = true;
      continue;
    }
    if (e.extra.contains("signals")) {
      for (const auto& s : e.extra.at("signals")) {
        row(e.episode_id, signals::ScheduledSignalFromJson(s, e.spec));
      }
      continue;
    }
    if (!opponent) {
      throw ConfigError("episode " + e.episode_id +
                        " has no stored distributions; pass --opponent to elicit live");
    }
    if (opponent_game && *opponent_game != e.spec.kind) {
      throw ConfigError("opponent '" + opponent_spec + "' cannot play episode " + e.episode_id +
                        " (" + std::string(game::GameKindName(e.spec.kind)) + ")");
    }
    const int player = e.trained_player >= 0 ? e.trained_player : player_flag;
    for (const auto& s :
         signals::SignalSchedule(e, player, live_trained(e.spec.kind), *opponent)) {
      row(e.episode_id, s);
    }
  }
  return kExitOk;
}

int CmdExport(const std::string& log_path, const std::string& format_name,
              const std::string& out_path, std::ostream& out) {
  training::ExportFormat format;
  try {
    format = training::ParseExportFormat(format_name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  std::ifstream in(log_path);
  if (!in) throw ConfigError("cannot read " + log_path);
  std::vector<training::LoggedGroup> groups;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.contains("completions")) continue;
    groups.push_back(training::LoggedGroupFromJson(j));
  }
  std::ofstream file;
  if (!out_path.empty()) file = OpenOutput(out_path);
  training::ExportPreferences(groups, format, out_path.empty() ? out : file);
  return kExitOk;
}

// Turns a human line into tagged agent text. Accepts tagged text as is, or
// "talk: ..." and "play: ..." parts separated by " | ".
std::string HumanLineToTagged(const std::string& line) {
  if (line.find('<') != std::string::npos) {
    return line.find("<think>") == std::string::npos ? "<think> </think> " + line : line;
  }
  std::string tagged = "<think> </think>";
  std::stringstream parts(line);
  std::string part;
  while (std::getline(parts, part, '|')) {
    const auto start = part.find_first_not_of(' ');
    if (start == std::string::npos) continue;
    part = part.substr(start);
    for (const std::string tag : {"talk", "play"}) {
      if (part.rfind(tag + ":", 0) == 0 || part.rfind(tag + " ", 0) == 0) {
        tagged += " <" + tag + "> " + part.substr(tag.size() + 1) + " </" + tag + ">";
      }
    }
  }
  return tagged;
}

int CmdPlay(const std::string& game_name, int human_side, const std::string& opponent_spec,
            const std::string& config_path, std::uint64_t seed, const std::string& log_path,
            std::istream& in, std::ostream& out) {
  RunConfig config = ConfigFromFlag(config_path);
  if (!game_name.empty()) {
    try {
      config.train.game.kind = game::ParseGameKind(game_name);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  ValidateRunConfig(config);
  const int human = human_side - 1;
  std::string spec = opponent_spec;
  if (spec.empty()) spec = agents::DefaultScriptedAgent(config.train.game.kind);
  auto opponent = MakeOpponent(spec, config);
  dialogue::Conversation conv(config.train.game, seed);
  dialogue::PlayerStreams streams(seed);
  std::size_t shown = 0;
  out << "You are " << dialogue::PlayerName(human) << ". Enter tagged text, or"
      << " 'talk: ...' and 'play: ...' separated by ' | '.\n";
  while (!conv.terminal()) {
    const auto view = conv.View(human).messages;
    for (; shown < view.size(); ++shown) {
      out << "[" << view[shown].role << "] " << view[shown].content << '\n';
    }
    if (conv.current_player() != human) {
      dialogue::TakeTurn(conv, *opponent, streams);
      continue;
    }
    out << "> " << std::flush;
    std::string line;
    if (!std::getline(in, line)) {
      out << "\ninput closed; game aborted\n";
      return kExitOk;
    }
    try {
      const auto content = dialogue::ParseAgentOutput(HumanLineToTagged(line), conv.spec());
      conv.Apply(content);
      ++shown;  // own turn is echoed by the terminal already
    } catch (const dialogue::ParseError& e) {
      out << "could not read that: " << e.what() << '\n';
    } catch (const dialogue::IllegalAction& e) {
      out << "not allowed: " << e.what() << '\n';
    }
  }
  const auto view = conv.View(human).messages;
  for (; shown < view.size(); ++shown) {
    out << "[" << view[shown].role << "] " << view[shown].content << '\n';
  }
  const auto& u = *conv.outcome();
  out << "outcome: " << dialogue::PlayerName(0) << " " << training::FormatDouble(u[0]) << ", "
      << dialogue::PlayerName(1) << " " << training::FormatDouble(u[1]) << '\n';
  std::array<agents::AgentPolicy*, 2> seats{};
  seats[1 - human] = opponent.get();
  auto episode = dialogue::ToEpisode(conv, seats);
  episode.players[human] = "human";
  episode.algo_tag = "play";
  if (!log_path.empty()) {
    auto log = OpenOutput(log_path, std::ios::app);
    dialogue::WriteEpisodeLine(log, episode);
  }
  return kExitOk;
}

}  // namespace

RunConfig ParseConfig(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  RunConfig c;
  bool opponent_given = false;
  const auto& setters = Setters();
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config: key '" + section + "' outside a section");
    for (const auto& [key, value] : body) {
      const std::string name = section + "." + key;
      const auto it = setters.find(name);
      if (it == setters.end()) throw ConfigError("config: unknown key '" + name + "'");
      it->second(c, value.get_value<std::string>());
      opponent_given = opponent_given || name == "agents.opponent";
    }
  }
  if (!opponent_given) MatchOpponentToGame(c);
  ValidateRunConfig(c);
  return c;
}

RunConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseConfig(buf.str());
}

std::string DumpConfig(const RunConfig& config) {
  const auto& t = config.train;
  const auto f = training::FormatDouble;
  std::ostringstream out;
  const auto& g = t.game;
  out << "[game]\n"
      << "kind = " << game::GameKindName(g.kind) << '\n'
      << "max_interactions = " << g.max_interactions << '\n'
      << "rps_constrained = " << (g.rps_constrained ? "true" : "false") << '\n'
      << "constrained_player = " << g.constrained_player + 1 << '\n'
      << "seller_player = " << g.seller_player + 1 << '\n'
      << "bertrand_product = " << g.bertrand.product << '\n'
      << "bertrand_cost = " << f(g.bertrand.cost) << '\n'
      << "demand_slope = " << f(g.bertrand.demand_slope) << '\n'
      << "p_max = " << f(g.bertrand.p_max) << '\n'
      << "rounds = " << g.bertrand.rounds << '\n'
      << "bargaining_product = " << g.bargaining.product << '\n'
      << "bargaining_cost = " << f(g.bargaining.cost) << '\n'
      << "value = " << f(g.bargaining.value) << "\n\n"
      << "[agents]\n"
      << "opponent = " << t.opponent << '\n'
      << "trained_player = " << t.trained_player + 1 << '\n'
      << "max_resamples = " << t.max_resamples << '\n'
      << "trained_temperature = " << f(t.trained_temperature) << '\n'
      << "fixed_temperature = " << f(t.fixed_temperature) << '\n'
      << "endpoint = " << config.remote.endpoint << '\n'
      << "model = " << config.remote.model << '\n'
      << "max_tokens = " << config.remote.max_tokens << '\n'
      << "max_retries = " << config.remote.max_retries << '\n'
      << "timeout_seconds = " << f(config.remote.timeout_seconds) << '\n'
      << "backoff_seconds = " << f(config.remote.backoff_seconds) << "\n\n"
      << "[training]\n"
      << "algo = " << training::AlgoName(t.algo) << '\n'
      << "steps = " << t.steps << '\n'
      << "group_size = " << t.group_size << '\n'
      << "batch_size = " << t.batch_size << '\n'
      << "eval_every = " << t.eval_every << '\n'
      << "eval_episodes = " << t.eval_episodes << '\n'
      << "seed = " << t.seed << '\n'
      << "optimizer = " << training::OptimizerKindName(t.optimizer.kind) << '\n'
      << "lr = " << f(t.optimizer.lr) << '\n'
      << "adam_beta1 = " << f(t.optimizer.beta1) << '\n'
      << "adam_beta2 = " << f(t.optimizer.beta2) << '\n'
      << "adam_eps = " << f(t.optimizer.eps) << '\n'
      << "clip_epsilon = " << f(t.grpo.clip_epsilon) << '\n'
      << "kl_beta = " << f(t.grpo.kl_beta) << '\n'
      << "entropy_gamma = " << f(t.grpo.entropy_gamma) << '\n'
      << "std_floor = " << f(t.grpo.std_floor) << '\n'
      << "dpo_beta = " << f(t.dpo_beta) << '\n'
      << "permutation_cap = " << t.permutation_cap << '\n'
      << "star_quantile = " << f(t.star_quantile) << '\n'
      << "selector = " << training::BranchSelectorName(t.selector) << "\n\n"
      << "[shaping]\n"
      << "lo_weight = " << f(t.shaping.lo_weight) << '\n'
      << "ise_weight = " << f(t.shaping.ise_weight) << '\n'
      << "naturalness_weight = " << f(t.shaping.naturalness_weight) << '\n'
      << "naturalness_threshold = " << f(t.shaping.naturalness_threshold) << '\n'
      << "judge = " << t.judge << '\n';
  return out.str();
}

std::unique_ptr<agents::AgentPolicy> MakeOpponent(const std::string& spec,
                                                  const RunConfig& config) {
  if (spec == "remote") {
    auto remote = config.remote;
    remote.temperature = config.train.fixed_temperature;
    try {
      return std::make_unique<agents::RemoteAgent>(
          std::make_shared<agents::HttpChatClient>(remote), "remote");
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  const auto plays = agents::ScriptedAgentGame(spec);
  if (plays && *plays != config.train.game.kind) {
    throw ConfigError("opponent '" + spec + "' plays " + std::string(game::GameKindName(*plays)) +
                      ", not " + std::string(game::GameKindName(config.train.game.kind)));
  }
  try {
    return agents::MakeScriptedAgent(spec);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::unique_ptr<agents::ChatBackend> MakeJudge(const RunConfig& config) {
  if (config.train.judge == "none") return nullptr;
  if (config.train.judge == "heuristic") return std::make_unique<training::HeuristicJudge>();
  auto remote = config.remote;
  remote.temperature = config.train.fixed_temperature;
  try {
    return std::make_unique<agents::HttpChatClient>(remote);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

int Run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Strategic conversation games: training, evaluation and analysis", "talkgames"};
  app.require_subcommand(1);

  std::string config_path, out_dir, algo, opponent, game, checkpoint, log_path, csv_path,
      format, out_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> steps;
  int episodes = 32;
  int human_side = 1;
  int player = 2;

  auto* train = app.add_subcommand("train", "Train a template policy and write a run directory");
  train->add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  train->add_option("--algo", algo, "grpo, dpo_pairs, dpo_perm, dpo_ties or star");
  train->add_option("--seed", seed, "Run seed");
  train->add_option("--steps", steps, "Number of optimizer steps");
  train->add_option("--opponent", opponent, "Fixed agent spec, or 'remote'");
  train->add_option("--out", out_dir, "Run directory")->required();

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on fresh episodes");
  eval->add_option("--checkpoint", checkpoint, "Checkpoint base path, .bin or .json");
  eval->add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  eval->add_option("--game", game, "Game when no checkpoint is given (untrained policy)");
  eval->add_option("--episodes", episodes, "Number of episodes")->check(CLI::NonNegativeNumber);
  eval->add_option("--opponent", opponent, "Fixed agent spec, or 'remote'");
  eval->add_option("--seed", seed, "Evaluation seed");
  eval->add_option("--csv", csv_path, "Also write the metrics row to this CSV");
  eval->add_option("--log", log_path, "Append the episodes to this JSONL file");

  auto* sig = app.add_subcommand("signals", "Per-turn ISE/SRP/LO and bounds from an episode log");
  sig->add_option("--log", log_path, "Episode JSONL")->required();
  sig->add_option("--out", out_path, "CSV output (default: stdout)");
  sig->add_option("--opponent", opponent, "Elicit live from this fixed agent when needed");
  sig->add_option("--checkpoint", checkpoint, "Trained policy for live elicitation");
  sig->add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  sig->add_option("--player", player, "Trained player when the log does not say")
      ->check(CLI::Range(1, 2));

  auto* exp = app.add_subcommand("export", "Export preference data from a rollout log");
  exp->footer(kExportHelp);
  exp->add_option("--log", log_path, "Rollout JSONL")->required();
  exp->add_option("--format", format, "dpo or grpo")->required();
  exp->add_option("--out", out_path, "JSONL output (default: stdout)");

  auto* play = app.add_subcommand("play", "Play a game against a fixed agent in the terminal");
  play->add_option("--game", game, "rps, bertrand or bargaining")->required();
  play->add_option("--human-side", human_side, "1 or 2")->check(CLI::Range(1, 2));
  play->add_option("--opponent", opponent, "Fixed agent spec");
  play->add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  play->add_option("--seed", seed, "Seed");
  play->add_option("--log", log_path, "Append the transcript to this JSONL file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    if (auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front()) {
      err << sub->help();
    } else {
      err << app.help();
    }
    return kExitUsage;
  }

  try {
    if (train->parsed()) {
      RunConfig config = ConfigFromFlag(config_path);
      if (!algo.empty()) {
        try {
          config.train.algo = training::ParseAlgo(algo);
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
      }
      if (seed) config.train.seed = *seed;
      if (steps) config.train.steps = *steps;
      if (!opponent.empty()) config.train.opponent = opponent;
      return CmdTrain(config, out_dir, out, err);
    }
    if (eval->parsed()) {
      return CmdEval(checkpoint, config_path, game, episodes, opponent, seed, csv_path,
                     log_path, out);
    }
    if (sig->parsed()) {
      return CmdSignals(log_path, out_path, opponent, checkpoint, config_path, player - 1, out,
                        err);
    }
    if (exp->parsed()) return CmdExport(log_path, format, out_path, out);
    if (play->parsed()) {
      return CmdPlay(game, human_side, opponent, config_path, seed.value_or(0), log_path, in,
                     out);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const game::InvalidSpec& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace talkgames::cli
