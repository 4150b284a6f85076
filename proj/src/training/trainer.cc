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

#include "talkgames/training/trainer.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "talkgames/signals/signals.h"

namespace talkgames::training {
namespace {

using nlohmann::json;

constexpr std::uint64_t kTrainStream = 0x7A11;
constexpr std::uint64_t kEvalStream = 0xE7A1;
constexpr std::uint64_t kOrderingStream = 0x0DE5;

double Mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::optional<double> MeanOrNone(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  return Mean(v);
}

std::string Optional(const std::optional<double>& v) {
  return v ? FormatDouble(*v) : std::string();
}

json DecisionsKey(const std::vector<agents::Decision>& decisions) {
  json out = json::array();
  for (const auto& d : decisions) {
    json features = json::array();
    for (const auto& f : d.features) features.push_back({f.index, f.value});
    out.push_back({d.stage, features, d.legal, d.choice});
  }
  return out;
}

}  // namespace

Algo ParseAlgo(const std::string& name) {
  if (name == "grpo") return Algo::kGrpo;
  if (name == "dpo_pairs") return Algo::kDpoPairs;
  if (name == "dpo_perm") return Algo::kDpoPerm;
  if (name == "dpo_ties") return Algo::kDpoTies;
  if (name == "star") return Algo::kStar;
  throw std::invalid_argument("unknown algorithm '" + name +
                              "' (expected grpo, dpo_pairs, dpo_perm, dpo_ties or star)");
}

std::string AlgoName(Algo algo) {
  switch (algo) {
    case Algo::kGrpo:
      return "grpo";
    case Algo::kDpoPairs:
      return "dpo_pairs";
    case Algo::kDpoPerm:
      return "dpo_perm";
    case Algo::kDpoTies:
      return "dpo_ties";
    case Algo::kStar:
      return "star";
  }
  return "grpo";
}

void TrainRunConfig::Validate() const {
  if (steps < 0) throw std::invalid_argument("steps must be >= 0");
  if (group_size < 1 || batch_size < 1) {
    throw std::invalid_argument("group and batch sizes must be positive");
  }
  if (algo != Algo::kStar && group_size < 2) {
    throw std::invalid_argument("group size must be at least 2 for " + AlgoName(algo));
  }
  if (algo == Algo::kDpoTies && group_size > 16) {
    throw std::invalid_argument("dpo_ties supports at most 16 generations");
  }
  if (eval_every < 1 || eval_episodes < 0) {
    throw std::invalid_argument("eval_every must be positive and eval_episodes >= 0");
  }
  if (!(optimizer.lr > 0.0)) throw std::invalid_argument("learning rate must be > 0");
  grpo.Validate();
  if (!(dpo_beta > 0.0)) throw std::invalid_argument("dpo beta must be > 0");
  if (permutation_cap < 1) throw std::invalid_argument("permutation cap must be positive");
  if (!(star_quantile > 0.0 && star_quantile <= 1.0)) {
    throw std::invalid_argument("star quantile must be in (0, 1]");
  }
  shaping.Validate();
  if (judge != "heuristic" && judge != "remote" && judge != "none") {
    throw std::invalid_argument("judge must be heuristic, remote or none");
  }
  game.Validate();
  if (trained_player != 0 && trained_player != 1) {
    throw std::invalid_argument("trained player must be 1 or 2");
  }
  if (max_resamples < 0) throw std::invalid_argument("max_resamples must be >= 0");
  if (!(trained_temperature >= 0.0) || !(fixed_temperature >= 0.0)) {
    throw std::invalid_argument("temperatures must be >= 0");
  }
}

json TrainRunConfig::ToJson() const {
  return {{"algo", AlgoName(algo)},
          {"steps", steps},
          {"group_size", group_size},
          {"batch_size", batch_size},
          {"eval_every", eval_every},
          {"eval_episodes", eval_episodes},
          {"seed", seed},
          {"optimizer",
           {{"kind", OptimizerKindName(optimizer.kind)},
            {"lr", optimizer.lr},
            {"beta1", optimizer.beta1},
            {"beta2", optimizer.beta2},
            {"eps", optimizer.eps}}},
          {"grpo",
           {{"clip_epsilon", grpo.clip_epsilon},
            {"kl_beta", grpo.kl_beta},
            {"entropy_gamma", grpo.entropy_gamma},
            {"std_floor", grpo.std_floor}}},
          {"dpo_beta", dpo_beta},
          {"permutation_cap", permutation_cap},
          {"star_quantile", star_quantile},
          {"shaping",
           {{"lo_weight", shaping.lo_weight},
            {"ise_weight", shaping.ise_weight},
            {"naturalness_weight", shaping.naturalness_weight},
            {"naturalness_threshold", shaping.naturalness_threshold}}},
          {"judge", judge},
          {"game", dialogue::SpecToJson(game)},
          {"opponent", opponent},
          {"trained_player", trained_player},
          {"selector", BranchSelectorName(selector)},
          {"max_resamples", max_resamples},
          {"trained_temperature", trained_temperature},
          {"fixed_temperature", fixed_temperature}};
}

TrainRunConfig TrainRunConfig::FromJson(const json& j) {
  TrainRunConfig c;
  c.algo = ParseAlgo(j.at("algo").get<std::string>());
  c.steps = j.at("steps").get<int>();
  c.group_size = j.at("group_size").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.eval_every = j.at("eval_every").get<int>();
  c.eval_episodes = j.at("eval_episodes").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  const auto& o = j.at("optimizer");
  c.optimizer.kind = ParseOptimizerKind(o.at("kind").get<std::string>());
  c.optimizer.lr = o.at("lr").get<double>();
  c.optimizer.beta1 = o.at("beta1").get<double>();
  c.optimizer.beta2 = o.at("beta2").get<double>();
  c.optimizer.eps = o.at("eps").get<double>();
  const auto& g = j.at("grpo");
  c.grpo.clip_epsilon = g.at("clip_epsilon").get<double>();
  c.grpo.kl_beta = g.at("kl_beta").get<double>();
  c.grpo.entropy_gamma = g.at("entropy_gamma").get<double>();
  c.grpo.std_floor = g.at("std_floor").get<double>();
  c.dpo_beta = j.at("dpo_beta").get<double>();
  c.permutation_cap = j.at("permutation_cap").get<std::size_t>();
  c.star_quantile = j.at("star_quantile").get<double>();
  const auto& s = j.at("shaping");
  c.shaping.lo_weight = s.at("lo_weight").get<double>();
  c.shaping.ise_weight = s.at("ise_weight").get<double>();
  c.shaping.naturalness_weight = s.at("naturalness_weight").get<double>();
  c.shaping.naturalness_threshold = s.at("naturalness_threshold").get<double>();
  c.judge = j.at("judge").get<std::string>();
  c.game = dialogue::SpecFromJson(j.at("game"));
  c.opponent = j.at("opponent").get<std::string>();
  c.trained_player = j.at("trained_player").get<int>();
  c.selector = ParseBranchSelector(j.at("selector").get<std::string>());
  c.max_resamples = j.at("max_resamples").get<int>();
  c.trained_temperature = j.at("trained_temperature").get<double>();
  c.fixed_temperature = j.at("fixed_temperature").get<double>();
  return c;
}

std::string TrainRunConfig::Hash() const {
  std::ostringstream out;
  out << std::hex << util::Mix64(std::hash<std::string>{}(ToJson().dump()));
  return out.str();
}

std::string FormatDouble(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

EvalSummary Evaluate(const game::GameSpec& spec, agents::AgentPolicy& trained,
                     agents::AgentPolicy& opponent, int trained_player, int n,
                     std::uint64_t seed, agents::ChatBackend* judge,
                     std::vector<dialogue::Episode>* out,
                     const dialogue::EpisodeOptions& options) {
  EvalSummary s;
  s.episodes = std::max(0, n);
  if (n <= 0) return s;
  std::array<agents::AgentPolicy*, 2> seats{};
  seats[trained_player] = &trained;
  seats[1 - trained_player] = &opponent;

  std::vector<double> rewards, ise, srp, lo, ne, bp, nat;
  std::vector<std::pair<double, double>> utilities;
  for (int i = 0; i < n; ++i) {
    const auto episode_seed = util::DeriveSeed(seed, {static_cast<std::uint64_t>(i)});
    auto episode = dialogue::RunEpisode(spec, *seats[0], *seats[1], episode_seed, options);
    episode.trained_player = trained_player;
    const double mine = episode.utilities[trained_player];
    const double theirs = episode.utilities[1 - trained_player];
    rewards.push_back(mine);
    utilities.emplace_back(mine, theirs);

    if (auto signal = FinalActionSignals(episode, trained_player, trained, opponent)) {
      ise.push_back(signal->report.ise);
      srp.push_back(signal->report.srp);
      lo.push_back(signal->report.lo);
      episode.extra["signals"] = json::array({signals::ScheduledSignalToJson(*signal)});
    }
    if (spec.kind == game::GameKind::kBertrand) {
      ne.push_back(signals::NormalizedEarnings(mine, spec.bertrand));
    } else if (spec.kind == game::GameKind::kBargaining) {
      const auto conv = episode.Replay();
      bp.push_back(signals::BargainingPower(conv.agreed_deal(), spec.bargaining,
                                            trained_player == spec.seller_player));
    }
    if (judge) {
      const auto texts = TalkTexts(episode, trained_player);
      try {
        nat.push_back(NaturalnessFraction(texts, *judge, dialogue::TemplateLibrary::Builtin()));
      } catch (const JudgeError&) {
        // Judged episodes only.
      }
    }
    if (out) out->push_back(std::move(episode));
  }
  s.reward_mean = Mean(rewards);
  s.nra = signals::Nra(utilities);
  s.ise = MeanOrNone(ise);
  s.srp = MeanOrNone(srp);
  s.lo = MeanOrNone(lo);
  if (spec.kind == game::GameKind::kRps) {
    const auto wdl = signals::WinDrawLoseRates(utilities);
    s.win = wdl.win;
    s.draw = wdl.draw;
    s.lose = wdl.lose;
  }
  s.ne = MeanOrNone(ne);
  s.bp = MeanOrNone(bp);
  s.nat_fraction = MeanOrNone(nat);
  return s;
}

std::string MetricsHeader() {
  return "step,algo,game,reward_mean,nra,ise,srp,lo,win,draw,lose,ne,bp,nat_fraction,loss";
}

std::string FormatMetricsRow(const MetricsRow& row) {
  const auto& e = row.eval;
  std::string line = std::to_string(row.step) + "," + row.algo + "," + row.game;
  const bool has_episodes = e.episodes > 0;
  for (const auto& v : {has_episodes ? std::optional<double>(e.reward_mean) : std::nullopt,
                        has_episodes ? std::optional<double>(e.nra) : std::nullopt, e.ise, e.srp,
                        e.lo, e.win, e.draw, e.lose, e.ne, e.bp, e.nat_fraction, row.loss}) {
    line += "," + Optional(v);
  }
  return line;
}

double StarThreshold(std::vector<double> rewards, double quantile) {
  if (rewards.empty()) throw std::invalid_argument("no rewards to select from");
  std::sort(rewards.begin(), rewards.end());
  const double pos = (1.0 - quantile) * static_cast<double>(rewards.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, rewards.size() - 1);
  return rewards[lo] + (pos - static_cast<double>(lo)) * (rewards[hi] - rewards[lo]);
}

std::vector<std::vector<agents::Decision>> StarSelect(
    const std::vector<dialogue::Episode>& episodes, const std::vector<double>& rewards,
    double quantile, const agents::TemplatePolicy& policy, int trained_player) {
  if (episodes.size() != rewards.size()) {
    throw std::invalid_argument("episodes and rewards differ in length");
  }
  std::vector<std::vector<agents::Decision>> out;
  if (episodes.empty()) return out;
  const double threshold = StarThreshold(rewards, quantile);
  std::set<std::string> seen;
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    if (rewards[e] < threshold) continue;
    auto conv = dialogue::Conversation(episodes[e].spec, episodes[e].seed);
    for (const auto& turn : episodes[e].turns) {
      if (turn.player == trained_player && !turn.forced) {
        auto decisions = policy.DecisionsFor(conv, turn);
        if (seen.insert(DecisionsKey(decisions).dump()).second) {
          out.push_back(std::move(decisions));
        }
      }
      conv.Step(turn);
    }
  }
  return out;
}

LossResult BatchedGrpoLoss(const agents::SoftmaxModel& model, std::span<const double> theta,
                           std::span<const double> ref,
                           std::span<const std::vector<Completion>> groups,
                           const GrpoConfig& config) {
  LossResult total;
  total.grad.assign(theta.size(), 0.0);
  for (const auto& g : groups) {
    const auto part = GrpoLoss(model, theta, ref, g, config);
    total.loss += part.loss;
    for (std::size_t i = 0; i < total.grad.size(); ++i) total.grad[i] += part.grad[i];
  }
  return total;
}

LossResult AccumulatedGrpoLoss(const agents::SoftmaxModel& model,
                               std::span<const double> theta, std::span<const double> ref,
                               std::span<const std::vector<Completion>> groups,
                               const GrpoConfig& config) {
  LossResult total;
  total.grad.assign(theta.size(), 0.0);
  for (const auto& g : groups) {
    std::vector<double> rewards;
    for (const auto& c : g) rewards.push_back(c.reward);
    const auto adv = GrpoAdvantages(rewards, config.std_floor);
    for (std::size_t i = 0; i < g.size(); ++i) {
      std::vector<double> local(theta.size(), 0.0);
      total.loss +=
          AccumulateGrpoCompletion(model, theta, ref, g[i], adv[i], g.size(), config, local);
      for (std::size_t p = 0; p < local.size(); ++p) total.grad[p] += local[p];
    }
  }
  return total;
}

Trainer::Trainer(TrainRunConfig config, agents::TemplatePolicy& policy,
                 agents::AgentPolicy& opponent, agents::ChatBackend* judge)
    : config_(std::move(config)),
      policy_(policy),
      opponent_(opponent),
      judge_(judge),
      reference_(policy.params()),
      optimizer_(config_.optimizer, policy.params().size()) {
  config_.Validate();
  if (policy.kind() != config_.game.kind) {
    throw std::invalid_argument("policy and game kinds differ");
  }
}

RolloutSetup Trainer::Setup() const {
  RolloutSetup s;
  s.spec = config_.game;
  s.trained = &policy_;
  s.opponent = &opponent_;
  s.trained_player = config_.trained_player;
  s.ref_params = reference_;
  s.shaping = config_.shaping;
  s.judge = judge_;
  s.episode_options.max_resamples = config_.max_resamples;
  s.warn = warn_;
  return s;
}

double Trainer::AccumulateGroup(const RolloutGroup& group, std::vector<double>& grad) {
  const auto& model = policy_.model();
  const auto& theta = policy_.params();
  std::vector<double> rewards;
  for (const auto& c : group.completions) rewards.push_back(c.reward);
  const bool informative = std::any_of(rewards.begin(), rewards.end(),
                                       [&](double r) { return r != rewards.front(); });
  if (!informative) return 0.0;

  if (config_.algo == Algo::kGrpo) {
    const auto adv = GrpoAdvantages(rewards, config_.grpo.std_floor);
    double loss = 0.0;
    for (std::size_t i = 0; i < group.completions.size(); ++i) {
      loss += AccumulateGrpoCompletion(model, theta, reference_, group.completions[i], adv[i],
                                       group.completions.size(), config_.grpo, grad);
    }
    return loss;
  }
  LossResult part;
  switch (config_.algo) {
    case Algo::kDpoPairs:
      part = DpoPairsLoss(model, theta, group.completions, config_.dpo_beta);
      break;
    case Algo::kDpoPerm:
      part = DpoPermutationLoss(
          model, theta, group.completions, config_.dpo_beta,
          util::DeriveSeed(config_.seed, {kOrderingStream, group.root_seed}),
          config_.permutation_cap);
      break;
    case Algo::kDpoTies:
      part = DpoTiesLoss(model, theta, group.completions, config_.dpo_beta);
      break;
    default:
      throw std::logic_error("not a group algorithm");
  }
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += part.grad[i];
  return part.loss;
}

StepResult Trainer::Step() {
  StepResult result;
  const auto setup = Setup();
  std::vector<double> grad(policy_.params().size(), 0.0);
  const auto step = static_cast<std::uint64_t>(step_);

  if (config_.algo == Algo::kStar) {
    const int n = config_.batch_size * config_.group_size;
    std::vector<double> rewards;
    for (int i = 0; i < n; ++i) {
      const auto seed =
          util::DeriveSeed(config_.seed, {kTrainStream, step, static_cast<std::uint64_t>(i)});
      const auto seats = setup.seats();
      auto episode = dialogue::RunEpisode(config_.game, *seats[0], *seats[1], seed,
                                          setup.episode_options);
      episode.trained_player = config_.trained_player;
      rewards.push_back(ScoreEpisode(setup, episode).total);
      result.episodes.push_back(std::move(episode));
    }
    const auto data = StarSelect(result.episodes, rewards, config_.star_quantile, policy_,
                                 config_.trained_player);
    const auto part = StarSftLoss(policy_.model(), policy_.params(), data);
    result.loss = part.loss;
    grad = part.grad;
    result.groups_used = data.empty() ? 0 : 1;
  } else {
    for (int b = 0; b < config_.batch_size; ++b) {
      const auto seed =
          util::DeriveSeed(config_.seed, {kTrainStream, step, static_cast<std::uint64_t>(b)});
      try {
        auto group = BranchAndRollout(setup, config_.group_size, seed, config_.selector);
        const double loss = AccumulateGroup(group, grad);
        result.loss += loss;
        const bool used = std::any_of(
            group.completions.begin(), group.completions.end(),
            [&](const Completion& c) { return c.reward != group.completions.front().reward; });
        if (used) ++result.groups_used;
        for (auto& e : group.episodes) result.episodes.push_back(e);
        result.groups.push_back(std::move(group));
      } catch (const NoBranchPoint& e) {
        if (warn_) warn_(std::string("step ") + std::to_string(step_) + ": " + e.what());
      }
    }
  }

  if (result.groups_used > 0) {
    try {
      optimizer_.Step(policy_.params(), grad);
      result.updated = true;
    } catch (const NonFiniteGradient& e) {
      if (warn_) warn_(std::string("step ") + std::to_string(step_) + ": " + e.what());
    }
  }
  ++step_;
  return result;
}

MetricsRow Trainer::EvaluateNow(std::optional<double> loss,
                                std::vector<dialogue::Episode>* episodes) {
  dialogue::EpisodeOptions options;
  options.max_resamples = config_.max_resamples;
  MetricsRow row;
  row.step = step_;
  row.algo = AlgoName(config_.algo);
  row.game = game::GameKindName(config_.game.kind);
  row.eval = Evaluate(config_.game, policy_, opponent_, config_.trained_player,
                      config_.eval_episodes, util::DeriveSeed(config_.seed, {kEvalStream}),
                      judge_, episodes, options);
  row.loss = loss;
  return row;
}

void Trainer::Run(const Callbacks& callbacks) {
  const auto evaluate = [&](std::optional<double> loss) {
    std::vector<dialogue::Episode> episodes;
    auto row = EvaluateNow(loss, callbacks.on_eval_episodes ? &episodes : nullptr);
    if (callbacks.on_metrics) callbacks.on_metrics(row);
    if (callbacks.on_eval_episodes) callbacks.on_eval_episodes(episodes);
  };
  if (step_ == 0) evaluate(std::nullopt);
  std::optional<double> last_loss;
  while (step_ < config_.steps) {
    const auto result = Step();
    last_loss = result.loss;
    if (callbacks.on_step) callbacks.on_step(result);
    if (step_ % config_.eval_every == 0 || step_ == config_.steps) evaluate(last_loss);
  }
}

json Trainer::CheckpointMetadata() const {
  return {{"step", step_},
          {"config_hash", config_.Hash()},
          {"config", config_.ToJson()},
          {"game", game::GameKindName(config_.game.kind)},
          {"num_params", policy_.params().size()},
          {"rng_state", {{"seed", config_.seed}, {"next_step", step_}}},
          {"optimizer_state", optimizer_.StateToJson()},
          {"reference", reference_}};
}

void Trainer::Resume(const json& sidecar) {
  if (sidecar.at("num_params").get<std::size_t>() != policy_.params().size()) {
    throw std::invalid_argument("checkpoint does not match the policy shape");
  }
  step_ = sidecar.at("step").get<int>();
  optimizer_.RestoreState(sidecar.at("optimizer_state"));
  if (sidecar.contains("reference")) {
    reference_ = sidecar.at("reference").get<std::vector<double>>();
  }
}

void SaveCheckpoint(const std::string& base, const std::vector<double>& params,
                    const json& metadata) {
  std::ofstream bin(base + ".bin", std::ios::binary | std::ios::trunc);
  if (!bin) throw std::runtime_error("cannot write " + base + ".bin");
  for (double v : params) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    char bytes[8];
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xFF);
    bin.write(bytes, 8);
  }
  std::ofstream side(base + ".json", std::ios::trunc);
  if (!side) throw std::runtime_error("cannot write " + base + ".json");
  side << metadata.dump(2) << '\n';
}

Checkpoint LoadCheckpoint(const std::string& path) {
  std::string base = path;
  for (const std::string ext : {".bin", ".json"}) {
    if (base.size() > ext.size() && base.compare(base.size() - ext.size(), ext.size(), ext) == 0) {
      base.resize(base.size() - ext.size());
      break;
    }
  }
  Checkpoint ck;
  std::ifstream side(base + ".json");
  if (!side) throw std::runtime_error("cannot read " + base + ".json");
  try {
    ck.metadata = json::parse(side);
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed checkpoint metadata: " + std::string(e.what()));
  }
  std::ifstream bin(base + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot read " + base + ".bin");
  char bytes[8];
  while (bin.read(bytes, 8)) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[b])) << (8 * b);
    }
    ck.params.push_back(std::bit_cast<double>(bits));
  }
  if (bin.gcount() != 0) throw std::runtime_error("truncated checkpoint " + base + ".bin");
  if (ck.metadata.contains("num_params") &&
      ck.metadata.at("num_params").get<std::size_t>() != ck.params.size()) {
    throw std::runtime_error("checkpoint parameter count does not match its metadata");
  }
  return ck;
}

}  // namespace talkgames::training
