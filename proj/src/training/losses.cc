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

#include "talkgames/training/losses.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "talkgames/util/random.h"

namespace talkgames::training {
namespace {

double LogSumExp(std::span<const double> x) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : x) m = std::max(m, v);
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

// log(1 + exp(x)) without overflow.
double Softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Indices grouped by equal reward, best group first; indices ascending within
// a group.
std::vector<std::vector<int>> TieGroups(std::span<const double> rewards) {
  std::vector<int> order(rewards.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return rewards[a] > rewards[b]; });
  std::vector<std::vector<int>> groups;
  for (int i : order) {
    if (groups.empty() || rewards[groups.back().front()] != rewards[i]) groups.emplace_back();
    groups.back().push_back(i);
  }
  return groups;
}

// Adds the gradient of sum_i dr_i * r_i with r_i = beta * (lp_i - ref_i).
void ChainScores(const agents::SoftmaxModel& model, std::span<const double> theta,
                 std::span<const Completion> group, double beta, std::span<const double> dr,
                 std::span<double> grad) {
  for (std::size_t i = 0; i < group.size(); ++i) {
    if (dr[i] == 0.0) continue;
    model.AddSequenceLogProbGrad(theta, group[i].decisions, beta * dr[i], grad);
  }
}

LossResult ScoreLoss(const agents::SoftmaxModel& model, std::span<const double> theta,
                     std::span<const Completion> group, double beta,
                     const std::function<double(std::span<const double>,
                                                std::span<const double>,
                                                std::span<double>)>& on_scores) {
  const auto r = ImplicitRewards(model, theta, group, beta);
  std::vector<double> rewards;
  for (const auto& c : group) rewards.push_back(c.reward);
  std::vector<double> dr(group.size(), 0.0);
  LossResult out;
  out.loss = on_scores(r, rewards, dr);
  out.grad.assign(theta.size(), 0.0);
  ChainScores(model, theta, group, beta, dr, out.grad);
  return out;
}

}  // namespace

void GrpoConfig::Validate() const {
  if (!(clip_epsilon > 0.0 && clip_epsilon < 1.0)) {
    throw std::invalid_argument("clip epsilon must be in (0, 1)");
  }
  if (!(kl_beta >= 0.0) || !(entropy_gamma >= 0.0)) {
    throw std::invalid_argument("kl and entropy coefficients must be >= 0");
  }
  if (!(std_floor > 0.0)) throw std::invalid_argument("std floor must be > 0");
}

std::vector<double> GrpoAdvantages(std::span<const double> rewards, double std_floor) {
  std::vector<double> a(rewards.size(), 0.0);
  if (rewards.empty()) return a;
  const double n = static_cast<double>(rewards.size());
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  var /= n;
  if (std::all_of(rewards.begin(), rewards.end(),
                  [&](double r) { return r == rewards.front(); })) {
    return a;
  }
  const double sd = std::max(std::sqrt(var), std_floor);
  for (std::size_t i = 0; i < rewards.size(); ++i) a[i] = (rewards[i] - mean) / sd;
  return a;
}

double AccumulateGrpoCompletion(const agents::SoftmaxModel& model,
                                std::span<const double> theta, std::span<const double> ref,
                                const Completion& completion, double advantage,
                                std::size_t group_size, const GrpoConfig& config,
                                std::span<double> grad) {
  if (!completion.logprob_old) throw MissingLogProbs("GRPO needs sampling log-probabilities");
  const double g = static_cast<double>(group_size);
  const double lp = model.SequenceLogProb(theta, completion.decisions);
  const double ratio = std::exp(lp - *completion.logprob_old);
  const double clipped =
      std::clamp(ratio, 1.0 - config.clip_epsilon, 1.0 + config.clip_epsilon);
  const double unclipped_term = ratio * advantage;
  const double clipped_term = clipped * advantage;
  double objective = std::min(unclipped_term, clipped_term);
  if (unclipped_term <= clipped_term && advantage != 0.0) {
    model.AddSequenceLogProbGrad(theta, completion.decisions, -unclipped_term / g, grad);
  }
  for (const auto& d : completion.decisions) {
    if (config.kl_beta != 0.0) {
      objective -= config.kl_beta * model.Kl(theta, ref, d);
      model.AddKlGrad(theta, ref, d, config.kl_beta / g, grad);
    }
    if (config.entropy_gamma != 0.0) {
      objective += config.entropy_gamma * model.Entropy(theta, d);
      model.AddEntropyGrad(theta, d, -config.entropy_gamma / g, grad);
    }
  }
  return -objective / g;
}

LossResult GrpoLoss(const agents::SoftmaxModel& model, std::span<const double> theta,
                    std::span<const double> ref, std::span<const Completion> group,
                    const GrpoConfig& config) {
  std::vector<double> rewards;
  for (const auto& c : group) rewards.push_back(c.reward);
  const auto adv = GrpoAdvantages(rewards, config.std_floor);
  LossResult out;
  out.grad.assign(theta.size(), 0.0);
  for (std::size_t i = 0; i < group.size(); ++i) {
    out.loss += AccumulateGrpoCompletion(model, theta, ref, group[i], adv[i], group.size(),
                                         config, out.grad);
  }
  return out;
}

std::vector<double> ImplicitRewards(const agents::SoftmaxModel& model,
                                    std::span<const double> theta,
                                    std::span<const Completion> group, double beta) {
  std::vector<double> r;
  r.reserve(group.size());
  for (const auto& c : group) {
    if (!c.logprob_ref) throw MissingLogProbs("DPO needs reference log-probabilities");
    r.push_back(beta * (model.SequenceLogProb(theta, c.decisions) - *c.logprob_ref));
  }
  return r;
}

double PairsLossOnScores(std::span<const double> r, std::span<const double> rewards,
                         std::span<double> dr) {
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < r.size(); ++i) {
    for (std::size_t j = i + 1; j < r.size(); ++j) {
      if (rewards[i] == rewards[j]) continue;
      const bool i_wins = rewards[i] > rewards[j];
      pairs.emplace_back(i_wins ? i : j, i_wins ? j : i);
    }
  }
  if (pairs.empty()) throw NoPreferencePairs("all completions have the same reward");
  const double n = static_cast<double>(pairs.size());
  double loss = 0.0;
  for (const auto& [w, l] : pairs) {
    const double margin = r[w] - r[l];
    loss += Softplus(-margin);
    const double d = -Sigmoid(-margin) / n;
    dr[w] += d;
    dr[l] -= d;
  }
  return loss / n;
}

double PermutationLossOnScores(std::span<const double> r, std::span<const double> rewards,
                               std::uint64_t seed, std::size_t cap, std::span<double> dr) {
  if (r.size() < 2) throw std::invalid_argument("permutation loss needs at least 2 completions");
  if (cap == 0) throw std::invalid_argument("ordering cap must be positive");
  auto groups = TieGroups(rewards);

  std::size_t count = 1;
  for (const auto& g : groups) {
    for (std::size_t f = 2; f <= g.size() && count <= cap; ++f) count *= f;
  }

  std::vector<int> ordering;
  std::vector<double> tail;
  std::vector<double> local(r.size());
  const auto add_ordering = [&](double weight) {
    ordering.clear();
    for (const auto& g : groups) ordering.insert(ordering.end(), g.begin(), g.end());
    double nll = 0.0;
    std::fill(local.begin(), local.end(), 0.0);
    for (std::size_t t = 0; t < ordering.size(); ++t) {
      tail.clear();
      for (std::size_t s = t; s < ordering.size(); ++s) tail.push_back(r[ordering[s]]);
      const double lse = LogSumExp(tail);
      nll += lse - r[ordering[t]];
      local[ordering[t]] -= 1.0;
      for (std::size_t s = t; s < ordering.size(); ++s) {
        local[ordering[s]] += std::exp(r[ordering[s]] - lse);
      }
    }
    for (std::size_t i = 0; i < r.size(); ++i) dr[i] += weight * local[i];
    return weight * nll;
  };

  double loss = 0.0;
  if (count <= cap) {
    const double w = 1.0 / static_cast<double>(count);
    // Odometer over the permutations of each tie group.
    while (true) {
      loss += add_ordering(w);
      std::size_t g = 0;
      for (; g < groups.size(); ++g) {
        if (std::next_permutation(groups[g].begin(), groups[g].end())) break;
      }
      if (g == groups.size()) break;
    }
  } else {
    util::Rng rng(seed);
    const double w = 1.0 / static_cast<double>(cap);
    for (std::size_t k = 0; k < cap; ++k) {
      for (auto& g : groups) {
        for (std::size_t i = g.size(); i > 1; --i) {
          const auto j = static_cast<std::size_t>(rng.UniformInt(0, static_cast<std::int64_t>(i) - 1));
          std::swap(g[i - 1], g[j]);
        }
      }
      loss += add_ordering(w);
    }
  }
  return loss;
}

double TiesLossOnScores(std::span<const double> r, std::span<const double> rewards,
                        std::span<double> dr) {
  if (r.size() > 16) throw RefuseTooLarge("ties loss supports at most 16 completions");
  if (r.empty()) return 0.0;
  const auto groups = TieGroups(rewards);
  std::size_t max_tie = 0;
  for (const auto& g : groups) max_tie = std::max(max_tie, g.size());

  unsigned remaining = (1u << r.size()) - 1u;
  double loss = 0.0;
  std::vector<double> scores;
  std::vector<unsigned> subsets;
  for (const auto& g : groups) {
    double numerator = 0.0;
    for (int i : g) numerator += r[i];
    numerator /= static_cast<double>(g.size());

    scores.clear();
    subsets.clear();
    for (unsigned s = remaining; s != 0; s = (s - 1) & remaining) {
      const int size = std::popcount(s);
      if (static_cast<std::size_t>(size) > max_tie) continue;
      double mean = 0.0;
      for (unsigned bits = s; bits != 0; bits &= bits - 1) mean += r[std::countr_zero(bits)];
      scores.push_back(mean / size);
      subsets.push_back(s);
    }
    const double lse = LogSumExp(scores);
    loss += lse - numerator;
    for (int i : g) dr[i] -= 1.0 / static_cast<double>(g.size());
    for (std::size_t k = 0; k < subsets.size(); ++k) {
      const double w = std::exp(scores[k] - lse) / std::popcount(subsets[k]);
      for (unsigned bits = subsets[k]; bits != 0; bits &= bits - 1) {
        dr[std::countr_zero(bits)] += w;
      }
    }
    for (int i : g) remaining &= ~(1u << i);
  }
  return loss;
}

LossResult DpoPairsLoss(const agents::SoftmaxModel& model, std::span<const double> theta,
                        std::span<const Completion> group, double beta) {
  return ScoreLoss(model, theta, group, beta, PairsLossOnScores);
}

LossResult DpoPermutationLoss(const agents::SoftmaxModel& model,
                              std::span<const double> theta,
                              std::span<const Completion> group, double beta,
                              std::uint64_t seed, std::size_t cap) {
  return ScoreLoss(model, theta, group, beta,
                   [&](std::span<const double> r, std::span<const double> rewards,
                       std::span<double> dr) {
                     return PermutationLossOnScores(r, rewards, seed, cap, dr);
                   });
}

LossResult DpoTiesLoss(const agents::SoftmaxModel& model, std::span<const double> theta,
                       std::span<const Completion> group, double beta) {
  return ScoreLoss(model, theta, group, beta, TiesLossOnScores);
}

LossResult StarSftLoss(const agents::SoftmaxModel& model, std::span<const double> theta,
                       std::span<const std::vector<agents::Decision>> examples) {
  LossResult out;
  out.grad.assign(theta.size(), 0.0);
  if (examples.empty()) return out;
  const double n = static_cast<double>(examples.size());
  for (const auto& ex : examples) {
    out.loss -= model.SequenceLogProb(theta, ex) / n;
    model.AddSequenceLogProbGrad(theta, ex, -1.0 / n, out.grad);
  }
  return out;
}

}  // namespace talkgames::training
