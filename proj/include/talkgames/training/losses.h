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

#ifndef TALKGAMES_TRAINING_LOSSES_H_
#define TALKGAMES_TRAINING_LOSSES_H_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "talkgames/agents/softmax_model.h"

namespace talkgames::training {

class MissingLogProbs : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};
class NoPreferencePairs : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};
class RefuseTooLarge : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// One sampled response at a branch point: the softmax choices that produced
// it and its scores.
struct Completion {
  std::vector<agents::Decision> decisions;
  double reward = 0.0;
  // Sequence log-probabilities under the sampling and reference policies.
  std::optional<double> logprob_old;
  std::optional<double> logprob_ref;
};

struct LossResult {
  double loss = 0.0;
  std::vector<double> grad;
};

struct GrpoConfig {
  double clip_epsilon = 0.2;
  double kl_beta = 0.1;
  double entropy_gamma = 0.0;
  double std_floor = 1e-8;

  void Validate() const;
};

// (r_i - mean) / max(population std, floor); all zeros when every reward is
// equal.
std::vector<double> GrpoAdvantages(std::span<const double> rewards, double std_floor = 1e-8);

// Negated clipped objective of one group, averaged over its completions:
//   -1/G sum_i [min(rho_i A_i, clip(rho_i) A_i)
//               - beta sum_s KL_s(theta || ref) + gamma sum_s H_s(theta)]
// with one sequence-level ratio rho_i per completion and exact KL and
// entropy at each of its decision states. Requires logprob_old.
LossResult GrpoLoss(const agents::SoftmaxModel& model, std::span<const double> theta,
                    std::span<const double> ref, std::span<const Completion> group,
                    const GrpoConfig& config);

// Contribution of completion `i` alone; adds its gradient into `grad` and
// returns its loss term. Summing over i reproduces GrpoLoss.
double AccumulateGrpoCompletion(const agents::SoftmaxModel& model,
                                std::span<const double> theta, std::span<const double> ref,
                                const Completion& completion, double advantage,
                                std::size_t group_size, const GrpoConfig& config,
                                std::span<double> grad);

// Implicit rewards beta * (log pi_theta - log pi_ref) of every completion.
std::vector<double> ImplicitRewards(const agents::SoftmaxModel& model,
                                    std::span<const double> theta,
                                    std::span<const Completion> group, double beta);

// Mean of -log sigmoid(r_w - r_l) over pairs with differing rewards.
// Throws NoPreferencePairs.
LossResult DpoPairsLoss(const agents::SoftmaxModel& model, std::span<const double> theta,
                        std::span<const Completion> group, double beta);

// Plackett-Luce negative log-likelihood of the reward ordering, averaged
// over the orderings that only permute tied completions. At most `cap`
// orderings are used; beyond that `cap` are drawn uniformly with `seed`.
LossResult DpoPermutationLoss(const agents::SoftmaxModel& model,
                              std::span<const double> theta,
                              std::span<const Completion> group, double beta,
                              std::uint64_t seed = 0, std::size_t cap = 1000);

// Ranking-with-ties likelihood: at each rank level the tie group's geometric
// mean over the sum of geometric means of the remaining subsets of size up to
// the largest tie group. Throws RefuseTooLarge for more than 16 completions.
LossResult DpoTiesLoss(const agents::SoftmaxModel& model, std::span<const double> theta,
                       std::span<const Completion> group, double beta);

// Scalar forms on implicit rewards `r` ordered like `rewards`; `dr` receives
// dL/dr. Shared by the losses above and by tests.
double PairsLossOnScores(std::span<const double> r, std::span<const double> rewards,
                         std::span<double> dr);
double PermutationLossOnScores(std::span<const double> r, std::span<const double> rewards,
                               std::uint64_t seed, std::size_t cap, std::span<double> dr);
double TiesLossOnScores(std::span<const double> r, std::span<const double> rewards,
                        std::span<double> dr);

// Mean negative log-likelihood of the recorded decision sequences.
LossResult StarSftLoss(const agents::SoftmaxModel& model, std::span<const double> theta,
                       std::span<const std::vector<agents::Decision>> examples);

}  // namespace talkgames::training

#endif  // TALKGAMES_TRAINING_LOSSES_H_
