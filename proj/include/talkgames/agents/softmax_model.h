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

#ifndef TALKGAMES_AGENTS_SOFTMAX_MODEL_H_
#define TALKGAMES_AGENTS_SOFTMAX_MODEL_H_

#include <span>
#include <string>
#include <vector>

namespace talkgames::agents {

struct Feature {
  int index = 0;
  double value = 1.0;
};
using FeatureVector = std::vector<Feature>;

// One categorical choice made while producing a turn.
struct Decision {
  int stage = 0;
  FeatureVector features;
  // Legal choices; empty means every choice is legal.
  std::vector<char> legal;
  int choice = 0;
};

// Shape of a chain of linear-softmax stages. Stage s has its own weight
// matrix of size num_features x stage_sizes[s]; the logit of choice c is
// sum_f x_f * theta[offset(s) + f * stage_sizes[s] + c]. Parameters live
// outside the model so that losses can evaluate current, old and reference
// vectors against the same shape.
class SoftmaxModel {
 public:
  SoftmaxModel() = default;
  SoftmaxModel(int num_features, std::vector<int> stage_sizes,
               std::vector<std::string> stage_names = {});

  int num_features() const { return num_features_; }
  int num_stages() const { return static_cast<int>(stage_sizes_.size()); }
  int stage_size(int stage) const { return stage_sizes_[stage]; }
  const std::string& stage_name(int stage) const { return stage_names_[stage]; }
  int num_params() const { return num_params_; }
  int ParamIndex(int stage, int feature, int choice) const {
    return offsets_[stage] + feature * stage_sizes_[stage] + choice;
  }

  // Probabilities at a decision state; illegal choices get exactly zero.
  // Throws std::invalid_argument if nothing is legal.
  std::vector<double> Probs(std::span<const double> theta,
                            const Decision& decision) const;
  double LogProb(std::span<const double> theta, const Decision& decision) const;
  double SequenceLogProb(std::span<const double> theta,
                         std::span<const Decision> decisions) const;

  // grad += scale * d/dtheta log pi(choice | state).
  void AddLogProbGrad(std::span<const double> theta, const Decision& decision,
                      double scale, std::span<double> grad) const;
  void AddSequenceLogProbGrad(std::span<const double> theta,
                              std::span<const Decision> decisions, double scale,
                              std::span<double> grad) const;

  // KL(pi_theta || pi_ref) over the full distribution at the state.
  double Kl(std::span<const double> theta, std::span<const double> ref,
            const Decision& decision) const;
  void AddKlGrad(std::span<const double> theta, std::span<const double> ref,
                 const Decision& decision, double scale,
                 std::span<double> grad) const;

  double Entropy(std::span<const double> theta, const Decision& decision) const;
  void AddEntropyGrad(std::span<const double> theta, const Decision& decision,
                      double scale, std::span<double> grad) const;

 private:
  std::vector<double> Logits(std::span<const double> theta,
                             const Decision& decision) const;
  // Scatters dL/dlogits back onto the stage weights.
  void AddLogitGrad(const Decision& decision, std::span<const double> dlogits,
                    double scale, std::span<double> grad) const;

  int num_features_ = 0;
  std::vector<int> stage_sizes_;
  std::vector<std::string> stage_names_;
  std::vector<int> offsets_;
  int num_params_ = 0;
};

}  // namespace talkgames::agents

#endif  // TALKGAMES_AGENTS_SOFTMAX_MODEL_H_
