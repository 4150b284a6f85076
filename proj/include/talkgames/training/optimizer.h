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

#ifndef TALKGAMES_TRAINING_OPTIMIZER_H_
#define TALKGAMES_TRAINING_OPTIMIZER_H_

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace talkgames::training {

class NonFiniteGradient : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OptimizerKind { kSgd, kAdam };

OptimizerKind ParseOptimizerKind(const std::string& name);
std::string OptimizerKindName(OptimizerKind kind);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kSgd;
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Optimizer {
 public:
  Optimizer(OptimizerConfig config, std::size_t num_params);

  // theta -= update(grad). Throws NonFiniteGradient, leaving theta and the
  // moment estimates untouched.
  void Step(std::span<double> theta, std::span<const double> grad);

  const OptimizerConfig& config() const { return config_; }
  long steps() const { return t_; }

  nlohmann::json StateToJson() const;
  void RestoreState(const nlohmann::json& state);

 private:
  OptimizerConfig config_;
  long t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

}  // namespace talkgames::training

#endif  // TALKGAMES_TRAINING_OPTIMIZER_H_
