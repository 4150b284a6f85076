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

#include "talkgames/training/optimizer.h"

#include <cmath>

namespace talkgames::training {

OptimizerKind ParseOptimizerKind(const std::string& name) {
  if (name == "sgd") return OptimizerKind::kSgd;
  if (name == "adam") return OptimizerKind::kAdam;
  throw std::invalid_argument("unknown optimizer '" + name + "' (expected sgd or adam)");
}

std::string OptimizerKindName(OptimizerKind kind) {
  return kind == OptimizerKind::kSgd ? "sgd" : "adam";
}

Optimizer::Optimizer(OptimizerConfig config, std::size_t num_params)
    : config_(config), m_(num_params, 0.0), v_(num_params, 0.0) {
  if (!(config_.lr > 0.0)) throw std::invalid_argument("learning rate must be > 0");
}

void Optimizer::Step(std::span<double> theta, std::span<const double> grad) {
  if (theta.size() != m_.size() || grad.size() != m_.size()) {
    throw std::invalid_argument("optimizer: parameter size mismatch");
  }
  for (double g : grad) {
    if (!std::isfinite(g)) throw NonFiniteGradient("non-finite gradient; step skipped");
  }
  ++t_;
  if (config_.kind == OptimizerKind::kSgd) {
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= config_.lr * grad[i];
    return;
  }
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < theta.size(); ++i) {
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * grad[i];
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * grad[i] * grad[i];
    theta[i] -= config_.lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + config_.eps);
  }
}

nlohmann::json Optimizer::StateToJson() const {
  return {{"kind", OptimizerKindName(config_.kind)}, {"t", t_}, {"m", m_}, {"v", v_}};
}

void Optimizer::RestoreState(const nlohmann::json& state) {
  auto m = state.at("m").get<std::vector<double>>();
  auto v = state.at("v").get<std::vector<double>>();
  if (m.size() != m_.size() || v.size() != v_.size()) {
    throw std::invalid_argument("optimizer state does not match the parameter count");
  }
  t_ = state.at("t").get<long>();
  m_ = std::move(m);
  v_ = std::move(v);
}

}  // namespace talkgames::training
