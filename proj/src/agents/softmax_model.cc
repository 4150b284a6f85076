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

#include "talkgames/agents/softmax_model.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace talkgames::agents {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool Legal(const Decision& d, int c) {
  return d.legal.empty() || d.legal[static_cast<std::size_t>(c)] != 0;
}

// Log-softmax over legal entries; illegal entries are -inf.
std::vector<double> LogSoftmax(const std::vector<double>& logits) {
  double hi = kNegInf;
  for (double z : logits) hi = std::max(hi, z);
  if (hi == kNegInf) throw std::invalid_argument("decision has no legal choice");
  double total = 0.0;
  for (double z : logits) {
    if (z != kNegInf) total += std::exp(z - hi);
  }
  const double lse = hi + std::log(total);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = logits[i] == kNegInf ? kNegInf : logits[i] - lse;
  }
  return out;
}

}  // namespace

SoftmaxModel::SoftmaxModel(int num_features, std::vector<int> stage_sizes,
                           std::vector<std::string> stage_names)
    : num_features_(num_features),
      stage_sizes_(std::move(stage_sizes)),
      stage_names_(std::move(stage_names)) {
  if (num_features_ < 1) throw std::invalid_argument("need at least one feature");
  stage_names_.resize(stage_sizes_.size());
  for (std::size_t s = 0; s < stage_sizes_.size(); ++s) {
    if (stage_sizes_[s] < 1) throw std::invalid_argument("empty stage");
    if (stage_names_[s].empty()) stage_names_[s] = "stage" + std::to_string(s);
    offsets_.push_back(num_params_);
    num_params_ += num_features_ * stage_sizes_[s];
  }
}

std::vector<double> SoftmaxModel::Logits(std::span<const double> theta,
                                         const Decision& decision) const {
  const int n = stage_sizes_.at(static_cast<std::size_t>(decision.stage));
  if (!decision.legal.empty() && static_cast<int>(decision.legal.size()) != n) {
    throw std::invalid_argument("legal mask size does not match stage");
  }
  std::vector<double> z(static_cast<std::size_t>(n), 0.0);
  for (const auto& f : decision.features) {
    const double* row = theta.data() + ParamIndex(decision.stage, f.index, 0);
    for (int c = 0; c < n; ++c) z[c] += f.value * row[c];
  }
  for (int c = 0; c < n; ++c) {
    if (!Legal(decision, c)) z[c] = kNegInf;
  }
  return z;
}

std::vector<double> SoftmaxModel::Probs(std::span<const double> theta,
                                        const Decision& decision) const {
  auto logp = LogSoftmax(Logits(theta, decision));
  for (double& v : logp) v = v == kNegInf ? 0.0 : std::exp(v);
  return logp;
}

double SoftmaxModel::LogProb(std::span<const double> theta,
                             const Decision& decision) const {
  if (!Legal(decision, decision.choice)) {
    throw std::invalid_argument("recorded choice is not legal");
  }
  return LogSoftmax(Logits(theta, decision))[decision.choice];
}

double SoftmaxModel::SequenceLogProb(std::span<const double> theta,
                                     std::span<const Decision> decisions) const {
  double total = 0.0;
  for (const auto& d : decisions) total += LogProb(theta, d);
  return total;
}

void SoftmaxModel::AddLogitGrad(const Decision& decision,
                                std::span<const double> dlogits, double scale,
                                std::span<double> grad) const {
  const int n = stage_sizes_[decision.stage];
  for (const auto& f : decision.features) {
    double* row = grad.data() + ParamIndex(decision.stage, f.index, 0);
    const double w = scale * f.value;
    for (int c = 0; c < n; ++c) row[c] += w * dlogits[c];
  }
}

void SoftmaxModel::AddLogProbGrad(std::span<const double> theta,
                                  const Decision& decision, double scale,
                                  std::span<double> grad) const {
  auto d = Probs(theta, decision);
  for (double& v : d) v = -v;
  d[decision.choice] += 1.0;
  AddLogitGrad(decision, d, scale, grad);
}

void SoftmaxModel::AddSequenceLogProbGrad(std::span<const double> theta,
                                          std::span<const Decision> decisions,
                                          double scale,
                                          std::span<double> grad) const {
  for (const auto& d : decisions) AddLogProbGrad(theta, d, scale, grad);
}

double SoftmaxModel::Kl(std::span<const double> theta, std::span<const double> ref,
                        const Decision& decision) const {
  const auto lp = LogSoftmax(Logits(theta, decision));
  const auto lq = LogSoftmax(Logits(ref, decision));
  double kl = 0.0;
  for (std::size_t c = 0; c < lp.size(); ++c) {
    if (lp[c] != kNegInf) kl += std::exp(lp[c]) * (lp[c] - lq[c]);
  }
  return kl;
}

void SoftmaxModel::AddKlGrad(std::span<const double> theta,
                             std::span<const double> ref, const Decision& decision,
                             double scale, std::span<double> grad) const {
  const auto lp = LogSoftmax(Logits(theta, decision));
  const auto lq = LogSoftmax(Logits(ref, decision));
  double kl = 0.0;
  for (std::size_t c = 0; c < lp.size(); ++c) {
    if (lp[c] != kNegInf) kl += std::exp(lp[c]) * (lp[c] - lq[c]);
  }
  std::vector<double> d(lp.size(), 0.0);
  for (std::size_t c = 0; c < lp.size(); ++c) {
    if (lp[c] != kNegInf) d[c] = std::exp(lp[c]) * (lp[c] - lq[c] - kl);
  }
  AddLogitGrad(decision, d, scale, grad);
}

double SoftmaxModel::Entropy(std::span<const double> theta,
                             const Decision& decision) const {
  const auto lp = LogSoftmax(Logits(theta, decision));
  double h = 0.0;
  for (double v : lp) {
    if (v != kNegInf) h -= std::exp(v) * v;
  }
  return h;
}

void SoftmaxModel::AddEntropyGrad(std::span<const double> theta,
                                  const Decision& decision, double scale,
                                  std::span<double> grad) const {
  const auto lp = LogSoftmax(Logits(theta, decision));
  double h = 0.0;
  for (double v : lp) {
    if (v != kNegInf) h -= std::exp(v) * v;
  }
  std::vector<double> d(lp.size(), 0.0);
  for (std::size_t c = 0; c < lp.size(); ++c) {
    if (lp[c] != kNegInf) d[c] = -std::exp(lp[c]) * (lp[c] + h);
  }
  AddLogitGrad(decision, d, scale, grad);
}

}  // namespace talkgames::agents
