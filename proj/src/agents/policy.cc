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

#include "talkgames/agents/policy.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "talkgames/game/rules.h"

namespace talkgames::agents {

Distribution Distribution::Uniform(std::vector<game::Action> support) {
  Distribution d;
  const double p = support.empty() ? 0.0 : 1.0 / static_cast<double>(support.size());
  d.probs.assign(support.size(), p);
  d.support = std::move(support);
  return d;
}

Distribution Distribution::Normalized(std::vector<game::Action> support,
                                      std::vector<double> weights) {
  if (weights.size() != support.size()) {
    throw std::invalid_argument("support and weights differ in size");
  }
  double total = 0.0;
  for (double& w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) w = 0.0;
    total += w;
  }
  if (total <= 0.0) {
    Distribution d = Uniform(std::move(support));
    d.fallback = true;
    return d;
  }
  for (double& w : weights) w /= total;
  return {std::move(support), std::move(weights), false};
}

double Distribution::ProbabilityOf(const game::Action& action) const {
  double p = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i] == action) p += probs[i];
  }
  return p;
}

void Distribution::Check(double tol) const {
  if (probs.size() != support.size()) {
    throw std::invalid_argument("distribution support/probs size mismatch");
  }
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw std::invalid_argument("negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > tol) {
    throw std::invalid_argument("probabilities sum to " + std::to_string(total));
  }
}

std::vector<game::Action> CandidateActions(const game::GameSpec& spec) {
  std::vector<game::Action> out;
  switch (spec.kind) {
    case game::GameKind::kRps:
      for (auto m : game::kAllRpsMoves) out.emplace_back(m);
      break;
    case game::GameKind::kBertrand:
      for (auto p : game::PriceGrid(spec.bertrand)) out.emplace_back(game::Price{p});
      break;
    case game::GameKind::kBargaining:
      break;
  }
  return out;
}

}  // namespace talkgames::agents
