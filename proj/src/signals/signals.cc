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

#include "talkgames/signals/signals.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "talkgames/game/rules.h"

namespace talkgames::signals {
namespace {

void CheckSameSize(const std::vector<double>& a, const std::vector<double>& b,
                   const char* what) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(what) + ": distributions differ in size");
  }
}

std::vector<double> Smooth(const std::vector<double>& p, double eps) {
  double total = 0.0;
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    out[i] = p[i] + eps;
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

}  // namespace

PayoffTable PayoffTable::Dense(std::size_t rows, std::size_t cols,
                               std::vector<double> values) {
  if (values.size() != rows * cols || values.empty()) {
    throw std::invalid_argument("payoff values do not match the table shape");
  }
  PayoffTable table;
  table.rows = rows;
  table.cols = cols;
  table.min_value = *std::min_element(values.begin(), values.end());
  table.max_value = *std::max_element(values.begin(), values.end());
  auto shared = std::make_shared<std::vector<double>>(std::move(values));
  table.u = [shared, cols](std::size_t i, std::size_t j) { return (*shared)[i * cols + j]; };
  return table;
}

PayoffTable RpsPayoffTable() {
  std::vector<double> values;
  for (auto a : game::kAllRpsMoves) {
    for (auto b : game::kAllRpsMoves) values.push_back(game::RpsPayoff(a, b).self);
  }
  return PayoffTable::Dense(3, 3, std::move(values));
}

PayoffTable BertrandPayoffTable(const game::BertrandParams& params) {
  const auto grid = game::PriceGrid(params);
  const std::size_t n = grid.size();
  std::vector<double> profit(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = static_cast<double>(grid[i]);
    profit[i] = (p - params.cost) * game::BertrandDemand(p, params);
  }
  PayoffTable table;
  table.rows = n;
  table.cols = n;
  table.u = [profit](std::size_t i, std::size_t j) {
    if (i < j) return profit[i];
    if (i > j) return 0.0;
    return profit[i] / 2.0;
  };
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> reachable = {profit[i] / 2.0};
    if (i + 1 < n) reachable.push_back(profit[i]);
    if (i > 0) reachable.push_back(0.0);
    for (double v : reachable) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  table.min_value = lo;
  table.max_value = hi;
  return table;
}

PayoffTable PayoffTableFor(const game::GameSpec& spec) {
  switch (spec.kind) {
    case game::GameKind::kRps:
      return RpsPayoffTable();
    case game::GameKind::kBertrand:
      return BertrandPayoffTable(spec.bertrand);
    case game::GameKind::kBargaining:
      break;
  }
  throw UnsupportedGame("behavioural signals are not defined for bargaining");
}

double KlDivergence(const std::vector<double>& p, const std::vector<double>& q,
                    double eps) {
  CheckSameSize(p, q, "KL");
  const auto ps = Smooth(p, eps);
  const auto qs = Smooth(q, eps);
  double kl = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) kl += ps[i] * std::log(ps[i] / qs[i]);
  return std::max(0.0, kl);
}

double KlDivergence(const agents::Distribution& p, const agents::Distribution& q,
                    double eps) {
  if (p.support != q.support) throw std::invalid_argument("KL: supports differ");
  return KlDivergence(p.probs, q.probs, eps);
}

std::vector<double> ActionValues(const PayoffTable& payoff,
                                 const std::vector<double>& opponent) {
  if (opponent.size() != payoff.cols) {
    throw std::invalid_argument("opponent distribution does not match payoff columns");
  }
  std::vector<double> values(payoff.rows, 0.0);
  for (std::size_t j = 0; j < payoff.cols; ++j) {
    if (opponent[j] == 0.0) continue;
    for (std::size_t i = 0; i < payoff.rows; ++i) values[i] += opponent[j] * payoff.u(i, j);
  }
  return values;
}

double ExpectedUtility(const PayoffTable& payoff, const std::vector<double>& self,
                       const std::vector<double>& opponent) {
  if (self.size() != payoff.rows) {
    throw std::invalid_argument("own distribution does not match payoff rows");
  }
  const auto values = ActionValues(payoff, opponent);
  double e = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) e += self[i] * values[i];
  return e;
}

double Ise(const SignalState& state) {
  return -KlDivergence(state.pi_true, state.pi_belief);
}

double Srp(const SignalState& state) {
  const auto values = ActionValues(state.payoff, state.pi_belief);
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*hi - *lo < kDegenerateRange) return 0.5;
  const double e = ExpectedUtility(state.payoff, state.pi_self, state.pi_belief);
  return (e - *lo) / (*hi - *lo);
}

double Lo(const SignalState& state) {
  const auto values = ActionValues(state.payoff, state.pi_true);
  return *std::max_element(values.begin(), values.end());
}

SignalReport SignalBounds(const SignalState& state, double tol) {
  SignalReport r;
  const auto belief_values = ActionValues(state.payoff, state.pi_belief);
  const auto [lo, hi] = std::minmax_element(belief_values.begin(), belief_values.end());
  r.u_min = *lo;
  r.u_max = *hi;
  r.ise = Ise(state);
  r.srp = Srp(state);
  r.lo = Lo(state);
  r.range = state.payoff.range();
  r.e_true = ExpectedUtility(state.payoff, state.pi_self, state.pi_true);
  const double e_belief = r.u_max - r.u_min < kDegenerateRange
                              ? ExpectedUtility(state.payoff, state.pi_self, state.pi_belief)
                              : r.srp * (r.u_max - r.u_min) + r.u_min;
  r.bound_lower = e_belief - r.range * std::sqrt(-r.ise / 2.0);
  r.bound_upper = r.lo;
  r.violation = r.e_true < r.bound_lower - tol || r.e_true > r.bound_upper + tol;
  return r;
}

SignalReport ReportFromDistributions(const game::GameSpec& spec,
                                     const agents::Distribution& pi_true,
                                     const agents::Distribution& pi_belief,
                                     const agents::Distribution& pi_self) {
  SignalState state{pi_true.probs, pi_belief.probs, pi_self.probs, PayoffTableFor(spec)};
  return SignalBounds(state);
}

ScheduledSignal SignalsAt(const dialogue::Conversation& state, int trained,
                          agents::AgentPolicy& trained_agent,
                          agents::AgentPolicy& opponent) {
  const auto& spec = state.spec();
  if (spec.kind == game::GameKind::kBargaining) {
    throw UnsupportedGame("behavioural signals are not defined for bargaining");
  }
  const auto candidates = agents::CandidateActions(spec);
  ScheduledSignal s;
  s.turn_index = static_cast<int>(state.turns().size());
  s.pi_true = opponent.ElicitProbs(state, 1 - trained, candidates, agents::ElicitTarget::kSelf);
  s.pi_belief =
      trained_agent.ElicitProbs(state, trained, candidates, agents::ElicitTarget::kOpponent);
  s.pi_self =
      trained_agent.ElicitProbs(state, trained, candidates, agents::ElicitTarget::kSelf);
  s.report = ReportFromDistributions(spec, s.pi_true, s.pi_belief, s.pi_self);
  return s;
}

std::vector<ScheduledSignal> SignalSchedule(const dialogue::Episode& episode, int trained,
                                            agents::AgentPolicy& trained_agent,
                                            agents::AgentPolicy& opponent) {
  if (episode.spec.kind == game::GameKind::kBargaining) {
    throw UnsupportedGame("behavioural signals are not defined for bargaining");
  }
  dialogue::Conversation conversation(episode.spec, episode.seed);
  std::vector<ScheduledSignal> out;
  for (const auto& turn : episode.turns) {
    if (turn.player == trained && turn.play) {
      out.push_back(SignalsAt(conversation, trained, trained_agent, opponent));
    }
    conversation.Step(turn);
  }
  return out;
}

nlohmann::json ScheduledSignalToJson(const ScheduledSignal& s) {
  return {{"turn", s.turn_index},
          {"pi_true", s.pi_true.probs},
          {"pi_belief", s.pi_belief.probs},
          {"pi_self", s.pi_self.probs}};
}

ScheduledSignal ScheduledSignalFromJson(const nlohmann::json& j,
                                        const game::GameSpec& spec) {
  const auto candidates = agents::CandidateActions(spec);
  const auto read = [&](const char* key) {
    agents::Distribution d;
    d.support = candidates;
    d.probs = j.at(key).get<std::vector<double>>();
    if (d.probs.size() != candidates.size()) {
      throw std::invalid_argument(std::string(key) + " does not match the action grid");
    }
    return d;
  };
  ScheduledSignal s;
  s.turn_index = j.at("turn").get<int>();
  s.pi_true = read("pi_true");
  s.pi_belief = read("pi_belief");
  s.pi_self = read("pi_self");
  s.report = ReportFromDistributions(spec, s.pi_true, s.pi_belief, s.pi_self);
  return s;
}

double NormalizedRelativeAdvantage(double u_self, double u_opp) {
  const double denom = std::abs(u_self) + std::abs(u_opp);
  return denom == 0.0 ? 0.0 : (u_self - u_opp) / denom;
}

double Nra(const std::vector<std::pair<double, double>>& utilities) {
  if (utilities.empty()) return 0.0;
  double total = 0.0;
  for (const auto& [self, opp] : utilities) total += NormalizedRelativeAdvantage(self, opp);
  return total / static_cast<double>(utilities.size());
}

double NormalizedEarnings(double total_profit, const game::BertrandParams& params) {
  return total_profit / (params.rounds * game::BertrandMonopoly(params).total_profit);
}

double NormalizedEarnings(const dialogue::Conversation& finished, int player) {
  double total = 0.0;
  for (const auto& round : finished.bertrand_rounds()) total += round.profits[player];
  return NormalizedEarnings(total, finished.spec().bertrand);
}

WinDrawLose WinDrawLoseRates(const std::vector<std::pair<double, double>>& utilities) {
  WinDrawLose r;
  if (utilities.empty()) return r;
  for (const auto& [self, opp] : utilities) {
    if (self > opp) {
      r.win += 1.0;
    } else if (self < opp) {
      r.lose += 1.0;
    } else {
      r.draw += 1.0;
    }
  }
  const double n = static_cast<double>(utilities.size());
  r.win /= n;
  r.draw /= n;
  r.lose /= n;
  return r;
}

BargainingPowerCalculator::BargainingPowerCalculator(const game::BargainingParams& params,
                                                     bool agent_is_seller)
    : params_(params), agent_is_seller_(agent_is_seller) {
  if (!(params.value > params.cost)) throw game::NoSurplus("value must exceed cost");
  const int n_max = 3 * std::max(1, static_cast<int>(std::floor(params.value / params.cost)));
  const auto lo = static_cast<std::int64_t>(std::ceil(params.cost * 100.0 - 1e-9));
  const auto hi = static_cast<std::int64_t>(std::floor(params.value * 100.0 + 1e-9));
  std::vector<std::pair<double, double>> points;
  points.reserve(static_cast<std::size_t>(n_max) * static_cast<std::size_t>(hi - lo + 1));
  for (int n = 1; n <= n_max; ++n) {
    for (std::int64_t cents = lo; cents <= hi; ++cents) {
      const auto u = game::BargainingUtilities(game::Proposal{n, cents}, params_);
      points.emplace_back(agent_is_seller_ ? u.self : u.other,
                          agent_is_seller_ ? u.other : u.self);
    }
  }
  std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second > b.second;
  });
  double best_other = -std::numeric_limits<double>::infinity();
  for (const auto& p : points) {
    if (p.second > best_other) {
      frontier_.push_back(p);
      best_other = p.second;
    }
  }
  std::reverse(frontier_.begin(), frontier_.end());
  for (int k = 0; k <= 100; ++k) argmax_by_alpha_.push_back(Argmax(k / 100.0));
}

std::pair<double, double> BargainingPowerCalculator::Argmax(double alpha) const {
  double best = -std::numeric_limits<double>::infinity();
  std::pair<double, double> arg{0.0, 0.0};
  for (const auto& [ua, uo] : frontier_) {
    if (ua <= 0.0 || uo <= 0.0) continue;
    const double score = alpha * std::log(ua) + (1.0 - alpha) * std::log(uo);
    if (score > best) {
      best = score;
      arg = {ua, uo};
    }
  }
  return arg;
}

double BargainingPowerCalculator::PowerFromUtilities(double u_agent, double u_opponent) const {
  if (u_agent <= 0.0) return 0.0;
  if (u_opponent <= 0.0) return 1.0;
  std::vector<double> dist;
  for (const auto& [ua, uo] : argmax_by_alpha_) dist.push_back(std::hypot(ua - u_agent, uo - u_opponent));
  const double best = *std::min_element(dist.begin(), dist.end());
  // Several exponents can share one grid maximizer; report their centre.
  double total = 0.0;
  int count = 0;
  for (std::size_t k = 0; k < dist.size(); ++k) {
    if (dist[k] <= best + 1e-9) {
      total += static_cast<double>(k) / 100.0;
      ++count;
    }
  }
  return total / count;
}

double BargainingPowerCalculator::Power(const std::optional<game::Proposal>& deal) const {
  const auto u = game::BargainingUtilities(deal, params_);
  return agent_is_seller_ ? PowerFromUtilities(u.self, u.other)
                          : PowerFromUtilities(u.other, u.self);
}

double BargainingPower(const std::optional<game::Proposal>& deal,
                       const game::BargainingParams& params, bool agent_is_seller) {
  return BargainingPowerCalculator(params, agent_is_seller).Power(deal);
}

}  // namespace talkgames::signals
