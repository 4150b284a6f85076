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

#ifndef TALKGAMES_SIGNALS_SIGNALS_H_
#define TALKGAMES_SIGNALS_SIGNALS_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <stdexcept>
#include <string>
#include <vector>

#include "talkgames/agents/policy.h"
#include "talkgames/dialogue/episode.h"
#include "talkgames/game/types.h"

namespace talkgames::signals {

class UnsupportedGame : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kKlSmoothing = 1e-9;
inline constexpr double kDegenerateRange = 1e-12;

// Utility of the evaluated player for (own action i, opponent action j).
struct PayoffTable {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::function<double(std::size_t, std::size_t)> u;
  // Extremes over the whole joint grid.
  double min_value = 0.0;
  double max_value = 0.0;

  double range() const { return max_value - min_value; }

  // Row-major values.
  static PayoffTable Dense(std::size_t rows, std::size_t cols, std::vector<double> values);
};

PayoffTable RpsPayoffTable();
// Stage (single round) profits on the grid [0, floor(p_max)] for both axes.
PayoffTable BertrandPayoffTable(const game::BertrandParams& params);
// Table for `spec`; throws UnsupportedGame for bargaining.
PayoffTable PayoffTableFor(const game::GameSpec& spec);

struct SignalState {
  std::vector<double> pi_true;    // opponent's next action, over columns
  std::vector<double> pi_belief;  // evaluated player's belief, over columns
  std::vector<double> pi_self;    // evaluated player's next action, over rows
  PayoffTable payoff;
};

struct SignalReport {
  double ise = 0.0;
  double srp = 0.5;
  double lo = 0.0;
  double u_max = 0.0;  // best pure action against the belief
  double u_min = 0.0;  // worst pure action against the belief
  double range = 0.0;  // C: payoff range over the joint grid
  double bound_lower = 0.0;
  double bound_upper = 0.0;
  double e_true = 0.0;
  bool violation = false;
};

// KL(p || q) after adding `eps` to every entry and renormalizing both.
// Throws std::invalid_argument on size mismatch.
double KlDivergence(const std::vector<double>& p, const std::vector<double>& q,
                    double eps = kKlSmoothing);
// Same, but also checks that the supports list the same actions.
double KlDivergence(const agents::Distribution& p, const agents::Distribution& q,
                    double eps = kKlSmoothing);

// Expected utility of every pure own action against `opponent`.
std::vector<double> ActionValues(const PayoffTable& payoff,
                                 const std::vector<double>& opponent);
double ExpectedUtility(const PayoffTable& payoff, const std::vector<double>& self,
                       const std::vector<double>& opponent);

double Ise(const SignalState& state);
double Srp(const SignalState& state);
double Lo(const SignalState& state);
// All signals plus the sandwich lower <= e_true <= upper checked at `tol`.
SignalReport SignalBounds(const SignalState& state, double tol = 1e-9);

// Signals for the player `trained` at the state just before each of its game
// actions in a finished episode, using live agents for elicitation.
struct ScheduledSignal {
  int turn_index = 0;
  agents::Distribution pi_true;
  agents::Distribution pi_belief;
  agents::Distribution pi_self;
  SignalReport report;
};

std::vector<ScheduledSignal> SignalSchedule(const dialogue::Episode& episode,
                                            int trained,
                                            agents::AgentPolicy& trained_agent,
                                            agents::AgentPolicy& opponent);

// Signals at the current state of a running conversation, before `trained`
// acts.
ScheduledSignal SignalsAt(const dialogue::Conversation& state, int trained,
                          agents::AgentPolicy& trained_agent,
                          agents::AgentPolicy& opponent);

// Report from stored distributions (as written to the episode log).
SignalReport ReportFromDistributions(const game::GameSpec& spec,
                                     const agents::Distribution& pi_true,
                                     const agents::Distribution& pi_belief,
                                     const agents::Distribution& pi_self);

// JSON form of a scheduled signal for episode logs, and back.
nlohmann::json ScheduledSignalToJson(const ScheduledSignal& s);
ScheduledSignal ScheduledSignalFromJson(const nlohmann::json& j, const game::GameSpec& spec);

// Evaluation metrics.

// Mean of (u_self - u_opp) / (|u_self| + |u_opp|), zero when both are zero.
double NormalizedRelativeAdvantage(double u_self, double u_opp);
double Nra(const std::vector<std::pair<double, double>>& utilities);

// Own total profit over rounds * monopoly profit.
double NormalizedEarnings(double total_profit, const game::BertrandParams& params);
double NormalizedEarnings(const dialogue::Conversation& finished, int player);

struct WinDrawLose {
  double win = 0.0;
  double draw = 0.0;
  double lose = 0.0;
};
WinDrawLose WinDrawLoseRates(const std::vector<std::pair<double, double>>& utilities);

// Generalized Nash bargaining exponent that best explains a deal.
class BargainingPowerCalculator {
 public:
  // `agent_is_seller` selects whose utility is u_agent.
  BargainingPowerCalculator(const game::BargainingParams& params, bool agent_is_seller);

  // Returns alpha in [0, 1]; no deal counts as zero utility for both.
  double Power(const std::optional<game::Proposal>& deal) const;
  double PowerFromUtilities(double u_agent, double u_opponent) const;

  // Pareto frontier of (u_agent, u_opponent) over the deal grid, sorted by
  // increasing u_agent.
  const std::vector<std::pair<double, double>>& frontier() const { return frontier_; }
  // Maximizer of u_agent^alpha * u_opponent^(1 - alpha) over positive pairs.
  std::pair<double, double> Argmax(double alpha) const;

 private:
  game::BargainingParams params_;
  bool agent_is_seller_;
  std::vector<std::pair<double, double>> frontier_;
  std::vector<std::pair<double, double>> argmax_by_alpha_;
};

double BargainingPower(const std::optional<game::Proposal>& deal,
                       const game::BargainingParams& params, bool agent_is_seller);

}  // namespace talkgames::signals

#endif  // TALKGAMES_SIGNALS_SIGNALS_H_
