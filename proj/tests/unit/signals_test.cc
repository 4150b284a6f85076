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

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "talkgames/agents/scripted.h"
#include "talkgames/agents/template_policy.h"
#include "talkgames/dialogue/episode.h"
#include "talkgames/game/rules.h"
#include "talkgames/signals/signals.h"
#include "test_util.h"

namespace talkgames::signals {
namespace {

using game::RpsMove;

std::vector<double> RandomSimplex(std::mt19937_64& rng, std::size_t n) {
  std::gamma_distribution<double> g(0.5, 1.0);
  std::vector<double> v(n);
  double total = 0.0;
  for (auto& x : v) total += (x = g(rng) + 1e-15);
  for (auto& x : v) x /= total;
  return v;
}

SignalState RpsState(std::vector<double> t, std::vector<double> b, std::vector<double> s) {
  return SignalState{std::move(t), std::move(b), std::move(s), RpsPayoffTable()};
}

const std::vector<double> kBiased = {0.5, 0.25, 0.25};
const std::vector<double> kUniform = {1.0 / 3, 1.0 / 3, 1.0 / 3};
const std::vector<double> kPaper = {0.0, 1.0, 0.0};

TEST(KlTest, ClosedForms) {
  EXPECT_NEAR(KlDivergence(kBiased, kBiased), 0.0, 1e-15);
  EXPECT_NEAR(KlDivergence({1, 0, 0}, kUniform), std::log(3.0), 1e-6);
  EXPECT_THROW(KlDivergence({0.5, 0.5}, kUniform), std::invalid_argument);
}

TEST(KlTest, NonNegativeOnRandomPairs) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 10000; ++i) {
    const std::size_t n = 2 + rng() % 6;
    EXPECT_GE(KlDivergence(RandomSimplex(rng, n), RandomSimplex(rng, n)), 0.0);
  }
}

TEST(KlTest, DistributionSupportsMustAgree) {
  using agents::Distribution;
  const auto a = Distribution::Uniform({game::Action{RpsMove::kRock}, game::Action{RpsMove::kPaper}});
  const auto b =
      Distribution::Uniform({game::Action{RpsMove::kRock}, game::Action{RpsMove::kScissors}});
  EXPECT_THROW(KlDivergence(a, b), std::invalid_argument);
  EXPECT_NEAR(KlDivergence(a, a), 0.0, 1e-15);
}

TEST(IseTest, Values) {
  EXPECT_NEAR(Ise(RpsState(kBiased, kBiased, kPaper)), 0.0, 1e-15);
  const double expected = -(0.5 * std::log(1.5) + 0.5 * std::log(0.75));
  EXPECT_NEAR(Ise(RpsState(kBiased, kUniform, kPaper)), expected, 1e-8);
  EXPECT_NEAR(expected, -0.0589, 1e-4);
}

TEST(SrpTest, Examples) {
  EXPECT_DOUBLE_EQ(Srp(RpsState(kUniform, kBiased, kPaper)), 1.0);
  EXPECT_NEAR(Srp(RpsState(kUniform, kBiased, kUniform)), 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(Srp(RpsState(kUniform, kUniform, kPaper)), 0.5);
  EXPECT_DOUBLE_EQ(Srp(RpsState(kUniform, kBiased, {0, 0, 1})), 0.0);
}

TEST(SrpTest, StaysInUnitInterval) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const double v =
        Srp(RpsState(RandomSimplex(rng, 3), RandomSimplex(rng, 3), RandomSimplex(rng, 3)));
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(LoTest, Examples) {
  EXPECT_DOUBLE_EQ(Lo(RpsState(kBiased, kUniform, kUniform)), 1.25);
  EXPECT_NEAR(Lo(RpsState(kUniform, kUniform, kUniform)), 1.0, 1e-12);
  EXPECT_EQ(ActionValues(RpsPayoffTable(), kBiased), (std::vector<double>{1.0, 1.25, 0.75}));
}

TEST(BoundTest, TightWhenBeliefIsExact) {
  const SignalReport r = SignalBounds(RpsState(kBiased, kBiased, kPaper));
  EXPECT_NEAR(r.bound_lower, 1.25, 1e-6);
  EXPECT_NEAR(r.e_true, 1.25, 1e-12);
  EXPECT_NEAR(r.bound_upper, 1.25, 1e-12);
  EXPECT_DOUBLE_EQ(r.range, 2.0);
  EXPECT_FALSE(r.violation);
}

// Expected utility computed straight from the game rules.
double RpsOracle(const std::vector<double>& self, const std::vector<double>& opp) {
  double e = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      e += self[i] * opp[j] * game::RpsPayoff(game::kAllRpsMoves[i], game::kAllRpsMoves[j]).self;
    }
  }
  return e;
}

TEST(BoundTest, NoViolationsOnRandomRpsStates) {
  std::mt19937_64 rng(2024);
  int violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const SignalState s =
        RpsState(RandomSimplex(rng, 3), RandomSimplex(rng, 3), RandomSimplex(rng, 3));
    const SignalReport r = SignalBounds(s);
    EXPECT_NEAR(r.e_true, RpsOracle(s.pi_self, s.pi_true), 1e-12);
    EXPECT_LE(r.ise, 0.0);
    if (r.violation || r.bound_lower > r.e_true + 1e-9 || r.e_true > r.bound_upper + 1e-9) {
      ++violations;
    }
  }
  EXPECT_EQ(violations, 0);
}

TEST(BoundTest, NoViolationsOnRandomDenseTables) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> value(-5.0, 5.0);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t rows = 1 + rng() % 5;
    const std::size_t cols = 1 + rng() % 5;
    std::vector<double> values(rows * cols);
    for (auto& v : values) v = value(rng);
    const SignalState s{RandomSimplex(rng, cols), RandomSimplex(rng, cols),
                        RandomSimplex(rng, rows), PayoffTable::Dense(rows, cols, values)};
    const SignalReport r = SignalBounds(s);
    EXPECT_FALSE(r.violation) << "instance " << i;
    EXPECT_GE(r.bound_upper, r.e_true - 1e-12);
  }
}

TEST(PayoffTableTest, Bertrand) {
  game::BertrandParams p;
  p.p_max = 20;
  p.cost = 5;
  p.demand_slope = 1;
  const PayoffTable t = BertrandPayoffTable(p);
  EXPECT_EQ(t.rows, 21u);
  EXPECT_EQ(t.cols, 21u);
  for (std::size_t i = 0; i < t.rows; ++i) {
    for (std::size_t j = 0; j < t.cols; ++j) {
      EXPECT_DOUBLE_EQ(t.u(i, j), game::BertrandRoundPayoff(i, j, p).self);
    }
  }
  // Monopoly-like corner at 12.5 -> best integer split is either side.
  EXPECT_DOUBLE_EQ(t.max_value, (20 - 12) * (12 - 5.0));
  EXPECT_DOUBLE_EQ(t.min_value, -100.0);  // price 0 serving all 20 units
  EXPECT_THROW(PayoffTableFor(game::GameSpec::Bargaining({})), UnsupportedGame);
  EXPECT_EQ(PayoffTableFor(game::GameSpec::Rps()).rows, 3u);
}

TEST(NraTest, Formula) {
  EXPECT_DOUBLE_EQ(NormalizedRelativeAdvantage(2, 0), 1.0);
  EXPECT_DOUBLE_EQ(NormalizedRelativeAdvantage(0, 2), -1.0);
  EXPECT_DOUBLE_EQ(NormalizedRelativeAdvantage(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(NormalizedRelativeAdvantage(30000, 10000), 0.5);
  EXPECT_DOUBLE_EQ(Nra({{1, 1}, {1, 1}}), 0.0);
}

TEST(NraTest, RpsMixture) {
  std::vector<std::pair<double, double>> batch;
  for (int i = 0; i < 1727; ++i) batch.emplace_back(2, 0);
  for (int i = 0; i < 3363; ++i) batch.emplace_back(1, 1);
  for (int i = 0; i < 4908; ++i) batch.emplace_back(0, 2);
  ASSERT_EQ(batch.size(), 9998u);
  EXPECT_NEAR(Nra(batch), (1727.0 - 4908.0) / 9998.0, 1e-12);
  EXPECT_NEAR(Nra(batch), -0.3181, 1e-3);
  const WinDrawLose r = WinDrawLoseRates(batch);
  EXPECT_NEAR(r.win + r.draw + r.lose, 1.0, 1e-12);
  EXPECT_NEAR(r.win, 1727.0 / 9998.0, 1e-12);
  EXPECT_NEAR(r.lose, 4908.0 / 9998.0, 1e-12);
}

TEST(WinDrawLoseTest, AllWins) {
  const WinDrawLose r = WinDrawLoseRates({{2, 0}, {2, 0}});
  EXPECT_EQ(r.win, 1.0);
  EXPECT_EQ(r.draw, 0.0);
  EXPECT_EQ(r.lose, 0.0);
}

TEST(NormalizedEarningsTest, Anchors) {
  const game::BertrandParams p;
  EXPECT_DOUBLE_EQ(NormalizedEarnings(p.rounds * 33062.5, p), 0.5);
  EXPECT_DOUBLE_EQ(NormalizedEarnings(p.rounds * 66125.0, p), 1.0);
  EXPECT_DOUBLE_EQ(NormalizedEarnings(0.0, p), 0.0);
}

TEST(NormalizedEarningsTest, CooperatingTitForTatPair) {
  auto a = agents::MakeScriptedAgent("titfortat");
  auto b = agents::MakeScriptedAgent("titfortat");
  const dialogue::Episode e = dialogue::RunEpisode(game::GameSpec::Bertrand({}), *a, *b, 3);
  const dialogue::Conversation c = e.Replay();
  ASSERT_TRUE(c.terminal());
  EXPECT_DOUBLE_EQ(NormalizedEarnings(c, 0), 0.5);
  EXPECT_DOUBLE_EQ(NormalizedEarnings(c, 1), 0.5);
}

TEST(BargainingPowerTest, NashDealIsBalanced) {
  const game::BargainingParams p;
  const game::NashBargain nb = game::BargainingNashSolution(p);
  const game::Proposal deal{nb.units, game::ToCents(nb.unit_price)};
  EXPECT_NEAR(BargainingPower(deal, p, true), 0.5, 0.01);
  EXPECT_NEAR(BargainingPower(deal, p, false), 0.5, 0.01);
}

TEST(BargainingPowerTest, Extremes) {
  const game::BargainingParams p;
  const BargainingPowerCalculator seller(p, true);
  EXPECT_EQ(seller.Power(std::nullopt), 0.0);
  EXPECT_EQ(seller.Power(game::Proposal{10, 3000}), 0.0);  // seller loses money
  EXPECT_EQ(seller.Power(game::Proposal{1, 25000}), 1.0);  // buyer gets nothing
  // Seller takes nearly all surplus: the last frontier point with a positive buyer.
  const auto& f = seller.frontier();
  ASSERT_FALSE(f.empty());
  auto near_edge = f.rbegin();
  while (near_edge->second <= 0.0) ++near_edge;
  EXPECT_GE(seller.PowerFromUtilities(near_edge->first, near_edge->second), 0.95);
  EXPECT_LE(seller.PowerFromUtilities(1e-3, 500.0), 0.05);
}

TEST(BargainingPowerTest, FrontierIsPareto) {
  const BargainingPowerCalculator calc(game::BargainingParams{}, false);
  const auto& f = calc.frontier();
  for (std::size_t i = 1; i < f.size(); ++i) {
    EXPECT_GT(f[i].first, f[i - 1].first);
    EXPECT_LT(f[i].second, f[i - 1].second);
  }
}

TEST(ScheduleTest, OneReportPerTrainedGameAction) {
  agents::TemplatePolicy trained(game::GameKind::kRps);
  auto rps_opp = agents::MakeScriptedAgent("biased_rps:0.5,0.25,0.25");
  const auto rps = dialogue::RunEpisode(game::GameSpec::Rps(), *rps_opp, trained, 5);
  const auto rps_signals = SignalSchedule(rps, 1, trained, *rps_opp);
  ASSERT_EQ(rps_signals.size(), 1u);
  const ScheduledSignal& s = rps_signals[0];
  // The scripted opponent reports its true mixture.
  EXPECT_NEAR(s.pi_true.probs[0], 0.5, 1e-12);
  EXPECT_LE(s.report.ise, 0.0);
  EXPECT_FALSE(s.report.violation);

  agents::TemplatePolicy firm(game::GameKind::kBertrand);
  auto tft = agents::MakeScriptedAgent("titfortat");
  game::BertrandParams small;
  small.p_max = 40;
  small.cost = 10;
  small.demand_slope = 1;
  const auto bertrand = dialogue::RunEpisode(game::GameSpec::Bertrand(small), *tft, firm, 6);
  const auto reports = SignalSchedule(bertrand, 1, firm, *tft);
  EXPECT_EQ(reports.size(), 5u);
  for (const auto& r : reports) {
    EXPECT_EQ(r.pi_true.size(), 41u);
    EXPECT_FALSE(r.report.violation);
  }

  agents::TemplatePolicy trader(game::GameKind::kBargaining);
  auto seller = agents::MakeScriptedAgent("concession:0.3");
  const auto deal = dialogue::RunEpisode(game::GameSpec::Bargaining({}), *seller, trader, 7);
  EXPECT_THROW(SignalSchedule(deal, 1, trader, *seller), UnsupportedGame);
}

TEST(ScheduleTest, JsonRoundTripReproducesReport) {
  agents::TemplatePolicy trained(game::GameKind::kRps);
  auto opp = agents::MakeScriptedAgent("biased_rps:0.2,0.3,0.5");
  const auto spec = game::GameSpec::Rps();
  const auto e = dialogue::RunEpisode(spec, *opp, trained, 8);
  const auto signals = SignalSchedule(e, 1, trained, *opp);
  ASSERT_FALSE(signals.empty());
  const ScheduledSignal back = ScheduledSignalFromJson(ScheduledSignalToJson(signals[0]), spec);
  EXPECT_EQ(back.turn_index, signals[0].turn_index);
  EXPECT_NEAR(back.report.ise, signals[0].report.ise, 1e-12);
  EXPECT_NEAR(back.report.srp, signals[0].report.srp, 1e-12);
  EXPECT_NEAR(back.report.lo, signals[0].report.lo, 1e-12);
  EXPECT_NEAR(back.report.bound_lower, signals[0].report.bound_lower, 1e-12);
  const SignalReport again =
      ReportFromDistributions(spec, back.pi_true, back.pi_belief, back.pi_self);
  EXPECT_NEAR(again.e_true, signals[0].report.e_true, 1e-12);
}

}  // namespace
}  // namespace talkgames::signals
