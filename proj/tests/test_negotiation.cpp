// Copyright 2026 The coopdrive Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "coopdrive/negotiation.hpp"
#include "coopdrive/planner.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <deque>
#include <random>

using namespace coopdrive;
using coopdrive::testing::line_plan;
using coopdrive::testing::vehicle_on;

namespace
{

NegotiationMessage msg(int sender, std::optional<SpeedIntent> action,
                       std::map<AgentId, SpeedIntent> requests = {})
{
  NegotiationMessage m;
  m.sender = agent(sender);
  m.proposed_action = action;
  m.requests = std::move(requests);
  return m;
}

class ScriptedClient : public EndpointClient
{
public:
  explicit ScriptedClient(std::deque<std::string> replies) : replies_(std::move(replies)) {}
  std::string complete(const std::string &) override
  {
    if (replies_.empty()) {
      throw EndpointError("timed out");
    }
    auto r = replies_.front();
    replies_.pop_front();
    return r;
  }

private:
  std::deque<std::string> replies_;
};

/// Vehicles driving straight at the origin from different directions.
struct Crossing
{
  struct Approach
  {
    AgentId id;
    Maneuver maneuver;
    double heading;   // direction of travel
    double distance;  // to the origin
    double speed;
  };

  std::vector<Approach> approaches;

  GroupView view(const GroupingConfig & gcfg = {0.5, 8.0, 8.0, 50}) const
  {
    GroupView g;
    std::map<AgentId, WaypointPlan> nominal;
    for (const auto & a : approaches) {
      MemberInfo m;
      m.id = a.id;
      m.position = start(a);
      m.speed = a.speed;
      m.maneuver = a.maneuver;
      m.intention = {SpeedIntent::KEEP, a.maneuver == Maneuver::MERGE
                                           ? NavIntent::FOLLOW_LANE
                                           : NavIntent::GO_STRAIGHT_AT_INTERSECTION};
      g.members.push_back(m);
      nominal[a.id] = plan(a, SpeedIntent::KEEP, 40);
    }
    std::vector<AgentId> ids;
    for (const auto & m : g.members) {
      ids.push_back(m.id);
    }
    g.conflicts = conflict_edges(ids, nominal, gcfg);
    const auto self = *this;
    g.plan = [self](AgentId id, SpeedIntent s) {
      for (const auto & a : self.approaches) {
        if (a.id == id) {
          return plan(a, s, 40);
        }
      }
      throw SimulationError("unknown member");
    };
    return g;
  }

  static Vec2 start(const Approach & a) { return unit_from_heading(a.heading) * -a.distance; }

  static WaypointPlan plan(const Approach & a, SpeedIntent s, int n)
  {
    const Vec2 from = start(a);
    const auto route =
      std::make_shared<const Route>(std::vector<Vec2>{from, from + unit_from_heading(a.heading) * 300.0},
                                    3.5, a.maneuver == Maneuver::MERGE ? Maneuver::MERGE : Maneuver::STRAIGHT);
    PlannerConfig cfg;
    cfg.num_waypoints = n;
    const Intention intent{s, Intention{}.nav};
    return generate_plan(vehicle_on(a.id, route, 0.0, a.speed), intent, *route,
                         {std::max(a.distance, 0.0), 0.0}, cfg);
  }
};

NegotiationStack rule_stack(const GroupView & g)
{
  NegotiationStack stack;
  for (const auto & m : g.members) {
    stack.negotiators[m.id] = std::make_shared<RuleBasedNegotiator>();
  }
  return stack;
}

}  // namespace

TEST(Judge, DeductionExamples)
{
  EXPECT_EQ(rule_consensus_score({msg(0, SpeedIntent::SLOWER, {{agent(1), SpeedIntent::FASTER}}),
                                  msg(1, SpeedIntent::FASTER, {{agent(0), SpeedIntent::SLOWER}})}),
            100.0);
  EXPECT_EQ(rule_consensus_score({msg(0, SpeedIntent::SLOWER, {{agent(1), SpeedIntent::FASTER}}),
                                  msg(1, SpeedIntent::KEEP)}),
            60.0);
  EXPECT_EQ(rule_consensus_score({msg(0, SpeedIntent::FASTER, {{agent(1), SpeedIntent::STOP}}),
                                  msg(1, SpeedIntent::FASTER, {{agent(0), SpeedIntent::STOP}})}),
            20.0);
  // Dual yield: both stop and wave the other through.
  EXPECT_EQ(rule_consensus_score({msg(0, SpeedIntent::STOP, {{agent(1), SpeedIntent::STOP}}),
                                  msg(1, SpeedIntent::STOP, {{agent(0), SpeedIntent::FASTER}})}),
            60.0);
  EXPECT_EQ(rule_consensus_score({msg(0, SpeedIntent::STOP, {{agent(1), SpeedIntent::FASTER}}),
                                  msg(1, SpeedIntent::STOP, {{agent(0), SpeedIntent::FASTER}})}),
            0.0);
}

TEST(Judge, LlmJudgeParsesOrFallsBack)
{
  const std::vector<NegotiationMessage> m{msg(0, SpeedIntent::KEEP), msg(1, SpeedIntent::KEEP)};
  LlmConsensusJudge good(std::make_shared<ScriptedClient>(
    std::deque<std::string>{"Short analysis: fine.\nConsensus score: 72"}));
  const auto r = good.judge(m);
  EXPECT_EQ(r.score, 72.0);
  EXPECT_FALSE(r.fallback);
  LlmConsensusJudge bad(std::make_shared<ScriptedClient>(std::deque<std::string>{}));
  const auto f = bad.judge(m);
  EXPECT_EQ(f.score, 100.0);
  EXPECT_TRUE(f.fallback);
}

TEST(SumActions, StructuredSummarisedAndDefault)
{
  std::vector<std::string> flags;
  EXPECT_EQ(sum_actions({msg(4, SpeedIntent::STOP)}, nullptr, &flags),
            (std::map<AgentId, SpeedIntent>{{agent(4), SpeedIntent::STOP}}));
  EXPECT_TRUE(flags.empty());

  LlmActionSummarizer summ(std::make_shared<ScriptedClient>(
    std::deque<std::string>{R"({"0": {"speed": "SLOWER"}})"}));
  auto free_text = msg(0, std::nullopt);
  free_text.text = "I shall ease off.";
  const auto s = sum_actions({free_text, msg(1, SpeedIntent::FASTER)}, &summ, &flags);
  EXPECT_EQ(s.at(agent(0)), SpeedIntent::SLOWER);
  EXPECT_EQ(s.at(agent(1)), SpeedIntent::FASTER);
  EXPECT_TRUE(flags.empty());

  LlmActionSummarizer broken(
    std::make_shared<ScriptedClient>(std::deque<std::string>{"not json at all"}));
  const auto d = sum_actions({free_text}, &broken, &flags);
  EXPECT_EQ(d.at(agent(0)), SpeedIntent::KEEP);
  EXPECT_EQ(flags.size(), 2u);
}

TEST(Scores, SafetyAndEfficiencyExamples)
{
  const NegotiationConfig cfg;
  const auto far = safety_efficiency_scores(
    {{agent(0), line_plan({0.0, 0.0}, {5.0, 0.0})}, {agent(1), line_plan({0.0, 4.0}, {5.0, 0.0})}},
    cfg);
  EXPECT_EQ(far.safety, 100.0);
  EXPECT_NEAR(far.efficiency, 50.0, 1e-9);

  const auto hit = safety_efficiency_scores(
    {{agent(0), line_plan({-10.0, 0.0}, {5.0, 0.0})}, {agent(1), line_plan({0.0, -10.0}, {0.0, 5.0})}},
    cfg);
  EXPECT_NEAR(hit.safety, 0.0, 1e-9);
  EXPECT_EQ(hit.closest_pair, std::make_pair(agent(0), agent(1)));

  const auto single = safety_efficiency_scores({{agent(0), line_plan({0.0, 0.0}, {20.0, 0.0})}}, cfg);
  EXPECT_EQ(single.safety, 100.0);
  EXPECT_EQ(single.efficiency, 100.0);

  EXPECT_THROW(safety_efficiency_scores({}, cfg), SimulationError);
  auto shifted = line_plan({0.0, 0.0}, {5.0, 0.0});
  shifted.start_tick = 1;
  EXPECT_THROW(
    safety_efficiency_scores({{agent(0), line_plan({0.0, 0.0}, {5.0, 0.0})}, {agent(1), shifted}}, cfg),
    SimulationError);
}

TEST(Scores, PlanMeanSpeed)
{
  EXPECT_NEAR(mean_plan_speed(line_plan({0.0, 0.0}, {3.0, 4.0})), 5.0, 1e-12);
  auto p = line_plan({0.0, 0.0}, {3.0, 4.0});
  p.mean_speed = 2.0;
  EXPECT_EQ(mean_plan_speed(p), 2.0);
}

TEST(Critic, ThresholdExamples)
{
  const NegotiationConfig cfg;
  const auto ok = criticize({100.0, 100.0, 100.0}, cfg);
  EXPECT_TRUE(ok.converged);
  EXPECT_TRUE(ok.criticisms.empty());

  const auto unsafe = criticize({100.0, 30.0, 90.0}, cfg);
  EXPECT_FALSE(unsafe.converged);
  ASSERT_EQ(unsafe.criticisms.size(), 1u);
  EXPECT_EQ(unsafe.criticisms[0].tag, Deficiency::SAFETY_LOW);
  EXPECT_TRUE(unsafe.criticisms[0].hints.empty());

  EXPECT_TRUE(criticize({80.0, 70.0, 40.0}, cfg).converged);
  EXPECT_EQ(criticize({10.0, 10.0, 10.0}, cfg).criticisms.size(), 3u);
}

TEST(Critic, HintsEarlierCriticismWins)
{
  CriticFeedback fb;
  fb.criticisms.push_back({Deficiency::SAFETY_LOW, {{agent(1), SpeedIntent::STOP}}, ""});
  fb.criticisms.push_back({Deficiency::EFFICIENCY_LOW,
                           {{agent(1), SpeedIntent::FASTER}, {agent(2), SpeedIntent::FASTER}}, ""});
  EXPECT_EQ(fb.hints(), (std::map<AgentId, SpeedIntent>{{agent(1), SpeedIntent::STOP},
                                                        {agent(2), SpeedIntent::FASTER}}));
}

TEST(Critic, SafetyHintTargetsLowerPriority)
{
  const Crossing x{{{agent(0), Maneuver::STRAIGHT, 0.0, 10.0, 5.0},
                    {agent(1), Maneuver::MERGE, std::numbers::pi / 2.0, 10.0, 5.0}}};
  auto g = x.view();
  g.plan = nullptr;
  const std::map<AgentId, SpeedIntent> summary{{agent(0), SpeedIntent::KEEP},
                                               {agent(1), SpeedIntent::KEEP}};
  CriticContext ctx;
  ctx.group = &g;
  ctx.summary = &summary;
  ctx.closest_pair = std::make_pair(agent(0), agent(1));
  const auto fb = criticize({100.0, 10.0, 50.0}, {}, &ctx);
  ASSERT_EQ(fb.criticisms.size(), 1u);
  EXPECT_EQ(fb.criticisms[0].hints,
            (std::map<AgentId, SpeedIntent>{{agent(1), SpeedIntent::SLOWER}}));
}

TEST(RunRound, OrderAndRoundTags)
{
  const Crossing x{{{agent(5), Maneuver::STRAIGHT, 0.0, 10.0, 5.0},
                    {agent(2), Maneuver::MERGE, std::numbers::pi / 2.0, 10.0, 5.0},
                    {agent(7), Maneuver::LEFT_TURN, std::numbers::pi, 10.0, 5.0}}};
  const auto g = x.view();
  NegotiationStack stack;
  for (const auto & m : g.members) {
    stack.negotiators[m.id] =
      std::make_shared<FixedNegotiator>(SpeedIntent::FASTER, std::map<AgentId, SpeedIntent>{
                                                               {agent(2), SpeedIntent::STOP},
                                                               {agent(5), SpeedIntent::STOP}});
  }
  NegotiationTranscript t;
  const auto first = run_round(g, t, stack.negotiators);
  ASSERT_EQ(first.size(), 3u);
  EXPECT_EQ(first[0].sender, agent(2));
  EXPECT_EQ(first[1].sender, agent(5));
  EXPECT_EQ(first[2].sender, agent(7));

  NegotiationConfig cfg;
  cfg.max_rounds = 2;
  const auto tr = negotiate(g, stack, cfg);
  const auto all = tr.all_messages();
  ASSERT_EQ(all.size(), 6u);
  for (std::size_t i = 0; i < all.size(); ++i) {
    EXPECT_EQ(all[i].round, static_cast<int>(i / 3));
  }
}

TEST(RunRound, ThrowingNegotiatorGetsFlaggedKeep)
{
  class Broken : public Negotiator
  {
  public:
    NegotiationMessage negotiate(const NegotiatorInput &) override
    {
      throw NegotiatorError("boom");
    }
  };
  const Crossing x{{{agent(0), Maneuver::STRAIGHT, 0.0, 10.0, 5.0},
                    {agent(1), Maneuver::MERGE, std::numbers::pi / 2.0, 10.0, 5.0}}};
  const auto g = x.view();
  auto stack = rule_stack(g);
  stack.negotiators[agent(1)] = std::make_shared<Broken>();
  const auto msgs = run_round(g, {}, stack.negotiators);
  EXPECT_TRUE(msgs[1].fallback);
  EXPECT_EQ(msgs[1].proposed_action, SpeedIntent::KEEP);
  EXPECT_EQ(msgs[1].note, "boom");
  stack.negotiators.erase(agent(0));
  EXPECT_THROW(run_round(g, {}, stack.negotiators), std::invalid_argument);
}

TEST(Negotiate, MergerYieldsToStraight)
{
  const Crossing x{{{agent(0), Maneuver::STRAIGHT, 0.0, 10.0, 5.0},
                    {agent(1), Maneuver::MERGE, std::numbers::pi / 2.0, 10.0, 5.0}}};
  const auto g = x.view();
  ASSERT_EQ(g.conflicts.size(), 1u);
  const auto t = negotiate(g, rule_stack(g), {});
  EXPECT_EQ(t.outcome, NegotiationOutcome::CONSENSUS);
  EXPECT_LE(t.rounds.size(), 3u);
  EXPECT_TRUE(t.rounds.back().feedback.converged);
  EXPECT_LE(t.final_intentions.at(agent(1)).speed, SpeedIntent::SLOWER);
  EXPECT_GE(t.final_intentions.at(agent(0)).speed, SpeedIntent::KEEP);
}

TEST(Negotiate, StubbornNegotiatorsHitRoundLimit)
{
  const Crossing x{{{agent(0), Maneuver::STRAIGHT, 0.0, 10.0, 5.0},
                    {agent(1), Maneuver::MERGE, std::numbers::pi / 2.0, 10.0, 5.0}}};
  const auto g = x.view();
  NegotiationStack stack;
  stack.negotiators[agent(0)] = std::make_shared<FixedNegotiator>(
    SpeedIntent::FASTER, std::map<AgentId, SpeedIntent>{{agent(1), SpeedIntent::STOP}});
  stack.negotiators[agent(1)] = std::make_shared<FixedNegotiator>(
    SpeedIntent::FASTER, std::map<AgentId, SpeedIntent>{{agent(0), SpeedIntent::STOP}});
  const auto t = negotiate(g, stack, {});
  EXPECT_EQ(t.outcome, NegotiationOutcome::ROUND_LIMIT);
  EXPECT_EQ(t.rounds.size(), 3u);
  EXPECT_FALSE(t.rounds.back().feedback.converged);
  EXPECT_EQ(t.final_intentions.size(), 2u);
}

TEST(Negotiate, CompatibleProposalsAgreeInOneRound)
{
  const Crossing x{{{agent(0), Maneuver::STRAIGHT, 0.0, 30.0, 5.0},
                    {agent(1), Maneuver::STRAIGHT, 0.0, 60.0, 5.0}}};
  auto g = x.view();
  NegotiationStack stack;
  stack.negotiators[agent(0)] = std::make_shared<FixedNegotiator>(SpeedIntent::KEEP, std::map<AgentId, SpeedIntent>{});
  stack.negotiators[agent(1)] = std::make_shared<FixedNegotiator>(SpeedIntent::KEEP, std::map<AgentId, SpeedIntent>{});
  const auto t = negotiate(g, stack, {});
  EXPECT_EQ(t.outcome, NegotiationOutcome::CONSENSUS);
  ASSERT_EQ(t.rounds.size(), 1u);
  EXPECT_EQ(t.rounds[0].scores.consensus, 100.0);
}

TEST(Negotiate, PlannerFailureAbortsWithStop)
{
  const Crossing x{{{agent(0), Maneuver::STRAIGHT, 0.0, 10.0, 5.0},
                    {agent(1), Maneuver::MERGE, std::numbers::pi / 2.0, 10.0, 5.0}}};
  auto g = x.view();
  g.plan = [](AgentId, SpeedIntent) -> WaypointPlan { throw SimulationError("no route"); };
  const auto t = negotiate(g, rule_stack(g), {});
  EXPECT_EQ(t.outcome, NegotiationOutcome::ABORTED);
  EXPECT_EQ(t.abort_reason, "no route");
  for (const auto & [id, intent] : t.final_intentions) {
    EXPECT_EQ(intent.speed, SpeedIntent::STOP);
  }
  EXPECT_EQ(t.final_intentions.size(), 2u);
}

TEST(Negotiate, RejectsSingletonsAndBadConfig)
{
  const Crossing x{{{agent(0), Maneuver::STRAIGHT, 0.0, 10.0, 5.0}}};
  const auto g = x.view();
  EXPECT_THROW(negotiate(g, rule_stack(g), {}), std::invalid_argument);
  NegotiationConfig bad;
  bad.max_rounds = 0;
  EXPECT_ANY_THROW(bad.validate());
}

TEST(Negotiate, RuleNegotiationPropertiesOnRandomCrossings)
{
  const Maneuver kinds[] = {Maneuver::STRAIGHT, Maneuver::MERGE, Maneuver::STRAIGHT,
                            Maneuver::MERGE};
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> dist(6.0, 30.0);
  std::uniform_real_distribution<double> speed(2.0, 9.0);
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  const NegotiationConfig cfg;
  int negotiations = 0;
  int consensus = 0;
  for (int trial = 0; trial < 300; ++trial) {
    Crossing x;
    const int n = 2 + trial % 3;
    for (int i = 0; i < n; ++i) {
      x.approaches.push_back({agent(i), kinds[(trial + i) % 4],
                              i * std::numbers::pi / 2.0 + jitter(rng), dist(rng), speed(rng)});
    }
    const auto g = x.view();
    if (g.conflicts.empty()) {
      continue;
    }
    ++negotiations;
    const auto a = negotiate(g, rule_stack(g), cfg);
    const auto b = negotiate(g, rule_stack(g), cfg);
    ASSERT_EQ(to_json(a), to_json(b)) << "trial " << trial;
    ASSERT_LE(a.rounds.size(), static_cast<std::size_t>(cfg.max_rounds));
    ASSERT_EQ(a.final_intentions.size(), static_cast<std::size_t>(n));
    double last = -1.0;
    for (const auto & r : a.rounds) {
      for (double v : {r.scores.consensus, r.scores.safety, r.scores.efficiency}) {
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, 100.0);
      }
      ASSERT_GE(r.scores.min(), last) << "trial " << trial;
      last = r.scores.min();
    }
    consensus += a.outcome == NegotiationOutcome::CONSENSUS ? 1 : 0;
    if (a.outcome == NegotiationOutcome::CONSENSUS) {
      ASSERT_TRUE(a.rounds.back().feedback.converged);
    }
  }
  EXPECT_GT(negotiations, 100);
  RecordProperty("consensus", consensus);
  RecordProperty("negotiations", negotiations);
}
