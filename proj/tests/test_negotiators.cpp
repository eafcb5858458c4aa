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

#include "coopdrive/negotiators.hpp"

#include <gtest/gtest.h>

#include <deque>
#include <random>

using namespace coopdrive;

namespace
{

MemberInfo member(int id, Maneuver m, double speed = 5.0)
{
  MemberInfo info;
  info.id = agent(id);
  info.speed = speed;
  info.maneuver = m;
  return info;
}

/// Ego 0 merging, peer 1 going straight, conflict in `fct` seconds.
NegotiatorInput merge_vs_straight(double fct)
{
  NegotiatorInput in;
  in.ego_id = agent(0);
  in.ego_speed = 5.0;
  in.ego_maneuver = Maneuver::MERGE;
  in.peers = {member(1, Maneuver::STRAIGHT)};
  in.conflicts = {{{agent(0), agent(1)}, 0.8, fct}};
  return in;
}

class ScriptedClient : public EndpointClient
{
public:
  explicit ScriptedClient(std::deque<std::string> replies) : replies_(std::move(replies)) {}
  std::string complete(const std::string & prompt) override
  {
    prompts.push_back(prompt);
    if (replies_.empty()) {
      throw EndpointError("timed out");
    }
    auto r = replies_.front();
    replies_.pop_front();
    return r;
  }
  std::vector<std::string> prompts;

private:
  std::deque<std::string> replies_;
};

}  // namespace

TEST(RuleNegotiator, MergerYieldsAndRequestsFaster)
{
  const auto msg = rule_based_negotiate(merge_vs_straight(3.0));
  EXPECT_EQ(msg.sender, agent(0));
  EXPECT_EQ(msg.proposed_action, SpeedIntent::SLOWER);
  EXPECT_EQ(msg.requests, (std::map<AgentId, SpeedIntent>{{agent(1), SpeedIntent::FASTER}}));
  EXPECT_EQ(msg.text, "I will slow down; vehicle 1 go faster.");
}

TEST(RuleNegotiator, ImminentConflictStops)
{
  const auto msg = rule_based_negotiate(merge_vs_straight(1.0));
  EXPECT_EQ(msg.proposed_action, SpeedIntent::STOP);
}

TEST(RuleNegotiator, StraightSideProceeds)
{
  auto in = merge_vs_straight(3.0);
  in.ego_id = agent(1);
  in.ego_maneuver = Maneuver::STRAIGHT;
  in.peers = {member(0, Maneuver::MERGE)};
  const auto msg = rule_based_negotiate(in);
  EXPECT_EQ(msg.proposed_action, SpeedIntent::FASTER);
  EXPECT_EQ(msg.requests.at(agent(0)), SpeedIntent::SLOWER);
}

TEST(RuleNegotiator, NoConflictKeeps)
{
  auto in = merge_vs_straight(3.0);
  in.conflicts.clear();
  const auto msg = rule_based_negotiate(in);
  EXPECT_EQ(msg.proposed_action, SpeedIntent::KEEP);
  EXPECT_TRUE(msg.requests.empty());
  EXPECT_EQ(msg.text, "I will keep speed.");
}

TEST(RuleNegotiator, SuggestionTakesPrecedence)
{
  auto in = merge_vs_straight(3.0);
  in.ego_id = agent(1);
  in.ego_maneuver = Maneuver::STRAIGHT;
  in.peers = {member(0, Maneuver::MERGE)};
  CriticFeedback fb;
  fb.criticisms.push_back({Deficiency::SAFETY_LOW, {{agent(1), SpeedIntent::STOP}}, "too close"});
  in.suggestion = fb;
  EXPECT_EQ(rule_based_negotiate(in).proposed_action, SpeedIntent::STOP);
}

TEST(RuleNegotiator, EgoAmongPeersRejected)
{
  auto in = merge_vs_straight(3.0);
  in.peers.push_back(member(0, Maneuver::STRAIGHT));
  EXPECT_THROW(rule_based_negotiate(in), NegotiatorError);
}

TEST(RuleNegotiator, PureAndNeverMutuallyYielding)
{
  const Maneuver all[] = {Maneuver::STRAIGHT, Maneuver::RIGHT_TURN, Maneuver::LEFT_TURN,
                          Maneuver::MERGE, Maneuver::LANE_CHANGE};
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> pick(0, 4);
  std::uniform_real_distribution<double> t(0.2, 6.0);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + trial % 4;
    std::vector<MemberInfo> members;
    for (int i = 0; i < n; ++i) {
      members.push_back(member(i, all[pick(rng)]));
    }
    std::vector<ConflictEdge> edges;
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        if (pick(rng) < 3) {
          edges.push_back({{agent(a), agent(b)}, 0.7, t(rng)});
        }
      }
    }
    std::map<AgentId, SpeedIntent> action;
    for (const auto & ego : members) {
      NegotiatorInput in;
      in.ego_id = ego.id;
      in.ego_maneuver = ego.maneuver;
      for (const auto & p : members) {
        if (p.id != ego.id) {
          in.peers.push_back(p);
        }
      }
      in.conflicts = edges;
      const auto m1 = rule_based_negotiate(in);
      const auto m2 = rule_based_negotiate(in);
      ASSERT_EQ(m1.text, m2.text);
      ASSERT_EQ(m1.requests, m2.requests);
      action[ego.id] = *m1.proposed_action;
    }
    for (const auto & e : edges) {
      const auto & a = members[to_int(e.pair.first)];
      const auto & b = members[to_int(e.pair.second)];
      const bool a_first = has_priority(a.maneuver, a.id, b.maneuver, b.id);
      const auto loser = a_first ? b.id : a.id;
      const auto winner = a_first ? a.id : b.id;
      ASSERT_LE(action[loser], SpeedIntent::SLOWER);
      // The winner yields only if it yields to some third vehicle.
      if (action[winner] <= SpeedIntent::SLOWER) {
        bool yields_elsewhere = false;
        for (const auto & f : edges) {
          if (f.pair.first != winner && f.pair.second != winner) {
            continue;
          }
          const auto other = f.pair.first == winner ? f.pair.second : f.pair.first;
          const auto & o = members[to_int(other)];
          const auto & w = members[to_int(winner)];
          yields_elsewhere |= has_priority(o.maneuver, o.id, w.maneuver, w.id);
        }
        ASSERT_TRUE(yields_elsewhere);
      }
    }
  }
}

TEST(FixedNegotiator, IgnoresInput)
{
  FixedNegotiator fixed(SpeedIntent::FASTER, {{agent(1), SpeedIntent::STOP}});
  const auto msg = fixed.negotiate(merge_vs_straight(1.0));
  EXPECT_EQ(msg.proposed_action, SpeedIntent::FASTER);
  EXPECT_EQ(msg.text, "I will go faster; vehicle 1 stop.");
}

TEST(ReplyParser, EgoAndPeerClauses)
{
  const auto m = parse_negotiation_reply(agent(1), "I will stop; vehicle 2 go faster.");
  EXPECT_EQ(m.proposed_action, SpeedIntent::STOP);
  EXPECT_EQ(m.requests, (std::map<AgentId, SpeedIntent>{{agent(2), SpeedIntent::FASTER}}));
  EXPECT_EQ(m.text, "I will stop; vehicle 2 go faster.");

  const auto n = parse_negotiation_reply(agent(0), "Vehicle 3 please slow down. I'll keep my speed");
  EXPECT_EQ(n.proposed_action, SpeedIntent::KEEP);
  EXPECT_EQ(n.requests.at(agent(3)), SpeedIntent::SLOWER);
}

TEST(ReplyParser, UnrecognisedReplyThrows)
{
  EXPECT_THROW(parse_negotiation_reply(agent(0), "Nice weather today."), NegotiatorError);
  EXPECT_THROW(parse_negotiation_reply(agent(0), ""), NegotiatorError);
}

TEST(SummaryParser, NestedSpeedObjects)
{
  const auto m = parse_action_summary(R"({"0": {"speed": "STOP"}, "1": {"speed": "SLOWER"}})");
  EXPECT_EQ(m, (std::map<AgentId, SpeedIntent>{{agent(0), SpeedIntent::STOP},
                                               {agent(1), SpeedIntent::SLOWER}}));
  EXPECT_TRUE(parse_action_summary("{}").empty());
  const auto quoted = parse_action_summary("Result: {'2': {'speed': 'FASTER'}}");
  EXPECT_EQ(quoted.at(agent(2)), SpeedIntent::FASTER);
}

TEST(SummaryParser, RejectsMalformed)
{
  EXPECT_THROW(parse_action_summary(R"({"0": {"speed": "FLY"}})"), NegotiatorError);
  EXPECT_THROW(parse_action_summary("no json here"), NegotiatorError);
  EXPECT_THROW(parse_action_summary(R"({"zero": {"speed": "STOP"}})"), NegotiatorError);
  EXPECT_THROW(parse_action_summary(R"({"0": "STOP"})"), NegotiatorError);
}

TEST(ConsensusParser, ReadsScoreLine)
{
  EXPECT_EQ(parse_consensus_score("Short analysis: agreed.\nConsensus score: 85"), 85.0);
  EXPECT_EQ(parse_consensus_score("consensus score: **120**"), 100.0);
  EXPECT_THROW(parse_consensus_score("They agree."), NegotiatorError);
}

TEST(LlmNegotiator, ParsesReplyAndDropsOutsiders)
{
  auto in = merge_vs_straight(3.0);
  in.peers.push_back(member(2, Maneuver::STRAIGHT));
  ScriptedClient client({"I will stop; vehicle 2 go faster, vehicle 9 stop."});
  const auto msg = llm_negotiate(in, client);
  EXPECT_EQ(msg.proposed_action, SpeedIntent::STOP);
  EXPECT_EQ(msg.requests, (std::map<AgentId, SpeedIntent>{{agent(2), SpeedIntent::FASTER}}));
  ASSERT_EQ(client.prompts.size(), 1u);
  EXPECT_EQ(client.prompts[0], build_prompt(in, PromptKind::NEGOTIATE));
}

TEST(LlmNegotiator, FailuresSurfaceAsNegotiatorError)
{
  ScriptedClient silent({});
  EXPECT_THROW(llm_negotiate(merge_vs_straight(3.0), silent), NegotiatorError);
  ScriptedClient babbling({"Lovely day."});
  EXPECT_THROW(llm_negotiate(merge_vs_straight(3.0), babbling), NegotiatorError);
}

TEST(FallbackNegotiator, SubstitutesRuleTableAndFlags)
{
  auto client = std::make_shared<ScriptedClient>(std::deque<std::string>{"Lovely day."});
  FallbackNegotiator neg(std::make_shared<LlmNegotiator>(client));
  const auto msg = neg.negotiate(merge_vs_straight(3.0));
  EXPECT_TRUE(msg.fallback);
  EXPECT_FALSE(msg.note.empty());
  EXPECT_EQ(msg.proposed_action, SpeedIntent::SLOWER);

  auto ok = std::make_shared<ScriptedClient>(std::deque<std::string>{"I will keep speed."});
  FallbackNegotiator good(std::make_shared<LlmNegotiator>(ok));
  const auto m2 = good.negotiate(merge_vs_straight(3.0));
  EXPECT_FALSE(m2.fallback);
  EXPECT_EQ(m2.proposed_action, SpeedIntent::KEEP);
}
