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

#ifndef COOPDRIVE__NEGOTIATION_HPP_
#define COOPDRIVE__NEGOTIATION_HPP_

#include "coopdrive/endpoint.hpp"
#include "coopdrive/negotiation_types.hpp"
#include "coopdrive/negotiators.hpp"
#include "coopdrive/waypoint_plan.hpp"

#include <json.hpp>

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace coopdrive
{

struct NegotiationConfig
{
  double consensus_threshold = 80.0;  // T_c
  double safety_threshold = 70.0;     // T_s
  double efficiency_threshold = 40.0; // T_e
  int max_rounds = 3;
  double d_safe = 4.0;  // metres
  double v_ref = 10.0;  // m/s, scenario speed limit

  void validate() const;
};

enum class NegotiationOutcome { CONSENSUS, ROUND_LIMIT, ABORTED };

std::string_view to_string(NegotiationOutcome o);

struct RoundRecord
{
  std::vector<NegotiationMessage> messages;
  std::map<AgentId, SpeedIntent> action_summary;
  ScoreTriple scores;
  CriticFeedback feedback;
  std::vector<std::string> flags;  // fallbacks taken while summarising or judging
};

struct NegotiationTranscript
{
  std::vector<AgentId> group;
  std::vector<RoundRecord> rounds;
  std::map<AgentId, Intention> final_intentions;
  NegotiationOutcome outcome = NegotiationOutcome::ROUND_LIMIT;
  std::string abort_reason;

  /// All messages of all rounds in speaking order.
  std::vector<NegotiationMessage> all_messages() const;
};

nlohmann::json to_json(const NegotiationTranscript & t);

/// What the orchestrator knows about a group.
struct GroupView
{
  std::vector<MemberInfo> members;       // ascending id
  std::vector<ConflictEdge> conflicts;   // edges among members
  /// Plans one member under a speed intent. May throw; a throw aborts the
  /// negotiation.
  std::function<WaypointPlan(AgentId, SpeedIntent)> plan;
};

// ---------------------------------------------------------------------------
// Summariser and judge

/// Converts free-text messages into speed intents. Throws NegotiatorError.
class ActionSummarizer
{
public:
  virtual ~ActionSummarizer() = default;
  virtual std::map<AgentId, SpeedIntent> summarize(const std::vector<NegotiationMessage> & m) = 0;
};

class LlmActionSummarizer : public ActionSummarizer
{
public:
  explicit LlmActionSummarizer(std::shared_ptr<EndpointClient> client) : client_(std::move(client))
  {
  }
  std::map<AgentId, SpeedIntent> summarize(const std::vector<NegotiationMessage> & m) override;

private:
  std::shared_ptr<EndpointClient> client_;
};

struct JudgeResult
{
  double score = 0.0;
  bool fallback = false;
  std::string note;
};

class ConsensusJudge
{
public:
  virtual ~ConsensusJudge() = default;
  virtual JudgeResult judge(const std::vector<NegotiationMessage> & messages) = 0;
};

/// Deduction judge: 100, minus 40 per unresolved request, minus 30 per
/// mutual-yield pair, clamped.
double rule_consensus_score(const std::vector<NegotiationMessage> & messages);

class RuleConsensusJudge : public ConsensusJudge
{
public:
  JudgeResult judge(const std::vector<NegotiationMessage> & messages) override
  {
    return {rule_consensus_score(messages), false, {}};
  }
};

/// Asks the endpoint for a score and falls back to the rule judge on failure.
class LlmConsensusJudge : public ConsensusJudge
{
public:
  explicit LlmConsensusJudge(std::shared_ptr<EndpointClient> client) : client_(std::move(client)) {}
  JudgeResult judge(const std::vector<NegotiationMessage> & messages) override;

private:
  std::shared_ptr<EndpointClient> client_;
};

// ---------------------------------------------------------------------------
// Loop pieces

/// One message per member in ascending id order. A member whose negotiator
/// throws gets a flagged KEEP message with no requests.
std::vector<NegotiationMessage> run_round(
  const GroupView & group, const NegotiationTranscript & transcript,
  const std::map<AgentId, std::shared_ptr<Negotiator>> & negotiators);

/// Structured proposals first, then the summariser for the rest, then KEEP.
/// Each fallback appends to `flags`.
std::map<AgentId, SpeedIntent> sum_actions(
  const std::vector<NegotiationMessage> & messages, ActionSummarizer * summarizer,
  std::vector<std::string> * flags = nullptr);

struct SafetyEfficiency
{
  double safety = 100.0;
  double efficiency = 0.0;
  std::optional<std::pair<AgentId, AgentId>> closest_pair;
  double closest_distance = 0.0;
};

/// Min time-aligned distance over d_safe and mean plan speed over v_ref, both
/// scaled to [0, 100]. Throws SimulationError on empty or misaligned plans.
SafetyEfficiency safety_efficiency_scores(
  const std::map<AgentId, WaypointPlan> & plans, const NegotiationConfig & cfg);

/// Mean speed implied by consecutive plan points.
double mean_plan_speed(const WaypointPlan & plan);

/// Context the critic uses to attach per-agent hints.
struct CriticContext
{
  const GroupView * group = nullptr;
  const std::vector<NegotiationMessage> * messages = nullptr;
  const std::map<AgentId, SpeedIntent> * summary = nullptr;
  std::optional<std::pair<AgentId, AgentId>> closest_pair;
  std::map<AgentId, SpeedIntent> carried_hints;  // hints from earlier rounds
};

/// Inclusive threshold test. Without a context the criticisms carry no hints.
CriticFeedback criticize(
  const ScoreTriple & scores, const NegotiationConfig & cfg, const CriticContext * ctx = nullptr);

struct NegotiationStack
{
  std::map<AgentId, std::shared_ptr<Negotiator>> negotiators;
  std::shared_ptr<ActionSummarizer> summarizer;  // optional
  std::shared_ptr<ConsensusJudge> judge;         // defaults to the rule judge
};

NegotiationTranscript negotiate(
  const GroupView & group, const NegotiationStack & stack, const NegotiationConfig & cfg);

}  // namespace coopdrive

#endif  // COOPDRIVE__NEGOTIATION_HPP_
