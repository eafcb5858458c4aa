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

#ifndef COOPDRIVE__NEGOTIATORS_HPP_
#define COOPDRIVE__NEGOTIATORS_HPP_

#include "coopdrive/endpoint.hpp"
#include "coopdrive/negotiation_types.hpp"

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace coopdrive
{

/// Raised by a negotiator that cannot produce a message (timeout, parse error).
class NegotiatorError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Everything one agent sees when it takes its turn.
struct NegotiatorInput
{
  AgentId ego_id{};
  double ego_speed = 0.0;
  Intention ego_intention;
  Vec2 ego_position;
  Maneuver ego_maneuver = Maneuver::STRAIGHT;
  std::vector<MemberInfo> peers;            // other group members, ascending id
  std::vector<ConflictEdge> conflicts;      // predicted conflicts among the group
  std::vector<NegotiationMessage> history;  // all earlier messages, in order
  std::optional<CriticFeedback> suggestion;

  /// Throws if ego appears among peers.
  void validate() const;
};

class Negotiator
{
public:
  virtual ~Negotiator() = default;
  virtual NegotiationMessage negotiate(const NegotiatorInput & input) = 0;
};

// ---------------------------------------------------------------------------
// Rule-based policy

/// Conflict-first time below which a yielding agent stops instead of slowing.
inline constexpr double kStopConflictTime = 2.0;

/// Speed intent the traffic-rule table assigns to `who` given the shared
/// conflicts and any critic hint. Every group member evaluates the same table,
/// so requests and proposals agree.
SpeedIntent rule_table_action(const NegotiatorInput & input, AgentId who);

NegotiationMessage rule_based_negotiate(const NegotiatorInput & input);

class RuleBasedNegotiator : public Negotiator
{
public:
  NegotiationMessage negotiate(const NegotiatorInput & input) override
  {
    return rule_based_negotiate(input);
  }
};

/// Negotiator that never changes its proposal and ignores the critic.
class FixedNegotiator : public Negotiator
{
public:
  FixedNegotiator(SpeedIntent action, std::map<AgentId, SpeedIntent> requests)
  : action_(action), requests_(std::move(requests))
  {
  }
  NegotiationMessage negotiate(const NegotiatorInput & input) override;

private:
  SpeedIntent action_;
  std::map<AgentId, SpeedIntent> requests_;
};

/// Message utterance: "I will slow down; vehicle 2 go faster."
std::string render_message_text(
  SpeedIntent action, const std::map<AgentId, SpeedIntent> & requests);

// ---------------------------------------------------------------------------
// Language-model path

enum class PromptKind { NEGOTIATE, SUM_ACTIONS, CONSENSUS_SCORE };

/// Fills the prompt template for `kind`. NEGOTIATE uses the full input;
/// SUM_ACTIONS and CONSENSUS_SCORE use the conversation in input.history.
std::string build_prompt(const NegotiatorInput & input, PromptKind kind);

/// Conversation rendering shared by all templates: "Vehicle <id>: <text>\n".
std::string render_conversation(const std::vector<NegotiationMessage> & messages);

/// Keyword parser for free-text replies. Throws NegotiatorError when no
/// intent can be recognised.
NegotiationMessage parse_negotiation_reply(AgentId ego, const std::string & text);

/// Parses '{"0": {"speed": "STOP"}, ...}'. Throws NegotiatorError when malformed
/// or when a category is outside STOP/SLOWER/KEEP/FASTER.
std::map<AgentId, SpeedIntent> parse_action_summary(const std::string & text);

/// Parses the "Consensus score: <int>" line. Throws NegotiatorError.
double parse_consensus_score(const std::string & text);

NegotiationMessage llm_negotiate(const NegotiatorInput & input, EndpointClient & client);

class LlmNegotiator : public Negotiator
{
public:
  explicit LlmNegotiator(std::shared_ptr<EndpointClient> client) : client_(std::move(client)) {}
  NegotiationMessage negotiate(const NegotiatorInput & input) override
  {
    return llm_negotiate(input, *client_);
  }

private:
  std::shared_ptr<EndpointClient> client_;
};

/// Tries the primary negotiator and falls back to the rule table on error.
/// The fallback message is flagged.
class FallbackNegotiator : public Negotiator
{
public:
  explicit FallbackNegotiator(std::shared_ptr<Negotiator> primary) : primary_(std::move(primary)) {}
  NegotiationMessage negotiate(const NegotiatorInput & input) override;

private:
  std::shared_ptr<Negotiator> primary_;
};

}  // namespace coopdrive

#endif  // COOPDRIVE__NEGOTIATORS_HPP_
