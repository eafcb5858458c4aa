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

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

namespace coopdrive
{

void NegotiatorInput::validate() const
{
  std::set<AgentId> seen;
  for (const auto & p : peers) {
    if (p.id == ego_id) {
      throw NegotiatorError(fmt::format("ego vehicle {} listed among its peers", to_int(ego_id)));
    }
    if (!seen.insert(p.id).second) {
      throw NegotiatorError(fmt::format("peer {} listed twice", to_int(p.id)));
    }
  }
}

namespace
{

Maneuver maneuver_of(const NegotiatorInput & input, AgentId who)
{
  if (who == input.ego_id) {
    return input.ego_maneuver;
  }
  for (const auto & p : input.peers) {
    if (p.id == who) {
      return p.maneuver;
    }
  }
  throw NegotiatorError(fmt::format("vehicle {} is not part of the negotiation", to_int(who)));
}

bool is_member(const NegotiatorInput & input, AgentId who)
{
  return who == input.ego_id ||
         std::any_of(input.peers.begin(), input.peers.end(), [&](const MemberInfo & p) {
           return p.id == who;
         });
}

/// Conflict partners of `who` with the edge that links them.
std::vector<std::pair<AgentId, const ConflictEdge *>> partners(
  const NegotiatorInput & input, AgentId who)
{
  std::vector<std::pair<AgentId, const ConflictEdge *>> out;
  for (const auto & e : input.conflicts) {
    AgentId other{};
    if (e.pair.first == who) {
      other = e.pair.second;
    } else if (e.pair.second == who) {
      other = e.pair.first;
    } else {
      continue;
    }
    if (is_member(input, other)) {
      out.emplace_back(other, &e);
    }
  }
  return out;
}

SpeedIntent table_only(const NegotiatorInput & input, AgentId who)
{
  const auto mine = maneuver_of(input, who);
  const auto conflicts = partners(input, who);
  if (conflicts.empty()) {
    return SpeedIntent::KEEP;
  }
  std::optional<SpeedIntent> yield;
  for (const auto & [other, edge] : conflicts) {
    if (has_priority(maneuver_of(input, other), other, mine, who)) {
      const auto y =
        edge->first_conflict_time < kStopConflictTime ? SpeedIntent::STOP : SpeedIntent::SLOWER;
      yield = yield ? std::min(*yield, y) : y;
    }
  }
  return yield.value_or(SpeedIntent::FASTER);
}

std::string_view action_phrase(SpeedIntent s)
{
  switch (s) {
    case SpeedIntent::STOP:
      return "stop";
    case SpeedIntent::SLOWER:
      return "slow down";
    case SpeedIntent::KEEP:
      return "keep speed";
    case SpeedIntent::FASTER:
      return "go faster";
  }
  return "keep speed";
}

std::string lowercase(std::string s)
{
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return s;
}

/// Earliest speed keyword in a clause.
std::optional<SpeedIntent> find_intent(const std::string & clause)
{
  static const std::vector<std::pair<std::string, SpeedIntent>> keywords{
    {"stop", SpeedIntent::STOP},         {"halt", SpeedIntent::STOP},
    {"yield", SpeedIntent::STOP},        {"wait", SpeedIntent::STOP},
    {"slow", SpeedIntent::SLOWER},       {"decelerat", SpeedIntent::SLOWER},
    {"decrease", SpeedIntent::SLOWER},   {"reduce", SpeedIntent::SLOWER},
    {"keep", SpeedIntent::KEEP},         {"maintain", SpeedIntent::KEEP},
    {"constant", SpeedIntent::KEEP},     {"faster", SpeedIntent::FASTER},
    {"speed up", SpeedIntent::FASTER},   {"accelerat", SpeedIntent::FASTER},
    {"increase", SpeedIntent::FASTER},   {"proceed", SpeedIntent::FASTER},
    {"go ahead", SpeedIntent::FASTER},   {"pass first", SpeedIntent::FASTER},
  };
  std::size_t best = std::string::npos;
  std::optional<SpeedIntent> found;
  for (const auto & [word, intent] : keywords) {
    const auto pos = clause.find(word);
    if (pos != std::string::npos && pos < best) {
      best = pos;
      found = intent;
    }
  }
  return found;
}

}  // namespace

SpeedIntent rule_table_action(const NegotiatorInput & input, AgentId who)
{
  if (input.suggestion) {
    const auto hints = input.suggestion->hints();
    if (const auto it = hints.find(who); it != hints.end()) {
      return it->second;
    }
  }
  return table_only(input, who);
}

std::string render_message_text(
  SpeedIntent action, const std::map<AgentId, SpeedIntent> & requests)
{
  std::string out = fmt::format("I will {}", action_phrase(action));
  bool first = true;
  for (const auto & [id, intent] : requests) {
    out += fmt::format("{} vehicle {} {}", first ? ";" : ",", to_int(id), action_phrase(intent));
    first = false;
  }
  out += '.';
  return out;
}

NegotiationMessage rule_based_negotiate(const NegotiatorInput & input)
{
  input.validate();
  NegotiationMessage msg;
  msg.sender = input.ego_id;
  msg.proposed_action = rule_table_action(input, input.ego_id);
  for (const auto & [other, edge] : partners(input, input.ego_id)) {
    (void)edge;
    msg.requests[other] = rule_table_action(input, other);
  }
  msg.text = render_message_text(*msg.proposed_action, msg.requests);
  return msg;
}

NegotiationMessage FixedNegotiator::negotiate(const NegotiatorInput & input)
{
  NegotiationMessage msg;
  msg.sender = input.ego_id;
  msg.proposed_action = action_;
  msg.requests = requests_;
  msg.text = render_message_text(action_, requests_);
  return msg;
}

NegotiationMessage parse_negotiation_reply(AgentId ego, const std::string & text)
{
  NegotiationMessage msg;
  msg.sender = ego;
  msg.text = text;

  static const std::regex clause_split("[;,.\\n!]+");
  static const std::regex vehicle_ref("(?:vehicle|car|veh)\\s*(?:id\\s*)?#?(\\d+)");
  static const std::regex self_ref("\\bi\\b|\\bi'll\\b|\\bme\\b|\\bego\\b");

  const std::string lower = lowercase(text);
  std::sregex_token_iterator it(lower.begin(), lower.end(), clause_split, -1);
  for (; it != std::sregex_token_iterator(); ++it) {
    const std::string clause = *it;
    const auto intent = find_intent(clause);
    if (!intent) {
      continue;
    }
    std::smatch vm;
    std::smatch sm;
    const bool has_vehicle = std::regex_search(clause, vm, vehicle_ref);
    const bool has_self = std::regex_search(clause, sm, self_ref);
    std::optional<AgentId> subject;
    if (has_vehicle && (!has_self || vm.position(0) < sm.position(0))) {
      subject = agent(std::stoi(vm[1].str()));
    } else if (has_self) {
      subject = ego;
    }
    if (!subject) {
      continue;
    }
    if (*subject == ego) {
      if (!msg.proposed_action) {
        msg.proposed_action = intent;
      }
    } else if (!msg.requests.contains(*subject)) {
      msg.requests[*subject] = *intent;
    }
  }
  if (!msg.proposed_action && msg.requests.empty()) {
    throw NegotiatorError(fmt::format("no speed intent recognised in reply '{}'", text));
  }
  return msg;
}

std::map<AgentId, SpeedIntent> parse_action_summary(const std::string & text)
{
  const auto open = text.find('{');
  const auto close = text.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    throw NegotiatorError("action summary contains no JSON object");
  }
  const std::string body = text.substr(open, close - open + 1);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception &) {
    std::string swapped = body;
    std::replace(swapped.begin(), swapped.end(), '\'', '"');
    try {
      doc = nlohmann::json::parse(swapped);
    } catch (const nlohmann::json::exception & e) {
      throw NegotiatorError(fmt::format("malformed action summary: {}", e.what()));
    }
  }
  if (!doc.is_object()) {
    throw NegotiatorError("action summary is not an object");
  }
  std::map<AgentId, SpeedIntent> out;
  for (const auto & [key, value] : doc.items()) {
    int id = 0;
    try {
      std::size_t used = 0;
      id = std::stoi(key, &used);
      if (used != key.size()) {
        throw std::invalid_argument(key);
      }
    } catch (const std::exception &) {
      throw NegotiatorError(fmt::format("action summary key '{}' is not a vehicle id", key));
    }
    if (!value.is_object() || !value.contains("speed") || !value["speed"].is_string()) {
      throw NegotiatorError(fmt::format("action summary entry '{}' lacks a speed field", key));
    }
    const auto category = value["speed"].get<std::string>();
    const auto intent = parse_speed_intent(category);
    if (!intent) {
      throw NegotiatorError(fmt::format("unknown speed category '{}'", category));
    }
    out[agent(id)] = *intent;
  }
  return out;
}

double parse_consensus_score(const std::string & text)
{
  static const std::regex pattern(
    "consensus score\\s*:\\s*\\**\\s*(-?\\d+(?:\\.\\d+)?)", std::regex::icase);
  std::smatch m;
  if (!std::regex_search(text, m, pattern)) {
    throw NegotiatorError("reply has no 'Consensus score:' line");
  }
  return std::clamp(std::stod(m[1].str()), 0.0, 100.0);
}

NegotiationMessage llm_negotiate(const NegotiatorInput & input, EndpointClient & client)
{
  const std::string prompt = build_prompt(input, PromptKind::NEGOTIATE);
  std::string reply;
  try {
    reply = client.complete(prompt);
  } catch (const EndpointError & e) {
    throw NegotiatorError(e.what());
  }
  auto msg = parse_negotiation_reply(input.ego_id, reply);
  std::erase_if(msg.requests, [&](const auto & kv) {
    return kv.first == input.ego_id || !is_member(input, kv.first);
  });
  return msg;
}

NegotiationMessage FallbackNegotiator::negotiate(const NegotiatorInput & input)
{
  try {
    return primary_->negotiate(input);
  } catch (const NegotiatorError & e) {
    auto msg = rule_based_negotiate(input);
    msg.fallback = true;
    msg.note = e.what();
    return msg;
  } catch (const EndpointError & e) {
    auto msg = rule_based_negotiate(input);
    msg.fallback = true;
    msg.note = e.what();
    return msg;
  }
}

}  // namespace coopdrive
