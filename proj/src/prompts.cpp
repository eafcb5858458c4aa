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
#include "coopdrive/prompts.hpp"

#include <fmt/format.h>

#include <cmath>

namespace coopdrive
{

namespace
{

constexpr std::string_view kNegotiateTemplate =
  R"(## Role
You are a driving assistant of a car (Vehicle ID: {i}). Given a scenario where multiple vehicles are in conflict, you need to negotiate with other vehicles to reach a consensus and ensure the safety and efficiency of all vehicles involved.

## Scenario
- Ego Vehicle (ID: {info['ego_id']}): Intention = {info['ego_intention']}, Speed = {round(info['ego_speed'], 1)}m/s
- Surrounding Vehicles:
{veh_string}

## Traffic Rules
0. In emergency situations, allow vehicles with special circumstances to pass through first.
1. Merging cars slow down to yield to straight car.
2. Left-turn cars slow down to yield to straight/right-turn car.
3. The car being yielded to go faster.
4. Cars behind decrease speed during emergency braking.
5. Following cars maintain a safe distance.

## Task
Based on the scenario info and conversation history, analyze the situation considering the **speed, direction, distance and intention of each vehicle**. Make sure you understand the situation before making any decisions. Pay attention to the traffic rules and critic suggestion. Identify any potential conflicts and propose actions that ensure the safety and efficiency of all vehicles involved. Remember to consider others' actions and requests from previous conversations. When conflicts occur, either request others to yield or yield to others. 
Your message may contain the action you will take and requests for other vehicles. **The actions and requests are speed intentions**

## Negotiation Tips
- Your actions should be logically consistent with your requests. No need for both sides to yield.
- Clearly specify which vehicle is responsible for each request or action.
- Focus your message on speed rather than navigation.

## Conversation History
{previous_conv}{sug_str}

## Output
You are vehicle {info['ego_id']}, you need to send a message to other cars. Please output the message only, within 18 words. Please do not provide specific speed values; instead, describe the trend of speed changes.
Sample output: I will [speed intention]; [requested speed intention].)";

constexpr std::string_view kSumActionsTemplate =
  R"(## Task
Given a conversation of multiple cars negotiating to reach consensus, classify each vehicle's speed change into [STOP, SLOWER, KEEP, FASTER] and output the result as a string in format: {'id': car_id, 'speed': category}.

## Classification rules
- STOP: Come to a complete stop.
- SLOWER: Decrease speed.
- KEEP: Maintain current speed.
- FASTER: Increase speed.

## Additional rules:
- If a car request others to yield, it should go faster
- If a car yield to others, it should stop

## Input conversation:
{conv}
Your task is to analyze the given conversations for each vehicle and output the classification as a string in the specified format. DO NOT output other content other than the required actions. Ensure the output matches the required structure exactly.

## Output example:
{"0": {"speed": "STOP"}, "1":{"speed": "SLOWER"}, "2":{"speed": "SLOWER"}...})";

constexpr std::string_view kConsensusTemplate =
  R"(Task Description:
Please analyze the following conversation and determine whether the characters have reached a consensus in the given scenario. Your response should include two parts: the first part is a brief explanation of whether a consensus was reached; the second part is a score indicating the degree of consensus, ranging from 0 to 100, where 0 means no consensus at all, and 100 means complete consensus.

Scoring Criteria:
0-20: There are significant disagreements with almost no common ground.
21-40: While there are some disagreements, there are one or two points where both parties can accept each other's views.
41-60: There is a moderate level of compromise and understanding on most discussed topics, but important disagreements remain unresolved.
61-80: Consensus has been reached on most issues, with only minor differences of opinion on a few details.
81-100: Almost all issues have been agreed upon by all parties, with only negligible objections remaining.

Scenario: On the road, multiple cars may have driving conflicts now. They negotiate with each other to avoid conflict.
Conversation:
{conv}

Your output format:
Short analysis: very short sentence to sum the consensus situation of the conversation.
Consensus score: int)";

std::string intention_text(const Intention & i)
{
  return fmt::format("{}, {}", nav_phrase(i.nav), to_string(i.speed));
}

std::string render_peers(const NegotiatorInput & input)
{
  std::string out;
  for (std::size_t k = 0; k < input.peers.size(); ++k) {
    const auto & p = input.peers[k];
    if (k > 0) {
      out += '\n';
    }
    out += fmt::format(
      "  - Vehicle (ID: {}): Intention = {}, Speed = {:.1f}m/s, Position = ({:.1f}, {:.1f}), "
      "Distance = {:.1f}m",
      to_int(p.id), intention_text(p.intention), p.speed, p.position.x, p.position.y,
      distance(p.position, input.ego_position));
  }
  return out;
}

std::string render_suggestion(const std::optional<CriticFeedback> & fb)
{
  if (!fb || fb->criticisms.empty()) {
    return "";
  }
  std::string out = "Critic suggestion:";
  for (const auto & c : fb->criticisms) {
    out += fmt::format(" {}: {}", to_string(c.tag), c.detail);
    if (!c.hints.empty()) {
      out += " ->";
      bool first = true;
      for (const auto & [id, intent] : c.hints) {
        out += fmt::format("{} vehicle {} {}", first ? "" : ",", to_int(id), to_string(intent));
        first = false;
      }
    }
    out += ';';
  }
  out.pop_back();
  out += '.';
  return out;
}

}  // namespace

const std::vector<std::string> & prompt_placeholders(PromptKind kind)
{
  static const std::vector<std::string> negotiate{
    "{i}",
    "{info['ego_id']}",
    "{info['ego_intention']}",
    "{round(info['ego_speed'], 1)}",
    "{veh_string}",
    "{previous_conv}",
    "{sug_str}",
  };
  static const std::vector<std::string> conv{"{conv}"};
  return kind == PromptKind::NEGOTIATE ? negotiate : conv;
}

std::string_view prompt_template(PromptKind kind)
{
  switch (kind) {
    case PromptKind::NEGOTIATE:
      return kNegotiateTemplate;
    case PromptKind::SUM_ACTIONS:
      return kSumActionsTemplate;
    case PromptKind::CONSENSUS_SCORE:
      return kConsensusTemplate;
  }
  return {};
}

std::string fill_template(
  std::string_view tmpl, const std::vector<std::string> & placeholders,
  const std::map<std::string, std::string> & values)
{
  std::string out(tmpl);
  for (const auto & key : placeholders) {
    const auto it = values.find(key);
    if (it == values.end()) {
      throw NegotiatorError(fmt::format("no value for prompt placeholder {}", key));
    }
    std::size_t pos = 0;
    while ((pos = out.find(key, pos)) != std::string::npos) {
      out.replace(pos, key.size(), it->second);
      pos += it->second.size();
    }
  }
  return out;
}

std::string render_conversation(const std::vector<NegotiationMessage> & messages)
{
  std::string out;
  for (const auto & m : messages) {
    out += fmt::format("Vehicle {}: {}\n", to_int(m.sender), m.text);
  }
  return out;
}

std::string build_prompt(const NegotiatorInput & input, PromptKind kind)
{
  std::map<std::string, std::string> values;
  if (kind == PromptKind::NEGOTIATE) {
    input.validate();
    const std::string id = std::to_string(to_int(input.ego_id));
    values["{i}"] = id;
    values["{info['ego_id']}"] = id;
    values["{info['ego_intention']}"] = intention_text(input.ego_intention);
    if (std::isfinite(input.ego_speed)) {
      values["{round(info['ego_speed'], 1)}"] = fmt::format("{:.1f}", input.ego_speed);
    }
    values["{veh_string}"] = render_peers(input);
    values["{previous_conv}"] = render_conversation(input.history);
    values["{sug_str}"] = render_suggestion(input.suggestion);
  } else if (!input.history.empty()) {
    values["{conv}"] = render_conversation(input.history);
  }
  return fill_template(prompt_template(kind), prompt_placeholders(kind), values);
}

}  // namespace coopdrive
