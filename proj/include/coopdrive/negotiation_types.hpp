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

#ifndef COOPDRIVE__NEGOTIATION_TYPES_HPP_
#define COOPDRIVE__NEGOTIATION_TYPES_HPP_

#include "coopdrive/geometry.hpp"
#include "coopdrive/grouping.hpp"
#include "coopdrive/intention.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace coopdrive
{

struct NegotiationMessage
{
  AgentId sender{};
  int round = 0;
  std::string text;
  std::optional<SpeedIntent> proposed_action;
  std::map<AgentId, SpeedIntent> requests;
  bool fallback = false;  // negotiator failed; defaults were substituted
  std::string note;
};

struct ScoreTriple
{
  double consensus = 0.0;
  double safety = 0.0;
  double efficiency = 0.0;

  double min() const { return std::min({consensus, safety, efficiency}); }
};

enum class Deficiency { CONSENSUS_LOW, SAFETY_LOW, EFFICIENCY_LOW };

std::string_view to_string(Deficiency d);

struct Criticism
{
  Deficiency tag = Deficiency::CONSENSUS_LOW;
  std::map<AgentId, SpeedIntent> hints;  // suggested speed intent per agent
  std::string detail;
};

struct CriticFeedback
{
  bool converged = false;
  std::vector<Criticism> criticisms;
  int round = 0;

  /// Hints of all criticisms; earlier criticisms win on conflicting agents.
  std::map<AgentId, SpeedIntent> hints() const;
};

/// Broadcast information about one group member.
struct MemberInfo
{
  AgentId id{};
  Vec2 position;
  double speed = 0.0;
  Intention intention;
  Maneuver maneuver = Maneuver::STRAIGHT;
};

}  // namespace coopdrive

#endif  // COOPDRIVE__NEGOTIATION_TYPES_HPP_
