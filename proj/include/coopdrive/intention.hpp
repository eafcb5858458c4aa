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

#ifndef COOPDRIVE__INTENTION_HPP_
#define COOPDRIVE__INTENTION_HPP_

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace coopdrive
{

/// Agent identifier. Ordering is the global tie-break everywhere.
enum class AgentId : std::int32_t {};

constexpr std::int32_t to_int(AgentId id) { return static_cast<std::int32_t>(id); }
constexpr AgentId agent(std::int32_t v) { return static_cast<AgentId>(v); }

enum class SpeedIntent { STOP, SLOWER, KEEP, FASTER };

enum class NavIntent {
  TURN_LEFT_AT_INTERSECTION,
  TURN_RIGHT_AT_INTERSECTION,
  GO_STRAIGHT_AT_INTERSECTION,
  FOLLOW_LANE,
  LEFT_LANE_CHANGE,
  RIGHT_LANE_CHANGE,
};

struct Intention
{
  SpeedIntent speed = SpeedIntent::KEEP;
  NavIntent nav = NavIntent::FOLLOW_LANE;

  bool operator==(const Intention &) const = default;
};

/// Maneuver class of a route; drives right-of-way between conflicting agents.
enum class Maneuver { STRAIGHT, RIGHT_TURN, LEFT_TURN, MERGE, LANE_CHANGE };

/// Larger value wins right of way: straight > right > left > merge > lane change.
int maneuver_rank(Maneuver m);

/// True when agent a proceeds ahead of agent b. Equal rank: lower id proceeds.
bool has_priority(Maneuver a, AgentId a_id, Maneuver b, AgentId b_id);

std::string_view to_string(SpeedIntent s);
std::string_view to_string(NavIntent n);
std::string_view to_string(Maneuver m);

/// Natural-language navigation phrase, e.g. "turn left at intersection".
std::string_view nav_phrase(NavIntent n);

std::optional<SpeedIntent> parse_speed_intent(std::string_view text);
std::optional<NavIntent> parse_nav_intent(std::string_view text);
std::optional<Maneuver> parse_maneuver(std::string_view text);

/// Step one level towards FASTER (+1) or STOP (-1), saturating.
SpeedIntent shift_speed_intent(SpeedIntent s, int levels);

}  // namespace coopdrive

#endif  // COOPDRIVE__INTENTION_HPP_
