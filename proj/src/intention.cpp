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

#include "coopdrive/intention.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace coopdrive
{

namespace
{

constexpr std::array<std::pair<SpeedIntent, std::string_view>, 4> kSpeedNames{{
  {SpeedIntent::STOP, "STOP"},
  {SpeedIntent::SLOWER, "SLOWER"},
  {SpeedIntent::KEEP, "KEEP"},
  {SpeedIntent::FASTER, "FASTER"},
}};

constexpr std::array<std::pair<NavIntent, std::string_view>, 6> kNavNames{{
  {NavIntent::TURN_LEFT_AT_INTERSECTION, "TURN_LEFT_AT_INTERSECTION"},
  {NavIntent::TURN_RIGHT_AT_INTERSECTION, "TURN_RIGHT_AT_INTERSECTION"},
  {NavIntent::GO_STRAIGHT_AT_INTERSECTION, "GO_STRAIGHT_AT_INTERSECTION"},
  {NavIntent::FOLLOW_LANE, "FOLLOW_LANE"},
  {NavIntent::LEFT_LANE_CHANGE, "LEFT_LANE_CHANGE"},
  {NavIntent::RIGHT_LANE_CHANGE, "RIGHT_LANE_CHANGE"},
}};

constexpr std::array<std::pair<NavIntent, std::string_view>, 6> kNavPhrases{{
  {NavIntent::TURN_LEFT_AT_INTERSECTION, "turn left at intersection"},
  {NavIntent::TURN_RIGHT_AT_INTERSECTION, "turn right at intersection"},
  {NavIntent::GO_STRAIGHT_AT_INTERSECTION, "go straight at intersection"},
  {NavIntent::FOLLOW_LANE, "follow the lane"},
  {NavIntent::LEFT_LANE_CHANGE, "left lane change"},
  {NavIntent::RIGHT_LANE_CHANGE, "right lane change"},
}};

constexpr std::array<std::pair<Maneuver, std::string_view>, 5> kManeuverNames{{
  {Maneuver::STRAIGHT, "STRAIGHT"},
  {Maneuver::RIGHT_TURN, "RIGHT_TURN"},
  {Maneuver::LEFT_TURN, "LEFT_TURN"},
  {Maneuver::MERGE, "MERGE"},
  {Maneuver::LANE_CHANGE, "LANE_CHANGE"},
}};

template <typename Table, typename Key>
std::string_view lookup_name(const Table & table, Key key)
{
  for (const auto & [k, name] : table) {
    if (k == key) {
      return name;
    }
  }
  return "?";
}

template <typename Table>
auto lookup_value(const Table & table, std::string_view text)
  -> std::optional<typename Table::value_type::first_type>
{
  for (const auto & [k, name] : table) {
    if (name == text) {
      return k;
    }
  }
  return std::nullopt;
}

}  // namespace

int maneuver_rank(Maneuver m)
{
  switch (m) {
    case Maneuver::STRAIGHT:
      return 4;
    case Maneuver::RIGHT_TURN:
      return 3;
    case Maneuver::LEFT_TURN:
      return 2;
    case Maneuver::MERGE:
      return 1;
    case Maneuver::LANE_CHANGE:
      return 0;
  }
  return 0;
}

bool has_priority(Maneuver a, AgentId a_id, Maneuver b, AgentId b_id)
{
  const int ra = maneuver_rank(a);
  const int rb = maneuver_rank(b);
  if (ra != rb) {
    return ra > rb;
  }
  return a_id < b_id;
}

std::string_view to_string(SpeedIntent s) { return lookup_name(kSpeedNames, s); }
std::string_view to_string(NavIntent n) { return lookup_name(kNavNames, n); }
std::string_view to_string(Maneuver m) { return lookup_name(kManeuverNames, m); }
std::string_view nav_phrase(NavIntent n) { return lookup_name(kNavPhrases, n); }

std::optional<SpeedIntent> parse_speed_intent(std::string_view text)
{
  return lookup_value(kSpeedNames, text);
}

std::optional<NavIntent> parse_nav_intent(std::string_view text)
{
  if (auto v = lookup_value(kNavNames, text)) {
    return v;
  }
  return lookup_value(kNavPhrases, text);
}

std::optional<Maneuver> parse_maneuver(std::string_view text)
{
  return lookup_value(kManeuverNames, text);
}

SpeedIntent shift_speed_intent(SpeedIntent s, int levels)
{
  const int v = std::clamp(static_cast<int>(s) + levels, 0, 3);
  return static_cast<SpeedIntent>(v);
}

}  // namespace coopdrive
