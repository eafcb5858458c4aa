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

#include <gtest/gtest.h>

using namespace coopdrive;

TEST(Intention, ManeuverPriorityOrder)
{
  const Maneuver order[] = {Maneuver::STRAIGHT, Maneuver::RIGHT_TURN, Maneuver::LEFT_TURN,
                            Maneuver::MERGE, Maneuver::LANE_CHANGE};
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = i + 1; j < 5; ++j) {
      EXPECT_TRUE(has_priority(order[i], agent(9), order[j], agent(0)));
      EXPECT_FALSE(has_priority(order[j], agent(0), order[i], agent(9)));
    }
  }
}

TEST(Intention, EqualRankLowerIdProceeds)
{
  EXPECT_TRUE(has_priority(Maneuver::MERGE, agent(1), Maneuver::MERGE, agent(4)));
  EXPECT_FALSE(has_priority(Maneuver::MERGE, agent(4), Maneuver::MERGE, agent(1)));
}

TEST(Intention, NamesRoundTrip)
{
  for (auto s : {SpeedIntent::STOP, SpeedIntent::SLOWER, SpeedIntent::KEEP, SpeedIntent::FASTER}) {
    EXPECT_EQ(parse_speed_intent(to_string(s)), s);
  }
  for (auto n : {NavIntent::TURN_LEFT_AT_INTERSECTION, NavIntent::TURN_RIGHT_AT_INTERSECTION,
                 NavIntent::GO_STRAIGHT_AT_INTERSECTION, NavIntent::FOLLOW_LANE,
                 NavIntent::LEFT_LANE_CHANGE, NavIntent::RIGHT_LANE_CHANGE}) {
    EXPECT_EQ(parse_nav_intent(to_string(n)), n);
    EXPECT_EQ(parse_nav_intent(nav_phrase(n)), n);
  }
  EXPECT_EQ(parse_maneuver("MERGE"), Maneuver::MERGE);
  EXPECT_FALSE(parse_speed_intent("FLY").has_value());
  EXPECT_FALSE(parse_speed_intent("stop").has_value());
}

TEST(Intention, ShiftSaturates)
{
  EXPECT_EQ(shift_speed_intent(SpeedIntent::KEEP, 1), SpeedIntent::FASTER);
  EXPECT_EQ(shift_speed_intent(SpeedIntent::FASTER, 1), SpeedIntent::FASTER);
  EXPECT_EQ(shift_speed_intent(SpeedIntent::SLOWER, -3), SpeedIntent::STOP);
  EXPECT_EQ(shift_speed_intent(SpeedIntent::STOP, 2), SpeedIntent::KEEP);
}
