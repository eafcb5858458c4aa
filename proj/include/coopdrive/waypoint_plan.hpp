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

#ifndef COOPDRIVE__WAYPOINT_PLAN_HPP_
#define COOPDRIVE__WAYPOINT_PLAN_HPP_

#include "coopdrive/geometry.hpp"

#include <cstdint>
#include <vector>

namespace coopdrive
{

/// Fixed-rate future positions. points[k] is the position at start + (k + 1) * dt.
struct WaypointPlan
{
  std::vector<Vec2> points;
  double dt = 0.2;
  std::int64_t start_tick = 0;
  double terminal_speed = 0.0;
  double mean_speed = -1.0;  // profile mean; negative means derive from points
};

}  // namespace coopdrive

#endif  // COOPDRIVE__WAYPOINT_PLAN_HPP_
