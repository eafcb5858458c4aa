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

#ifndef COOPDRIVE__PLANNER_HPP_
#define COOPDRIVE__PLANNER_HPP_

#include "coopdrive/intention.hpp"
#include "coopdrive/waypoint_plan.hpp"
#include "coopdrive/world.hpp"

#include <limits>

namespace coopdrive
{

/// Surroundings that shape the acceleration chosen for an intention.
struct EnvContext
{
  double x = std::numeric_limits<double>::infinity();  // distance to nearest conflicting agent, m
  double sigma = 0.0;                                  // agents per 100 m within sensing radius
};

struct PlannerConfig
{
  double a_max = 3.0;
  double a_dec = 2.5;
  double a_brake = 6.0;
  double d_margin = 2.0;
  double d_range = 20.0;
  double k_sigma = 0.1;
  double x_min = 0.5;
  double v_max = 10.0;
  int num_waypoints = 20;
  double dt = 0.2;
};

/// Environment-adaptive acceleration for a speed intention at speed v.
double adaptive_acceleration(
  SpeedIntent intent, const EnvContext & env, double v, const PlannerConfig & cfg = {});

/// Speed profile v_0..v_N used by generate_plan (N + 1 entries).
std::vector<double> speed_profile(double v0, double accel, const PlannerConfig & cfg = {});

/// Samples waypoints along the route from the vehicle's projection, spaced by
/// the integrated speed profile of the intention's acceleration.
WaypointPlan generate_plan(
  const VehicleState & state, const Intention & intent, const Route & route, const EnvContext & env,
  const PlannerConfig & cfg = {}, std::int64_t start_tick = 0);

}  // namespace coopdrive

#endif  // COOPDRIVE__PLANNER_HPP_
