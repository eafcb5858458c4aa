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

#include "coopdrive/planner.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace coopdrive
{

double adaptive_acceleration(
  SpeedIntent intent, const EnvContext & env, double v, const PlannerConfig & cfg)
{
  double a = 0.0;
  switch (intent) {
    case SpeedIntent::FASTER: {
      const double gap = std::clamp((env.x - cfg.d_margin) / cfg.d_range, 0.0, 1.0);
      a = cfg.a_max * gap / (1.0 + cfg.k_sigma * env.sigma);
      break;
    }
    case SpeedIntent::KEEP:
      a = 0.0;
      break;
    case SpeedIntent::SLOWER:
      a = -cfg.a_dec;
      break;
    case SpeedIntent::STOP: {
      const double room = std::max(env.x - cfg.d_margin, cfg.x_min);
      a = -std::min(cfg.a_brake, v * v / (2.0 * room));
      break;
    }
  }
  return std::clamp(a, -cfg.a_brake, cfg.a_max);
}

std::vector<double> speed_profile(double v0, double accel, const PlannerConfig & cfg)
{
  std::vector<double> v(static_cast<std::size_t>(cfg.num_waypoints) + 1);
  for (std::size_t k = 0; k < v.size(); ++k) {
    v[k] = std::clamp(v0 + accel * static_cast<double>(k) * cfg.dt, 0.0, cfg.v_max);
  }
  return v;
}

namespace
{

bool nav_matches_route(NavIntent nav, Maneuver m)
{
  if (m == Maneuver::MERGE) {
    return true;
  }
  switch (nav) {
    case NavIntent::TURN_LEFT_AT_INTERSECTION:
      return m == Maneuver::LEFT_TURN;
    case NavIntent::TURN_RIGHT_AT_INTERSECTION:
      return m == Maneuver::RIGHT_TURN;
    case NavIntent::GO_STRAIGHT_AT_INTERSECTION:
    case NavIntent::FOLLOW_LANE:
      return m == Maneuver::STRAIGHT;
    case NavIntent::LEFT_LANE_CHANGE:
    case NavIntent::RIGHT_LANE_CHANGE:
      return m == Maneuver::LANE_CHANGE;
  }
  return false;
}

}  // namespace

WaypointPlan generate_plan(
  const VehicleState & state, const Intention & intent, const Route & route, const EnvContext & env,
  const PlannerConfig & cfg, std::int64_t start_tick)
{
  if (!nav_matches_route(intent.nav, route.maneuver())) {
    throw SimulationError(fmt::format(
      "agent {}: navigation intent {} does not match route maneuver {}", to_int(state.id),
      to_string(intent.nav), to_string(route.maneuver())));
  }

  const bool own_route = state.route.get() == &route;
  const auto proj = own_route ? route.project(
                                  state.position, state.route_progress - 1.0,
                                  state.route_progress + 15.0)
                              : route.project(state.position);
  if (proj.lateral > route.lane_width()) {
    throw SimulationError(fmt::format(
      "agent {} is {:.2f} m off its route (tolerance {:.2f} m)", to_int(state.id), proj.lateral,
      route.lane_width()));
  }
  const double s0 = own_route ? std::max(proj.s, state.route_progress) : proj.s;

  const double a = adaptive_acceleration(intent.speed, env, state.speed, cfg);
  const auto v = speed_profile(state.speed, a, cfg);

  WaypointPlan plan;
  plan.dt = cfg.dt;
  plan.start_tick = start_tick;
  plan.terminal_speed = v.back();
  double v_sum = 0.0;
  for (int k = 0; k < cfg.num_waypoints; ++k) {
    v_sum += v[static_cast<std::size_t>(k)];
  }
  plan.mean_speed = v_sum / cfg.num_waypoints;
  plan.points.reserve(static_cast<std::size_t>(cfg.num_waypoints));
  double s = s0;
  for (int k = 0; k < cfg.num_waypoints; ++k) {
    s += v[static_cast<std::size_t>(k)] * cfg.dt;
    plan.points.push_back(route.point_at(std::min(s, route.total_length())));
  }
  return plan;
}

}  // namespace coopdrive
