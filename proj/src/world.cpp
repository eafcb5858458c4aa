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

#include "coopdrive/world.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace coopdrive
{

Route::Route(std::vector<Vec2> polyline, double lane_width, Maneuver maneuver)
: polyline_(std::move(polyline)), lane_width_(lane_width), maneuver_(maneuver)
{
  if (polyline_.size() < 2) {
    throw SimulationError("route needs at least two points");
  }
  if (!(lane_width_ > 0.0)) {
    throw SimulationError("route lane width must be positive");
  }
  cumulative_.reserve(polyline_.size());
  cumulative_.push_back(0.0);
  for (std::size_t i = 1; i < polyline_.size(); ++i) {
    const double len = distance(polyline_[i - 1], polyline_[i]);
    if (!(len > 0.0)) {
      throw SimulationError(fmt::format("route points {} and {} coincide", i - 1, i));
    }
    cumulative_.push_back(cumulative_.back() + len);
  }
}

std::size_t Route::segment_index(double s) const
{
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  const auto idx = static_cast<std::size_t>(std::distance(cumulative_.begin(), it));
  return std::clamp<std::size_t>(idx == 0 ? 0 : idx - 1, 0, polyline_.size() - 2);
}

Vec2 Route::point_at(double s) const
{
  s = std::clamp(s, 0.0, total_length());
  const std::size_t i = segment_index(s);
  const double seg = cumulative_[i + 1] - cumulative_[i];
  const double t = (s - cumulative_[i]) / seg;
  return polyline_[i] + (polyline_[i + 1] - polyline_[i]) * t;
}

double Route::heading_at(double s) const
{
  const std::size_t i = segment_index(std::clamp(s, 0.0, total_length()));
  const Vec2 d = polyline_[i + 1] - polyline_[i];
  return std::atan2(d.y, d.x);
}

Route::Projection Route::project(const Vec2 & p) const
{
  return project(p, 0.0, total_length());
}

Route::Projection Route::project(const Vec2 & p, double s_min, double s_max) const
{
  s_min = std::clamp(s_min, 0.0, total_length());
  s_max = std::clamp(s_max, s_min, total_length());
  Projection best{s_min, std::numeric_limits<double>::infinity()};
  const std::size_t first = segment_index(s_min);
  const std::size_t last = segment_index(s_max);
  for (std::size_t i = first; i <= last; ++i) {
    const auto proj = project_onto_segment(p, polyline_[i], polyline_[i + 1]);
    const double seg = cumulative_[i + 1] - cumulative_[i];
    const double s = std::clamp(cumulative_[i] + proj.t * seg, s_min, s_max);
    const double d = distance(p, point_at(s));
    if (d < best.lateral) {
      best = {s, d};
    }
  }
  return best;
}

std::string to_string(ObstacleClass c)
{
  switch (c) {
    case ObstacleClass::VEHICLE:
      return "VEHICLE";
    case ObstacleClass::PEDESTRIAN:
      return "PEDESTRIAN";
    case ObstacleClass::STATIC:
      return "STATIC";
  }
  return "?";
}

std::optional<ObstacleClass> parse_obstacle_class(const std::string & text)
{
  for (auto c : {ObstacleClass::VEHICLE, ObstacleClass::PEDESTRIAN, ObstacleClass::STATIC}) {
    if (to_string(c) == text) {
      return c;
    }
  }
  return std::nullopt;
}

const VehicleState * WorldState::find(AgentId id) const
{
  const auto it = std::lower_bound(
    vehicles.begin(), vehicles.end(), id,
    [](const VehicleState & v, AgentId key) { return v.id < key; });
  if (it == vehicles.end() || it->id != id) {
    return nullptr;
  }
  return &*it;
}

const VehicleState & WorldState::vehicle(AgentId id) const
{
  if (const auto * v = find(id)) {
    return *v;
  }
  throw SimulationError(fmt::format("unknown agent {}", to_int(id)));
}

double project_progress(const Route & route, const Vec2 & position, double previous_s)
{
  constexpr double kBehind = 1.0;
  constexpr double kAhead = 15.0;
  const auto proj = route.project(position, previous_s - kBehind, previous_s + kAhead);
  return std::max(previous_s, proj.s);
}

namespace
{

void step_controllable(
  VehicleState & v, const ControlCommand & cmd, double dt, const WorldConfig & cfg)
{
  const VehicleParams & p = cfg.vehicle;
  const double steer = std::clamp(cmd.steer, -1.0, 1.0);
  const double throttle = std::clamp(cmd.throttle, 0.0, 1.0);
  const double brake = std::clamp(cmd.brake, 0.0, 1.0);

  const double accel = throttle * p.a_max - brake * p.a_brake;
  const double v1 = std::clamp(v.speed + accel * dt, 0.0, p.v_max);
  const double v_avg = 0.5 * (v.speed + v1);
  const double yaw = v_avg / p.wheelbase * std::tan(steer * p.max_steer_angle) * dt;
  const double mid = v.heading + 0.5 * yaw;

  v.position = v.position + unit_from_heading(mid) * (v_avg * dt);
  v.heading = normalize_angle(v.heading + yaw);
  v.speed = v1;

  if (v.route) {
    v.route_progress = project_progress(*v.route, v.position, v.route_progress);
    if (v.route->total_length() - v.route_progress <= cfg.finish_tolerance) {
      v.route_progress = v.route->total_length();
      v.finished = true;
    }
  }
}

void step_background(VehicleState & v, double dt)
{
  if (!v.route || v.speed <= 0.0) {
    return;
  }
  const double total = v.route->total_length();
  v.route_progress = std::min(total, v.route_progress + v.speed * dt);
  v.position = v.route->point_at(v.route_progress);
  v.heading = normalize_angle(v.route->heading_at(v.route_progress));
  if (v.route_progress >= total) {
    v.finished = true;
  }
}

}  // namespace

WorldState step_world(
  const WorldState & world, const std::map<AgentId, ControlCommand> & controls, double dt,
  const WorldConfig & cfg)
{
  if (!(dt > 0.0)) {
    throw SimulationError("step_world requires dt > 0");
  }
  for (const auto & v : world.vehicles) {
    if (!v.controllable || v.finished) {
      continue;
    }
    const auto it = controls.find(v.id);
    if (it == controls.end()) {
      throw SimulationError(fmt::format("missing control command for agent {}", to_int(v.id)));
    }
    const auto & c = it->second;
    if (std::isnan(c.steer) || std::isnan(c.throttle) || std::isnan(c.brake)) {
      throw SimulationError(fmt::format("NaN in control command for agent {}", to_int(v.id)));
    }
  }

  WorldState next = world;
  next.tick = world.tick + 1;
  next.dt = dt;
  next.sim_time = static_cast<double>(next.tick) * dt;
  for (auto & v : next.vehicles) {
    if (v.finished) {
      continue;
    }
    if (v.controllable) {
      step_controllable(v, controls.at(v.id), dt, cfg);
    } else {
      step_background(v, dt);
    }
  }
  return next;
}

std::vector<CollisionEvent> current_contacts(const WorldState & world)
{
  std::vector<CollisionEvent> out;
  const auto & vs = world.vehicles;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (vs[i].finished) {
      continue;
    }
    for (std::size_t j = i + 1; j < vs.size(); ++j) {
      if (vs[j].finished || (!vs[i].controllable && !vs[j].controllable)) {
        continue;
      }
      if (!boxes_overlap(vs[i].footprint(), vs[j].footprint())) {
        continue;
      }
      CollisionEvent ev;
      ev.tick = world.tick;
      if (vs[i].controllable) {
        ev.ids = {vs[i].id, vs[j].id};
        ev.obstacle_class = vs[j].controllable ? ObstacleClass::VEHICLE : vs[j].agent_class;
      } else {
        ev.ids = {vs[j].id, vs[i].id};
        ev.obstacle_class = vs[i].agent_class;
      }
      out.push_back(ev);
    }
  }
  return out;
}

std::vector<CollisionEvent> CollisionTracker::detect(const WorldState & world)
{
  std::vector<CollisionEvent> fresh;
  std::set<std::pair<AgentId, AgentId>> now;
  for (const auto & ev : current_contacts(world)) {
    const auto key = std::minmax(ev.ids.first, ev.ids.second);
    now.insert(key);
    if (!in_contact_.contains(key)) {
      fresh.push_back(ev);
    }
  }
  in_contact_ = std::move(now);
  return fresh;
}

Observation observe(const WorldState & world, AgentId ego, double comm_range)
{
  const VehicleState & self = world.vehicle(ego);
  Observation obs;
  obs.ego = ego;
  for (const auto & v : world.vehicles) {
    if (v.id != ego && (v.finished || distance(v.position, self.position) > comm_range)) {
      continue;
    }
    ObservedAgent a;
    a.id = v.id;
    a.position = v.position;
    a.heading = v.heading;
    a.speed = v.speed;
    a.intention = v.intention;
    a.agent_class = v.agent_class;
    if (const auto it = world.broadcasts.find(v.id); it != world.broadcasts.end()) {
      a.plan = it->second;
    }
    obs.agents.push_back(std::move(a));
  }
  return obs;
}

double route_progress(const VehicleState & vehicle)
{
  if (!vehicle.route) {
    throw SimulationError(fmt::format("agent {} has no route", to_int(vehicle.id)));
  }
  const Route & r = *vehicle.route;
  if (vehicle.finished) {
    return 1.0;
  }
  const double s = project_progress(r, vehicle.position, vehicle.route_progress);
  return std::clamp(s / r.total_length(), 0.0, 1.0);
}

}  // namespace coopdrive
