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

#ifndef COOPDRIVE__WORLD_HPP_
#define COOPDRIVE__WORLD_HPP_

#include "coopdrive/geometry.hpp"
#include "coopdrive/intention.hpp"
#include "coopdrive/waypoint_plan.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace coopdrive
{

/// Raised for contract violations inside the simulation core.
class SimulationError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Vehicle and actuator limits shared by the world, planner and controller.
struct VehicleParams
{
  double length = 4.6;
  double width = 1.9;
  double wheelbase = 2.9;
  double max_steer_angle = 0.7;  // rad at |steer| = 1
  double a_max = 3.0;            // m/s^2 at throttle = 1
  double a_brake = 6.0;          // m/s^2 at brake = 1
  double v_max = 10.0;
};

/// Driving path of one agent. Arc length is measured from polyline()[0].
class Route
{
public:
  struct Projection
  {
    double s = 0.0;
    double lateral = 0.0;  // unsigned distance to the polyline
  };

  Route(std::vector<Vec2> polyline, double lane_width, Maneuver maneuver = Maneuver::STRAIGHT);

  const std::vector<Vec2> & polyline() const { return polyline_; }
  double lane_width() const { return lane_width_; }
  double total_length() const { return cumulative_.back(); }
  Maneuver maneuver() const { return maneuver_; }

  Vec2 point_at(double s) const;
  double heading_at(double s) const;

  Projection project(const Vec2 & p) const;
  /// Nearest point restricted to arc lengths in [s_min, s_max].
  Projection project(const Vec2 & p, double s_min, double s_max) const;

private:
  std::size_t segment_index(double s) const;

  std::vector<Vec2> polyline_;
  std::vector<double> cumulative_;
  double lane_width_;
  Maneuver maneuver_;
};

using RouteRef = std::shared_ptr<const Route>;

enum class ObstacleClass { VEHICLE, PEDESTRIAN, STATIC };

std::string to_string(ObstacleClass c);
std::optional<ObstacleClass> parse_obstacle_class(const std::string & text);

struct VehicleState
{
  AgentId id{};
  Vec2 position;
  double heading = 0.0;
  double speed = 0.0;
  RouteRef route;
  double route_progress = 0.0;  // arc length along route, metres
  Intention intention;
  bool controllable = true;

  ObstacleClass agent_class = ObstacleClass::VEHICLE;
  double length = 4.6;
  double width = 1.9;
  bool finished = false;  // reached the end of its route; removed from interaction

  OrientedBox footprint() const { return {position, heading, length, width}; }
};

struct ControlCommand
{
  double steer = 0.0;     // [-1, 1], positive turns left
  double throttle = 0.0;  // [0, 1]
  double brake = 0.0;     // [0, 1]
};

struct WorldConfig
{
  double dt = 0.2;
  double finish_tolerance = 2.0;  // metres before route end counted as arrival
  VehicleParams vehicle;
};

struct WorldState
{
  std::int64_t tick = 0;
  double sim_time = 0.0;
  std::vector<VehicleState> vehicles;  // ascending id
  double dt = 0.2;
  std::uint64_t rng_seed = 0;
  std::map<AgentId, WaypointPlan> broadcasts;

  const VehicleState & vehicle(AgentId id) const;
  const VehicleState * find(AgentId id) const;
};

struct CollisionEvent
{
  std::int64_t tick = 0;
  std::pair<AgentId, AgentId> ids;
  ObstacleClass obstacle_class = ObstacleClass::VEHICLE;

  bool operator==(const CollisionEvent &) const = default;
};

/// Advances every agent by dt. Controllable agents use the kinematic bicycle
/// model; background agents follow their routes at constant speed.
WorldState step_world(
  const WorldState & world, const std::map<AgentId, ControlCommand> & controls, double dt,
  const WorldConfig & cfg = {});

/// All overlapping pairs this tick involving at least one controllable agent.
/// Stateless; first id of each pair is the smaller one unless only the second
/// is controllable, in which case the controllable agent comes first.
std::vector<CollisionEvent> current_contacts(const WorldState & world);

/// Reports each unordered pair once per continuous contact episode.
class CollisionTracker
{
public:
  std::vector<CollisionEvent> detect(const WorldState & world);

private:
  std::set<std::pair<AgentId, AgentId>> in_contact_;
};

struct ObservedAgent
{
  AgentId id{};
  Vec2 position;
  double heading = 0.0;
  double speed = 0.0;
  Intention intention;
  ObstacleClass agent_class = ObstacleClass::VEHICLE;
  std::optional<WaypointPlan> plan;
};

struct Observation
{
  AgentId ego{};
  std::vector<ObservedAgent> agents;  // includes ego, ascending id
};

/// Ground-truth view of everything within comm_range of ego (inclusive).
Observation observe(const WorldState & world, AgentId ego, double comm_range);

/// Completed fraction of the route in [0, 1]. Never below the stored progress.
double route_progress(const VehicleState & vehicle);

/// Arc length of the vehicle's projection, searched in a window ahead of its
/// stored progress so that the estimate cannot jump to a distant branch.
double project_progress(const Route & route, const Vec2 & position, double previous_s);

}  // namespace coopdrive

#endif  // COOPDRIVE__WORLD_HPP_
