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

#ifndef COOPDRIVE__BENCH__SCENARIO_HPP_
#define COOPDRIVE__BENCH__SCENARIO_HPP_

#include "coopdrive/intention.hpp"
#include "coopdrive/world.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace coopdrive::bench
{

enum class ScenarioType {
  IC_STRAIGHT_STRAIGHT,
  IC_STRAIGHT_LEFT,
  IC_OPPOSITE_LANE,
  IC_CHAOS,
  LM_STRAIGHT_RIGHT,
  LM_NEIGHBOR_LANE,
  LM_LEFT_RIGHT,
  LM_HIGHWAY,
  LC_RIGHT_STRAIGHT,
  LC_HIGHWAY,
};

inline constexpr ScenarioType kAllScenarioTypes[] = {
  ScenarioType::IC_STRAIGHT_STRAIGHT, ScenarioType::IC_STRAIGHT_LEFT,
  ScenarioType::IC_OPPOSITE_LANE,     ScenarioType::IC_CHAOS,
  ScenarioType::LM_STRAIGHT_RIGHT,    ScenarioType::LM_NEIGHBOR_LANE,
  ScenarioType::LM_LEFT_RIGHT,        ScenarioType::LM_HIGHWAY,
  ScenarioType::LC_RIGHT_STRAIGHT,    ScenarioType::LC_HIGHWAY,
};

std::string_view to_string(ScenarioType t);
std::optional<ScenarioType> parse_scenario_type(std::string_view text);
/// "IC", "LM" or "LC".
std::string_view category_of(ScenarioType t);

struct ScenarioParams
{
  int vehicle_count = 0;   // 0 selects the type's smallest count
  int variant = 0;         // rotates the layout by 90 degrees per step
  bool obstacles = false;  // add parked cars and pedestrians beside the road
};

/// Allowed vehicle counts per type.
std::vector<int> allowed_vehicle_counts(ScenarioType t);

struct VehicleSpec
{
  AgentId id{};
  RouteRef route;
  Intention intention;
  double initial_speed = 0.0;
  double cruise_speed = 0.0;
};

struct ObstacleSpec
{
  AgentId id{};
  ObstacleClass cls = ObstacleClass::STATIC;
  RouteRef path;  // walked at `speed`; a parked car has speed 0
  double speed = 0.0;
  double length = 4.6;
  double width = 1.9;
};

struct ScenarioConfig
{
  ScenarioType type = ScenarioType::IC_STRAIGHT_STRAIGHT;
  ScenarioParams params;
  std::uint64_t seed = 0;
  double time_limit = 60.0;   // s
  double speed_limit = 10.0;  // m/s
  std::vector<VehicleSpec> vehicles;
  std::vector<ObstacleSpec> obstacles;

  WorldState initial_world(double dt) const;
};

/// Deterministic layout for (type, params, seed). Throws std::invalid_argument
/// on an unsupported vehicle count or variant.
ScenarioConfig generate_scenario(ScenarioType type, const ScenarioParams & params,
                                 std::uint64_t seed);

nlohmann::json to_json(const ScenarioConfig & cfg);

}  // namespace coopdrive::bench

#endif  // COOPDRIVE__BENCH__SCENARIO_HPP_
