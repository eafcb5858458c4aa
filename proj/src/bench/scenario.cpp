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

#include "coopdrive/bench/scenario.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace coopdrive::bench
{

namespace
{

constexpr double kLaneWidth = 3.5;
constexpr double kHalfLane = kLaneWidth / 2.0;
constexpr double kBoxHalf = 7.0;
constexpr double kApproach = 150.0;   // raw approach length before trimming
constexpr double kExit = 40.0;
constexpr double kSyncDistance = 56.0;  // spawn distance to the shared conflict point
constexpr double kBoxDistance = 50.0;   // spawn distance to the junction box
constexpr double kFollowGap = 18.0;
constexpr double kCruise = 8.0;
constexpr double kTaper = 30.0;

struct TypeInfo
{
  ScenarioType type;
  std::string_view name;
  std::string_view category;
  std::vector<int> counts;
};

const std::vector<TypeInfo> & type_table()
{
  static const std::vector<TypeInfo> table{
    {ScenarioType::IC_STRAIGHT_STRAIGHT, "IC_STRAIGHT_STRAIGHT", "IC", {2}},
    {ScenarioType::IC_STRAIGHT_LEFT, "IC_STRAIGHT_LEFT", "IC", {2}},
    {ScenarioType::IC_OPPOSITE_LANE, "IC_OPPOSITE_LANE", "IC", {3, 4}},
    {ScenarioType::IC_CHAOS, "IC_CHAOS", "IC", {6, 8}},
    {ScenarioType::LM_STRAIGHT_RIGHT, "LM_STRAIGHT_RIGHT", "LM", {2}},
    {ScenarioType::LM_NEIGHBOR_LANE, "LM_NEIGHBOR_LANE", "LM", {2}},
    {ScenarioType::LM_LEFT_RIGHT, "LM_LEFT_RIGHT", "LM", {3, 4}},
    {ScenarioType::LM_HIGHWAY, "LM_HIGHWAY", "LM", {3, 4}},
    {ScenarioType::LC_RIGHT_STRAIGHT, "LC_RIGHT_STRAIGHT", "LC", {3, 4}},
    {ScenarioType::LC_HIGHWAY, "LC_HIGHWAY", "LC", {6, 7, 8}},
  };
  return table;
}

const TypeInfo & info(ScenarioType t)
{
  for (const auto & i : type_table()) {
    if (i.type == t) {
      return i;
    }
  }
  throw std::invalid_argument("unknown scenario type");
}

using Polyline = std::vector<Vec2>;

/// Exact rotation by quarter turns (counter-clockwise).
Vec2 rot90(Vec2 p, int quarters)
{
  for (int k = 0; k < ((quarters % 4) + 4) % 4; ++k) {
    p = {-p.y, p.x};
  }
  return p;
}

Polyline rotate(Polyline poly, int quarters)
{
  for (auto & p : poly) {
    p = rot90(p, quarters);
  }
  return poly;
}

void append_arc(Polyline & poly, Vec2 center, double r, double from, double to)
{
  constexpr int kSteps = 16;
  for (int k = 1; k <= kSteps; ++k) {
    const double a = from + (to - from) * k / kSteps;
    poly.push_back({center.x + r * std::cos(a), center.y + r * std::sin(a)});
  }
}

enum class Arm { S = 0, E = 1, N = 2, W = 3 };
enum class Turn { STRAIGHT, LEFT, RIGHT };

/// Junction route entering from `arm`, in a frame where the junction box is
/// centred on the origin and traffic keeps right.
Polyline junction_route(Arm arm, Turn turn)
{
  Polyline p{{kHalfLane, -kBoxHalf - kApproach}, {kHalfLane, -kBoxHalf}};
  constexpr double pi = std::numbers::pi;
  switch (turn) {
    case Turn::STRAIGHT:
      p.push_back({kHalfLane, kBoxHalf + kExit});
      break;
    case Turn::LEFT:
      append_arc(p, {-kBoxHalf, -kBoxHalf}, kBoxHalf + kHalfLane, 0.0, pi / 2.0);
      p.back() = {-kBoxHalf, kHalfLane};
      p.push_back({-kBoxHalf - kExit, kHalfLane});
      break;
    case Turn::RIGHT:
      append_arc(p, {kBoxHalf, -kBoxHalf}, kBoxHalf - kHalfLane, pi, pi / 2.0);
      p.back() = {kBoxHalf, -kHalfLane};
      p.push_back({kBoxHalf + kExit, -kHalfLane});
      break;
  }
  return rotate(std::move(p), static_cast<int>(arm));
}

/// Eastbound multi-lane road; lane centre y = lane * kLaneWidth. A lane change
/// follows a cosine taper that ends at x = 0.
Polyline lane_route(int from_lane, int to_lane)
{
  const double y0 = from_lane * kLaneWidth;
  const double y1 = to_lane * kLaneWidth;
  Polyline p{{-kApproach, y0}};
  if (from_lane == to_lane) {
    p.push_back({kExit, y0});
    return p;
  }
  p.push_back({-kTaper, y0});
  constexpr int kSteps = 15;
  for (int k = 1; k <= kSteps; ++k) {
    const double u = static_cast<double>(k) / kSteps;
    const double w = 0.5 * (1.0 - std::cos(std::numbers::pi * u));
    p.push_back({-kTaper + kTaper * u, y0 + (y1 - y0) * w});
  }
  p.push_back({kExit, y1});
  return p;
}

struct Slot
{
  Polyline raw;
  Maneuver maneuver = Maneuver::STRAIGHT;
  NavIntent nav = NavIntent::FOLLOW_LANE;
  int leader = -1;   // same-lane vehicle ahead; spawn kFollowGap behind it
  int partner = -1;  // vehicle to meet at the shared conflict point
  bool box_sync = false;
};

Slot junction_slot(Arm arm, Turn turn, int leader = -1, int partner = -1, bool merge = false)
{
  Slot s;
  s.raw = junction_route(arm, turn);
  switch (turn) {
    case Turn::STRAIGHT:
      s.maneuver = Maneuver::STRAIGHT;
      s.nav = NavIntent::GO_STRAIGHT_AT_INTERSECTION;
      break;
    case Turn::LEFT:
      s.maneuver = Maneuver::LEFT_TURN;
      s.nav = NavIntent::TURN_LEFT_AT_INTERSECTION;
      break;
    case Turn::RIGHT:
      s.maneuver = Maneuver::RIGHT_TURN;
      s.nav = NavIntent::TURN_RIGHT_AT_INTERSECTION;
      break;
  }
  if (merge) {
    s.maneuver = Maneuver::MERGE;
  }
  s.leader = leader;
  s.partner = partner;
  return s;
}

Slot box_slot(Arm arm, Turn turn, int leader = -1)
{
  Slot s = junction_slot(arm, turn, leader);
  s.box_sync = leader < 0;
  return s;
}

Slot lane_slot(int from, int to, Maneuver m, int leader = -1, int partner = -1)
{
  Slot s;
  s.raw = lane_route(from, to);
  s.maneuver = m;
  if (from == to) {
    s.nav = NavIntent::FOLLOW_LANE;
  } else {
    s.nav = to < from ? NavIntent::RIGHT_LANE_CHANGE : NavIntent::LEFT_LANE_CHANGE;
  }
  s.leader = leader;
  s.partner = partner;
  return s;
}

std::vector<Slot> slots_for(ScenarioType t)
{
  using enum Arm;
  using enum Turn;
  switch (t) {
    case ScenarioType::IC_STRAIGHT_STRAIGHT:
      return {junction_slot(S, STRAIGHT, -1, 1), junction_slot(W, STRAIGHT, -1, 0)};
    case ScenarioType::IC_STRAIGHT_LEFT:
      return {junction_slot(N, STRAIGHT, -1, 1), junction_slot(S, LEFT, -1, 0)};
    case ScenarioType::IC_OPPOSITE_LANE:
      return {
        junction_slot(S, STRAIGHT, -1, 1), junction_slot(N, LEFT, -1, 0),
        junction_slot(N, STRAIGHT, 1), junction_slot(S, LEFT, 0)};
    case ScenarioType::IC_CHAOS:
      return {
        box_slot(S, STRAIGHT), box_slot(E, STRAIGHT), box_slot(N, STRAIGHT), box_slot(W, STRAIGHT),
        box_slot(S, LEFT, 0),  box_slot(N, LEFT, 2),  box_slot(E, RIGHT, 1), box_slot(W, RIGHT, 3)};
    case ScenarioType::LM_STRAIGHT_RIGHT:
      return {junction_slot(W, STRAIGHT, -1, 1), junction_slot(S, RIGHT, -1, 0, true)};
    case ScenarioType::LM_NEIGHBOR_LANE:
      return {
        lane_slot(0, 0, Maneuver::STRAIGHT, -1, 1), lane_slot(1, 0, Maneuver::MERGE, -1, 0)};
    case ScenarioType::LM_LEFT_RIGHT:
      return {
        junction_slot(W, STRAIGHT, -1, 1), junction_slot(S, RIGHT, -1, 0, true),
        junction_slot(S, LEFT, 1, -1, true), junction_slot(E, STRAIGHT, -1, 2)};
    case ScenarioType::LM_HIGHWAY:
      return {
        lane_slot(0, 0, Maneuver::STRAIGHT, -1, 1), lane_slot(-1, 0, Maneuver::MERGE, -1, 0),
        lane_slot(-1, 0, Maneuver::MERGE, 1), lane_slot(0, 0, Maneuver::STRAIGHT, 0)};
    case ScenarioType::LC_RIGHT_STRAIGHT:
      return {
        lane_slot(0, 0, Maneuver::STRAIGHT, -1, 1), lane_slot(1, 0, Maneuver::LANE_CHANGE, -1, 0),
        lane_slot(1, 0, Maneuver::LANE_CHANGE, 1), lane_slot(0, 0, Maneuver::STRAIGHT, 0)};
    case ScenarioType::LC_HIGHWAY:
      return {
        lane_slot(0, 0, Maneuver::STRAIGHT, -1, 1), lane_slot(1, 0, Maneuver::LANE_CHANGE, -1, 0),
        lane_slot(1, 2, Maneuver::LANE_CHANGE, 1),  lane_slot(2, 2, Maneuver::STRAIGHT, -1, 2),
        lane_slot(0, 0, Maneuver::STRAIGHT, 0),     lane_slot(2, 2, Maneuver::STRAIGHT, 3),
        lane_slot(1, 1, Maneuver::STRAIGHT, 2),     lane_slot(0, 0, Maneuver::STRAIGHT, 4)};
  }
  throw std::invalid_argument("unknown scenario type");
}

/// First arc length on `a` that comes within `tol` of `b`.
double first_contact(const Route & a, const Route & b, double tol = 0.5)
{
  constexpr double kStep = 0.25;
  for (double s = 0.0; s <= a.total_length(); s += kStep) {
    if (b.project(a.point_at(s)).lateral < tol) {
      return s;
    }
  }
  throw std::logic_error("scenario slots were expected to meet");
}

Polyline trim(const Route & r, double s0)
{
  Polyline out{r.point_at(s0)};
  double acc = 0.0;
  const auto & poly = r.polyline();
  for (std::size_t i = 1; i < poly.size(); ++i) {
    acc += distance(poly[i - 1], poly[i]);
    if (acc > s0 + 1e-6) {
      out.push_back(poly[i]);
    }
  }
  return out;
}

double min_route_distance(const std::vector<VehicleSpec> & vehicles, const Vec2 & p)
{
  double best = std::numeric_limits<double>::infinity();
  for (const auto & v : vehicles) {
    best = std::min(best, v.route->project(p).lateral);
  }
  return best;
}

/// Parked car, barrier and two pedestrians beside the roads, well clear of
/// every test route.
std::vector<ObstacleSpec> place_obstacles(
  const std::vector<VehicleSpec> & vehicles, std::uint64_t seed, int first_id)
{
  constexpr double kClearance = 4.5;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);

  struct Candidate
  {
    Vec2 pos;
    double heading;
  };
  std::vector<Candidate> candidates;
  for (const auto & v : vehicles) {
    const Route & r = *v.route;
    for (double s = 10.0; s < r.total_length() - 10.0; s += 10.0) {
      const double h = r.heading_at(s);
      const Vec2 normal{-std::sin(h), std::cos(h)};
      for (double side : {-1.0, 1.0}) {
        candidates.push_back({r.point_at(s) + normal * (side * 6.5), h});
      }
    }
  }
  for (std::size_t i = candidates.size(); i > 1; --i) {
    std::swap(candidates[i - 1], candidates[rng() % i]);
  }

  struct Kind
  {
    ObstacleClass cls;
    double speed;
    double length;
    double width;
  };
  const Kind kinds[] = {
    {ObstacleClass::VEHICLE, 0.0, 4.6, 1.9},
    {ObstacleClass::STATIC, 0.0, 1.0, 1.0},
    {ObstacleClass::PEDESTRIAN, 1.2, 0.5, 0.5},
    {ObstacleClass::PEDESTRIAN, 1.2, 0.5, 0.5},
  };
  std::vector<ObstacleSpec> out;
  std::size_t next = 0;
  for (const auto & kind : kinds) {
    for (; next < candidates.size(); ++next) {
      const auto & c = candidates[next];
      const Vec2 dir = unit_from_heading(c.heading);
      const double walk = kind.speed > 0.0 ? 20.0 : 1.0;
      bool clear = true;
      for (double u = 0.0; u <= walk; u += 1.0) {
        if (min_route_distance(vehicles, c.pos + dir * u) < kClearance) {
          clear = false;
          break;
        }
      }
      if (!clear) {
        continue;
      }
      ObstacleSpec o;
      o.id = agent(first_id + static_cast<int>(out.size()));
      o.cls = kind.cls;
      o.path = std::make_shared<const Route>(Polyline{c.pos, c.pos + dir * walk}, kLaneWidth);
      o.speed = kind.speed;
      o.length = kind.length;
      o.width = kind.width;
      out.push_back(std::move(o));
      ++next;
      break;
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(ScenarioType t) { return info(t).name; }

std::optional<ScenarioType> parse_scenario_type(std::string_view text)
{
  for (const auto & i : type_table()) {
    if (i.name == text) {
      return i.type;
    }
  }
  return std::nullopt;
}

std::string_view category_of(ScenarioType t) { return info(t).category; }

std::vector<int> allowed_vehicle_counts(ScenarioType t) { return info(t).counts; }

WorldState ScenarioConfig::initial_world(double dt) const
{
  WorldState w;
  w.dt = dt;
  w.rng_seed = seed;
  for (const auto & v : vehicles) {
    VehicleState s;
    s.id = v.id;
    s.route = v.route;
    s.position = v.route->point_at(0.0);
    s.heading = v.route->heading_at(0.0);
    s.speed = v.initial_speed;
    s.intention = v.intention;
    s.controllable = true;
    w.vehicles.push_back(std::move(s));
  }
  for (const auto & o : obstacles) {
    VehicleState s;
    s.id = o.id;
    s.route = o.path;
    s.position = o.path->point_at(0.0);
    s.heading = o.path->heading_at(0.0);
    s.speed = o.speed;
    s.controllable = false;
    s.agent_class = o.cls;
    s.length = o.length;
    s.width = o.width;
    w.vehicles.push_back(std::move(s));
  }
  std::sort(w.vehicles.begin(), w.vehicles.end(), [](const auto & a, const auto & b) {
    return a.id < b.id;
  });
  return w;
}

ScenarioConfig generate_scenario(
  ScenarioType type, const ScenarioParams & params, std::uint64_t seed)
{
  const auto & ti = info(type);
  const int count = params.vehicle_count == 0 ? ti.counts.front() : params.vehicle_count;
  if (std::find(ti.counts.begin(), ti.counts.end(), count) == ti.counts.end()) {
    throw std::invalid_argument(
      fmt::format("{} does not support {} vehicles", ti.name, params.vehicle_count));
  }
  if (params.variant < 0 || params.variant > 3) {
    throw std::invalid_argument(fmt::format("variant {} outside 0..3", params.variant));
  }

  auto slots = slots_for(type);
  slots.resize(static_cast<std::size_t>(count));
  for (auto & s : slots) {
    s.raw = rotate(std::move(s.raw), params.variant);
    if (s.leader >= count) {
      s.leader = -1;
    }
    if (s.partner >= count) {
      s.partner = -1;
    }
  }

  std::vector<Route> raw;
  for (const auto & s : slots) {
    raw.emplace_back(s.raw, kLaneWidth, s.maneuver);
  }
  std::vector<double> start(slots.size(), 0.0);
  for (std::size_t k = 0; k < slots.size(); ++k) {
    const auto & s = slots[k];
    if (s.leader >= 0) {
      start[k] = start[static_cast<std::size_t>(s.leader)] - kFollowGap;
    } else if (s.partner >= 0 && static_cast<std::size_t>(s.partner) < k) {
      const auto p = static_cast<std::size_t>(s.partner);
      const double lead = first_contact(raw[p], raw[k]) - start[p];
      start[k] = first_contact(raw[k], raw[p]) - lead;
    } else if (s.partner >= 0) {
      start[k] = first_contact(raw[k], raw[static_cast<std::size_t>(s.partner)]) - kSyncDistance;
    } else if (s.box_sync) {
      start[k] = kApproach - kBoxDistance;
    } else {
      start[k] = kApproach - kSyncDistance;
    }
    if (start[k] < 0.0) {
      throw std::logic_error("scenario spawn point falls before the route start");
    }
  }

  ScenarioConfig cfg;
  cfg.type = type;
  cfg.params = params;
  cfg.params.vehicle_count = count;
  cfg.seed = seed;
  cfg.time_limit = 60.0 + 5.0 * (count - 2);
  cfg.speed_limit = 10.0;
  for (std::size_t k = 0; k < slots.size(); ++k) {
    VehicleSpec v;
    v.id = agent(static_cast<int>(k));
    v.route = std::make_shared<const Route>(trim(raw[k], start[k]), kLaneWidth, slots[k].maneuver);
    v.intention = Intention{SpeedIntent::KEEP, slots[k].nav};
    v.initial_speed = kCruise;
    v.cruise_speed = kCruise;
    cfg.vehicles.push_back(std::move(v));
  }
  if (params.obstacles) {
    cfg.obstacles = place_obstacles(cfg.vehicles, seed, 100);
  }
  return cfg;
}

namespace
{

nlohmann::json polyline_json(const Polyline & p)
{
  nlohmann::json j = nlohmann::json::array();
  for (const auto & v : p) {
    j.push_back({v.x, v.y});
  }
  return j;
}

}  // namespace

nlohmann::json to_json(const ScenarioConfig & cfg)
{
  nlohmann::json j;
  j["scenario_type"] = std::string(to_string(cfg.type));
  j["params"] = {
    {"vehicle_count", cfg.params.vehicle_count},
    {"variant", cfg.params.variant},
    {"obstacles", cfg.params.obstacles},
  };
  j["seed"] = cfg.seed;
  j["time_limit"] = cfg.time_limit;
  j["speed_limit"] = cfg.speed_limit;
  j["vehicles"] = nlohmann::json::array();
  for (const auto & v : cfg.vehicles) {
    j["vehicles"].push_back({
      {"id", to_int(v.id)},
      {"maneuver", std::string(to_string(v.route->maneuver()))},
      {"nav", std::string(to_string(v.intention.nav))},
      {"initial_speed", v.initial_speed},
      {"cruise_speed", v.cruise_speed},
      {"route", polyline_json(v.route->polyline())},
    });
  }
  j["obstacles"] = nlohmann::json::array();
  for (const auto & o : cfg.obstacles) {
    j["obstacles"].push_back({
      {"id", to_int(o.id)},
      {"class", to_string(o.cls)},
      {"speed", o.speed},
      {"length", o.length},
      {"width", o.width},
      {"path", polyline_json(o.path->polyline())},
    });
  }
  return j;
}

}  // namespace coopdrive::bench
