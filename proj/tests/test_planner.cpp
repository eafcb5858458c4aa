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
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace coopdrive;
using coopdrive::testing::straight_route;
using coopdrive::testing::vehicle_on;

namespace
{

const Intention kKeep{SpeedIntent::KEEP, NavIntent::FOLLOW_LANE};
const Intention kStop{SpeedIntent::STOP, NavIntent::FOLLOW_LANE};
const Intention kFaster{SpeedIntent::FASTER, NavIntent::FOLLOW_LANE};

double plan_arc(const WaypointPlan & p, const Vec2 & from)
{
  double s = 0.0;
  Vec2 prev = from;
  for (const auto & q : p.points) {
    s += distance(prev, q);
    prev = q;
  }
  return s;
}

}  // namespace

TEST(AdaptiveAcceleration, DocumentedCases)
{
  const PlannerConfig cfg;
  EXPECT_EQ(adaptive_acceleration(SpeedIntent::KEEP, {3.0, 7.0}, 4.0, cfg), 0.0);
  EXPECT_EQ(adaptive_acceleration(SpeedIntent::FASTER, {2.0, 0.0}, 4.0, cfg), 0.0);
  EXPECT_EQ(adaptive_acceleration(SpeedIntent::FASTER, {1.0, 0.0}, 4.0, cfg), 0.0);
  EXPECT_DOUBLE_EQ(adaptive_acceleration(SpeedIntent::FASTER, {22.0, 0.0}, 4.0, cfg), 3.0);
  EXPECT_DOUBLE_EQ(adaptive_acceleration(SpeedIntent::FASTER, {12.0, 10.0}, 4.0, cfg), 0.75);
  EXPECT_DOUBLE_EQ(adaptive_acceleration(SpeedIntent::SLOWER, {}, 4.0, cfg), -2.5);
  EXPECT_DOUBLE_EQ(adaptive_acceleration(SpeedIntent::STOP, {10.0, 0.0}, 5.0, cfg), -1.5625);
  // Inside the margin the braking room falls back to x_min and saturates.
  EXPECT_DOUBLE_EQ(adaptive_acceleration(SpeedIntent::STOP, {1.0, 0.0}, 5.0, cfg), -6.0);
}

TEST(AdaptiveAcceleration, StopMatchesAnalyticFormula)
{
  const PlannerConfig cfg;
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> vd(0.0, 10.0);
  std::uniform_real_distribution<double> xd(0.0, 60.0);
  for (int i = 0; i < 100; ++i) {
    const double v = vd(rng);
    const double x = xd(rng);
    const double room = x - 2.0 > 0.5 ? x - 2.0 : 0.5;
    const double want = -std::min(6.0, v * v / (2.0 * room));
    EXPECT_NEAR(adaptive_acceleration(SpeedIntent::STOP, {x, 0.0}, v, cfg), want, 1e-9);
  }
}

TEST(GeneratePlan, KeepSpacing)
{
  const auto r = straight_route({0.0, 0.0}, {200.0, 0.0});
  const auto plan = generate_plan(vehicle_on(agent(0), r, 10.0, 5.0), kKeep, *r, {});
  ASSERT_EQ(plan.points.size(), 20u);
  Vec2 prev = r->point_at(10.0);
  for (const auto & p : plan.points) {
    EXPECT_NEAR(distance(prev, p), 1.0, 1e-12);
    prev = p;
  }
  EXPECT_DOUBLE_EQ(plan.terminal_speed, 5.0);
  EXPECT_DOUBLE_EQ(plan.mean_speed, 5.0);
}

TEST(GeneratePlan, StopProfileIntegrates)
{
  const auto r = straight_route({0.0, 0.0}, {200.0, 0.0});
  // Braking room 5 m at 5 m/s gives exactly -2.5 m/s^2.
  const auto plan = generate_plan(vehicle_on(agent(0), r, 0.0, 5.0), kStop, *r, {7.0, 0.0});
  ASSERT_EQ(plan.points.size(), 20u);
  EXPECT_EQ(plan.terminal_speed, 0.0);
  EXPECT_NEAR(plan.points.back().x, 5.5, 1e-12);
  for (std::size_t k = 10; k < 20; ++k) {
    EXPECT_EQ(plan.points[k], plan.points[9]);
  }
  const auto v = speed_profile(5.0, -2.5);
  ASSERT_EQ(v.size(), 21u);
  EXPECT_DOUBLE_EQ(v[1], 4.5);
  EXPECT_DOUBLE_EQ(v[10], 0.0);
  EXPECT_DOUBLE_EQ(v[20], 0.0);
}

TEST(GeneratePlan, StopFromRest)
{
  const auto r = straight_route({0.0, 0.0}, {200.0, 0.0});
  const auto plan = generate_plan(vehicle_on(agent(0), r, 30.0, 0.0), kStop, *r, {5.0, 1.0});
  ASSERT_EQ(plan.points.size(), 20u);
  for (const auto & p : plan.points) {
    EXPECT_EQ(p, (Vec2{30.0, 0.0}));
  }
  EXPECT_EQ(plan.terminal_speed, 0.0);
}

TEST(GeneratePlan, TruncatesAtRouteEnd)
{
  const auto r = straight_route({0.0, 0.0}, {10.0, 0.0});
  const auto plan = generate_plan(vehicle_on(agent(0), r, 5.0, 8.0), kKeep, *r, {});
  ASSERT_EQ(plan.points.size(), 20u);
  EXPECT_EQ(plan.points.back(), (Vec2{10.0, 0.0}));
  EXPECT_EQ(plan.points[5], (Vec2{10.0, 0.0}));
}

TEST(GeneratePlan, Errors)
{
  const auto r = straight_route({0.0, 0.0}, {100.0, 0.0});
  auto off = vehicle_on(agent(0), r, 10.0, 5.0);
  off.position.y = 8.0;
  EXPECT_THROW(generate_plan(off, kKeep, *r, {}), SimulationError);
  const Intention left{SpeedIntent::KEEP, NavIntent::TURN_LEFT_AT_INTERSECTION};
  EXPECT_THROW(generate_plan(vehicle_on(agent(0), r, 10.0, 5.0), left, *r, {}), SimulationError);
}

TEST(GeneratePlan, FasterOutrunsKeepInClearTraffic)
{
  const auto r = straight_route({0.0, 0.0}, {300.0, 0.0});
  for (double v0 : {0.0, 2.0, 5.0, 9.0}) {
    const auto s = vehicle_on(agent(0), r, 0.0, v0);
    const auto fast = generate_plan(s, kFaster, *r, {});
    const auto keep = generate_plan(s, kKeep, *r, {});
    EXPECT_GT(plan_arc(fast, s.position), plan_arc(keep, s.position)) << v0;
  }
}

TEST(GeneratePlan, RandomizedInvariants)
{
  const PlannerConfig cfg;
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const SpeedIntent intents[] = {SpeedIntent::STOP, SpeedIntent::SLOWER, SpeedIntent::KEEP,
                                 SpeedIntent::FASTER};
  const double dv_max = std::max(cfg.a_max, cfg.a_brake) * cfg.dt;
  for (int i = 0; i < 1000; ++i) {
    // Random L-shaped route: straight leg, then a turn of up to 90 degrees.
    const double leg1 = 5.0 + 60.0 * u(rng);
    const double turn = (u(rng) - 0.5) * std::numbers::pi;
    const Vec2 corner{leg1, 0.0};
    const Vec2 end = corner + unit_from_heading(turn) * (5.0 + 60.0 * u(rng));
    const auto route = std::make_shared<const Route>(std::vector<Vec2>{{0.0, 0.0}, corner, end}, 3.5);
    const double s0 = u(rng) * route->total_length();
    const double v0 = 10.0 * u(rng);
    const auto intent = intents[static_cast<int>(u(rng) * 4.0) % 4];
    const EnvContext env{60.0 * u(rng), 10.0 * u(rng)};
    const auto state = vehicle_on(agent(i), route, s0, v0);

    const auto plan = generate_plan(state, {intent, NavIntent::FOLLOW_LANE}, *route, env, cfg);
    ASSERT_EQ(plan.points.size(), static_cast<std::size_t>(cfg.num_waypoints));

    const double a = adaptive_acceleration(intent, env, v0, cfg);
    const auto v = speed_profile(v0, a, cfg);
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
      ASSERT_LE(std::abs(v[k + 1] - v[k]), dv_max + 1e-12);
    }

    double prev_s = s0;
    Vec2 prev = state.position;
    for (const auto & p : plan.points) {
      ASSERT_LE(distance(prev, p), cfg.v_max * cfg.dt + 1e-9);
      const auto proj = route->project(p);
      ASSERT_LE(proj.lateral, route->lane_width() / 2.0);
      ASSERT_GE(proj.s, prev_s - 1e-9);
      prev_s = proj.s;
      prev = p;
    }

    if (intent == SpeedIntent::STOP && a != 0.0) {
      const double t_stop = v0 / -a;
      if (t_stop <= cfg.num_waypoints * cfg.dt - 1e-9) {
        ASSERT_EQ(plan.terminal_speed, 0.0);
      }
      if (-a < cfg.a_brake) {
        // Not saturated: the plan halts no further than the braking room,
        // up to one step of discretisation.
        const double room = std::max(env.x - cfg.d_margin, cfg.x_min);
        ASSERT_LE(prev_s - s0, room + v0 * cfg.dt + 1e-9);
      } else {
        ASSERT_EQ(plan.terminal_speed, 0.0);
      }
    }
  }
}
