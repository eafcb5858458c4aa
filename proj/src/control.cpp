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

#include "coopdrive/control.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace coopdrive
{

PidController::PidController(PidGains gains) : gains_(gains)
{
  if (!std::isfinite(gains_.k_p) || !std::isfinite(gains_.k_i) || !std::isfinite(gains_.k_d)) {
    throw SimulationError("PID gains must be finite");
  }
  if (gains_.n == 0) {
    throw SimulationError("PID history length must be positive");
  }
}

void PidController::set_history(const std::deque<double> & values)
{
  history_ = values;
  while (history_.size() > gains_.n) {
    history_.pop_front();
  }
}

double PidController::step(double x)
{
  if (std::isnan(x)) {
    throw SimulationError("PID input is NaN");
  }
  double integral = 0.0;
  double derivative = 0.0;
  if (!history_.empty()) {
    integral = std::accumulate(history_.begin(), history_.end(), 0.0) /
               static_cast<double>(history_.size());
  }
  if (history_.size() >= 2) {
    derivative = history_[history_.size() - 1] - history_[history_.size() - 2];
  }
  const double out = gains_.k_p * x + gains_.k_i * integral + gains_.k_d * derivative;
  history_.push_back(x);
  if (history_.size() > gains_.n) {
    history_.pop_front();
  }
  return out;
}

double lateral_signal(const WaypointPlan & plan, const VehicleState & state,
                      const ControllerConfig & cfg)
{
  constexpr double kMinAim = 0.5;
  const auto & pts = plan.points;
  Vec2 aim = (pts[pts.size() - 1] + pts[pts.size() - 2]) * 0.5;
  for (const auto & p : pts) {
    if (distance(p, state.position) >= cfg.aim_distance) {
      aim = p;
      break;
    }
  }
  const Vec2 d = aim - state.position;
  if (d.norm() < kMinAim) {
    return 0.0;
  }
  return normalize_angle(std::atan2(d.y, d.x) - state.heading);
}

double longitudinal_signal(const WaypointPlan & plan, const VehicleState & state)
{
  const auto & pts = plan.points;
  double total = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    total += distance(pts[i - 1], pts[i]);
  }
  const double mean_step = total / static_cast<double>(pts.size() - 1);
  return mean_step / plan.dt - state.speed;
}

ControlCommand plan_to_control(
  const WaypointPlan & plan, const VehicleState & state, PidController & lateral,
  PidController & longitudinal, const ControllerConfig & cfg)
{
  if (plan.points.size() < 2) {
    throw SimulationError("plan_to_control needs at least two waypoints");
  }
  const double lat_out = lateral.step(lateral_signal(plan, state, cfg));
  const double lon_out = longitudinal.step(longitudinal_signal(plan, state));

  ControlCommand cmd;
  cmd.steer = std::clamp(lat_out, -1.0, 1.0);
  if (lon_out > 0.0) {
    cmd.throttle = std::clamp(lon_out / cfg.a_max, 0.0, 1.0);
  } else {
    cmd.brake = std::clamp(-lon_out / cfg.a_brake, 0.0, 1.0);
  }
  return cmd;
}

}  // namespace coopdrive
