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

#ifndef COOPDRIVE__CONTROL_HPP_
#define COOPDRIVE__CONTROL_HPP_

#include "coopdrive/waypoint_plan.hpp"
#include "coopdrive/world.hpp"

#include <cstddef>
#include <deque>

namespace coopdrive
{

struct PidGains
{
  double k_p = 0.0;
  double k_i = 0.0;
  double k_d = 0.0;
  std::size_t n = 1;
};

inline constexpr PidGains kLateralGains{1.0, 0.2, 0.1, 5};
inline constexpr PidGains kLongitudinalGains{5.0, 1.0, 0.1, 20};

/// out = k_p * x + k_i * mean(E) + k_d * (E[-1] - E[-2]), evaluated on the
/// history E as it was before x is appended. Short histories drop the terms
/// they cannot support.
class PidController
{
public:
  explicit PidController(PidGains gains);

  double step(double x);

  const PidGains & gains() const { return gains_; }
  const std::deque<double> & history() const { return history_; }
  void reset() { history_.clear(); }
  /// Replace the history (oldest first); keeps at most the last n values.
  void set_history(const std::deque<double> & values);

private:
  PidGains gains_;
  std::deque<double> history_;
};

inline double pid_step(PidController & ctrl, double x) { return ctrl.step(x); }

struct ControllerConfig
{
  double aim_distance = 6.0;  // lookahead to the steering aim point, m
  double a_max = 3.0;
  double a_brake = 6.0;
};

/// Raw lateral signal: signed angle from the vehicle heading to the aim point.
double lateral_signal(const WaypointPlan & plan, const VehicleState & state,
                      const ControllerConfig & cfg = {});

/// Raw longitudinal signal: plan speed (mean step displacement / dt) minus current speed.
double longitudinal_signal(const WaypointPlan & plan, const VehicleState & state);

ControlCommand plan_to_control(
  const WaypointPlan & plan, const VehicleState & state, PidController & lateral,
  PidController & longitudinal, const ControllerConfig & cfg = {});

}  // namespace coopdrive

#endif  // COOPDRIVE__CONTROL_HPP_
