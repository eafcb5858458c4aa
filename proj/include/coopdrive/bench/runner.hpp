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

#ifndef COOPDRIVE__BENCH__RUNNER_HPP_
#define COOPDRIVE__BENCH__RUNNER_HPP_

#include "coopdrive/bench/scenario.hpp"
#include "coopdrive/control.hpp"
#include "coopdrive/endpoint.hpp"
#include "coopdrive/grouping.hpp"
#include "coopdrive/negotiation.hpp"
#include "coopdrive/planner.hpp"
#include "coopdrive/world.hpp"

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace coopdrive::bench
{

enum class NegotiatorKind { RULE, LLM, NONE };

std::string_view to_string(NegotiatorKind k);
std::optional<NegotiatorKind> parse_negotiator_kind(std::string_view text);

enum class LatencyMode { IDEAL, LATENCY_AWARE };

/// Negotiation delay in ticks, drawn uniformly from [min_ticks, max_ticks].
struct LatencyModel
{
  LatencyMode mode = LatencyMode::IDEAL;
  int min_ticks = 5;
  int max_ticks = 15;

  void validate() const;
  int draw(std::mt19937_64 & rng) const;
  std::string describe() const;
};

/// Parses "ideal", "<ticks>" or "<min>-<max>". Throws std::invalid_argument.
LatencyModel parse_latency(std::string_view text);

struct PenaltyConfig
{
  double pedestrian = 0.50;
  double vehicle = 0.60;
  double static_object = 0.65;

  double factor(ObstacleClass c) const;
};

struct SystemConfig
{
  NegotiatorKind negotiator = NegotiatorKind::RULE;
  LatencyModel latency;
  int guidance_period = 5;  // ticks between grouping/negotiation passes
  double dt = 0.2;
  GroupingConfig grouping{0.5, 8.0, 8.0, 50};
  int grouping_waypoints = 40;  // length of the broadcast plan used for grouping
  NegotiationConfig negotiation;
  PlannerConfig planner;
  ControllerConfig controller;
  WorldConfig world;
  PenaltyConfig penalties;
  EndpointConfig endpoint;
  std::shared_ptr<EndpointClient> client;  // overrides `endpoint` when set
  double sensing_radius = 50.0;
  double zone_width = 2.7;       // centreline distance that makes two routes conflict
  double zone_clear = 8.0;       // distance past zone entry after which a merge is cleared
  double deadlock_speed = 0.1;   // m/s
  double deadlock_time = 10.0;   // s

  nlohmann::json to_json() const;
};

enum class TaskStatus { COMPLETED, TIME_LIMIT, DEADLOCK, ABORTED };

std::string_view to_string(TaskStatus s);
std::optional<TaskStatus> parse_task_status(std::string_view text);

struct TaskResult
{
  std::string task_id;
  ScenarioType type = ScenarioType::IC_STRAIGHT_STRAIGHT;
  double rc = 0.0;
  std::vector<double> vehicle_rc;
  std::vector<CollisionEvent> infractions;
  double is_score = 1.0;
  double ds = 0.0;
  bool success = false;
  std::int64_t ticks_used = 0;
  TaskStatus status = TaskStatus::COMPLETED;
  std::string abort_reason;
  std::vector<std::string> transcript_refs;
};

struct NegotiationRecord
{
  std::int64_t tick = 0;
  std::int64_t apply_tick = 0;
  NegotiationTranscript transcript;
};

struct TaskRun
{
  TaskResult result;
  std::vector<std::string> log_lines;  // line-delimited JSON
  std::vector<NegotiationRecord> negotiations;
};

TaskRun run_task(const ScenarioConfig & config, const SystemConfig & sys, const std::string & task_id);

nlohmann::json transcripts_json(const TaskRun & run);

}  // namespace coopdrive::bench

#endif  // COOPDRIVE__BENCH__RUNNER_HPP_
