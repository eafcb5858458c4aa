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

#ifndef COOPDRIVE__BENCH__METRICS_HPP_
#define COOPDRIVE__BENCH__METRICS_HPP_

#include "coopdrive/bench/runner.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace coopdrive::bench
{

/// Product of penalty factors over the events, starting from 1.
double infraction_score(const std::vector<CollisionEvent> & events, const PenaltyConfig & p);

/// Fills rc, is_score, ds and success from vehicle_rc and infractions.
void finalize_result(TaskResult & r, const PenaltyConfig & p);

struct Aggregate
{
  int tasks = 0;
  double ds = 0.0;
  double rc = 0.0;
  double is_score = 0.0;
  double sr = 0.0;
};

struct BenchmarkReport
{
  std::vector<TaskResult> tasks;
  std::map<std::string, Aggregate> categories;  // "IC", "LM", "LC", "total"
  std::string config_hash;
  std::vector<std::uint64_t> seeds;
};

/// Per-task values averaged per category and overall. Throws
/// std::invalid_argument on empty input.
BenchmarkReport compute_metrics(
  const std::vector<TaskResult> & results, std::string config_hash = {},
  std::vector<std::uint64_t> seeds = {});

nlohmann::json to_json(const BenchmarkReport & report);
/// One row per category: category,tasks,DS,RC,IS,SR.
std::string to_csv(const BenchmarkReport & report);

/// Rebuilds a task result from its line-delimited JSON log.
TaskResult result_from_log(const std::vector<std::string> & lines);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string & data);

}  // namespace coopdrive::bench

#endif  // COOPDRIVE__BENCH__METRICS_HPP_
