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

#ifndef COOPDRIVE__BENCH__SUITE_HPP_
#define COOPDRIVE__BENCH__SUITE_HPP_

#include "coopdrive/bench/metrics.hpp"
#include "coopdrive/bench/runner.hpp"
#include "coopdrive/bench/scenario.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace coopdrive::bench
{

/// One route entry of a suite file.
struct SuiteEntry
{
  ScenarioType type = ScenarioType::IC_STRAIGHT_STRAIGHT;
  ScenarioParams params;
  std::uint64_t seed = 0;
};

struct SuiteTask
{
  std::string id;  // e.g. IC_STRAIGHT_STRAIGHT_00 or IC_STRAIGHT_STRAIGHT_00_obs
  SuiteEntry entry;
};

/// Parses a suite file body: a JSON list of {scenario_type, params, seed}.
/// Every entry yields a plain task and, unless `obstacles` is set explicitly,
/// a task with obstacles. Throws std::invalid_argument on malformed input.
std::vector<SuiteTask> parse_suite(const nlohmann::json & j);
std::vector<SuiteTask> load_suite(const std::filesystem::path & file);

/// Path of the suite shipped with the project.
std::filesystem::path default_suite_path();

/// First plain task of each scenario type, in type order.
std::vector<SuiteTask> canonical_subset(const std::vector<SuiteTask> & tasks);

/// Seed actually used for a task under a global run seed.
std::uint64_t task_seed(const SuiteEntry & e, std::uint64_t global_seed);

ScenarioConfig scenario_for(const SuiteTask & t, std::uint64_t global_seed);

struct SuiteRun
{
  BenchmarkReport report;
  std::vector<TaskRun> runs;  // same order as the tasks
};

/// Runs every task in order. When `out` is non-empty it receives
/// tasks/<id>.jsonl, transcripts/<id>.json, report.json and report.csv.
SuiteRun run_suite(
  const std::vector<SuiteTask> & tasks, const SystemConfig & sys, std::uint64_t global_seed,
  const std::filesystem::path & out = {});

/// Hash of the system configuration and the task list.
std::string config_hash(const SystemConfig & sys, const std::vector<SuiteTask> & tasks);

/// Recomputes a report from the tasks/*.jsonl logs of a run directory.
BenchmarkReport score_directory(const std::filesystem::path & dir);

void write_text(const std::filesystem::path & file, const std::string & text);
std::vector<std::string> read_lines(const std::filesystem::path & file);

}  // namespace coopdrive::bench

#endif  // COOPDRIVE__BENCH__SUITE_HPP_
