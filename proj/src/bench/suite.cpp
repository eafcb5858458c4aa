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

#include "coopdrive/bench/suite.hpp"

#include <fmt/format.h>

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace coopdrive::bench
{

namespace fs = std::filesystem;

namespace
{

constexpr std::uint64_t kSeedStride = 1000003ULL;

SuiteEntry parse_entry(const nlohmann::json & e)
{
  if (!e.is_object()) {
    throw std::invalid_argument("suite entries must be objects");
  }
  SuiteEntry out;
  const auto type = parse_scenario_type(e.at("scenario_type").get<std::string>());
  if (!type) {
    throw std::invalid_argument(
      fmt::format("unknown scenario type '{}'", e.at("scenario_type").get<std::string>()));
  }
  out.type = *type;
  if (e.contains("params")) {
    const auto & p = e.at("params");
    out.params.vehicle_count = p.value("vehicle_count", 0);
    out.params.variant = p.value("variant", 0);
    out.params.obstacles = p.value("obstacles", false);
  }
  out.seed = e.value("seed", std::uint64_t{0});
  return out;
}

}  // namespace

std::vector<SuiteTask> parse_suite(const nlohmann::json & j)
{
  if (!j.is_array() || j.empty()) {
    throw std::invalid_argument("a suite must be a non-empty JSON list");
  }
  std::vector<SuiteTask> tasks;
  std::map<ScenarioType, int> counter;
  for (const auto & raw : j) {
    SuiteEntry e;
    try {
      e = parse_entry(raw);
    } catch (const nlohmann::json::exception & ex) {
      throw std::invalid_argument(fmt::format("malformed suite entry: {}", ex.what()));
    }
    const bool explicit_obstacles = raw.contains("params") && raw.at("params").contains("obstacles");
    const std::string base = fmt::format("{}_{:02d}", to_string(e.type), counter[e.type]++);
    if (explicit_obstacles) {
      tasks.push_back({e.params.obstacles ? base + "_obs" : base, e});
      continue;
    }
    tasks.push_back({base, e});
    SuiteEntry with = e;
    with.params.obstacles = true;
    tasks.push_back({base + "_obs", with});
  }
  return tasks;
}

std::vector<SuiteTask> load_suite(const fs::path & file)
{
  std::ifstream in(file);
  if (!in) {
    throw std::invalid_argument(fmt::format("cannot open suite file {}", file.string()));
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception & ex) {
    throw std::invalid_argument(fmt::format("suite file {}: {}", file.string(), ex.what()));
  }
  return parse_suite(j);
}

fs::path default_suite_path() { return fs::path(COOPDRIVE_DATA_DIR) / "interdrive.json"; }

std::vector<SuiteTask> canonical_subset(const std::vector<SuiteTask> & tasks)
{
  std::vector<SuiteTask> out;
  for (auto type : kAllScenarioTypes) {
    for (const auto & t : tasks) {
      if (t.entry.type == type && !t.entry.params.obstacles) {
        out.push_back(t);
        break;
      }
    }
  }
  return out;
}

std::uint64_t task_seed(const SuiteEntry & e, std::uint64_t global_seed)
{
  return e.seed + global_seed * kSeedStride;
}

ScenarioConfig scenario_for(const SuiteTask & t, std::uint64_t global_seed)
{
  return generate_scenario(t.entry.type, t.entry.params, task_seed(t.entry, global_seed));
}

std::string config_hash(const SystemConfig & sys, const std::vector<SuiteTask> & tasks)
{
  nlohmann::json list = nlohmann::json::array();
  for (const auto & t : tasks) {
    list.push_back({
      {"id", t.id},
      {"type", std::string(to_string(t.entry.type))},
      {"vehicle_count", t.entry.params.vehicle_count},
      {"variant", t.entry.params.variant},
      {"obstacles", t.entry.params.obstacles},
      {"seed", t.entry.seed},
    });
  }
  const nlohmann::json canon{{"system", sys.to_json()}, {"tasks", list}};
  return fnv1a_hex(canon.dump());
}

void write_text(const fs::path & file, const std::string & text)
{
  if (file.has_parent_path()) {
    fs::create_directories(file.parent_path());
  }
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error(fmt::format("cannot write {}", file.string()));
  }
  out << text;
}

std::vector<std::string> read_lines(const fs::path & file)
{
  std::ifstream in(file);
  if (!in) {
    throw std::invalid_argument(fmt::format("cannot open {}", file.string()));
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    lines.push_back(line);
  }
  return lines;
}

namespace
{

std::string join_lines(const std::vector<std::string> & lines)
{
  std::string out;
  for (const auto & l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

void write_report(const fs::path & out, const BenchmarkReport & report)
{
  write_text(out / "report.json", to_json(report).dump(2) + "\n");
  write_text(out / "report.csv", to_csv(report));
}

}  // namespace

SuiteRun run_suite(
  const std::vector<SuiteTask> & tasks, const SystemConfig & sys, std::uint64_t global_seed,
  const fs::path & out)
{
  if (tasks.empty()) {
    throw std::invalid_argument("no tasks to run");
  }
  std::set<std::string> ids;
  for (const auto & t : tasks) {
    if (!ids.insert(t.id).second) {
      throw std::invalid_argument(fmt::format("duplicate task id {}", t.id));
    }
  }
  SuiteRun run;
  std::vector<TaskResult> results;
  std::vector<std::uint64_t> seeds;
  nlohmann::json manifest = nlohmann::json::array();
  for (const auto & t : tasks) {
    const auto cfg = scenario_for(t, global_seed);
    seeds.push_back(cfg.seed);
    auto tr = run_task(cfg, sys, t.id);
    if (!out.empty()) {
      write_text(out / "tasks" / (t.id + ".jsonl"), join_lines(tr.log_lines));
      write_text(out / "transcripts" / (t.id + ".json"), transcripts_json(tr).dump(2) + "\n");
    }
    manifest.push_back(t.id);
    results.push_back(tr.result);
    run.runs.push_back(std::move(tr));
  }
  run.report = compute_metrics(results, config_hash(sys, tasks), seeds);
  if (!out.empty()) {
    const nlohmann::json meta{
      {"config_hash", run.report.config_hash},
      {"seeds", seeds},
      {"tasks", manifest},
      {"system", sys.to_json()},
    };
    write_text(out / "run.json", meta.dump(2) + "\n");
    write_report(out, run.report);
  }
  return run;
}

BenchmarkReport score_directory(const fs::path & dir)
{
  std::ifstream in(dir / "run.json");
  if (!in) {
    throw std::invalid_argument(fmt::format("{} has no run.json", dir.string()));
  }
  const auto meta = nlohmann::json::parse(in);
  std::vector<TaskResult> results;
  for (const auto & id : meta.at("tasks")) {
    results.push_back(
      result_from_log(read_lines(dir / "tasks" / (id.get<std::string>() + ".jsonl"))));
  }
  return compute_metrics(
    results, meta.at("config_hash").get<std::string>(),
    meta.at("seeds").get<std::vector<std::uint64_t>>());
}

}  // namespace coopdrive::bench
