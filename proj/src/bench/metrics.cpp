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

#include "coopdrive/bench/metrics.hpp"

#include <fmt/format.h>

#include <numeric>
#include <stdexcept>

namespace coopdrive::bench
{

double infraction_score(const std::vector<CollisionEvent> & events, const PenaltyConfig & p)
{
  double is = 1.0;
  for (const auto & e : events) {
    is *= p.factor(e.obstacle_class);
  }
  return is;
}

void finalize_result(TaskResult & r, const PenaltyConfig & p)
{
  r.rc = r.vehicle_rc.empty()
           ? 0.0
           : std::accumulate(r.vehicle_rc.begin(), r.vehicle_rc.end(), 0.0) /
               static_cast<double>(r.vehicle_rc.size());
  r.is_score = infraction_score(r.infractions, p);
  r.ds = 100.0 * r.rc * r.is_score;
  r.success = r.rc == 1.0 && r.is_score == 1.0;
}

BenchmarkReport compute_metrics(
  const std::vector<TaskResult> & results, std::string config_hash,
  std::vector<std::uint64_t> seeds)
{
  if (results.empty()) {
    throw std::invalid_argument("compute_metrics needs at least one task result");
  }
  BenchmarkReport report;
  report.tasks = results;
  report.config_hash = std::move(config_hash);
  report.seeds = std::move(seeds);

  std::map<std::string, std::vector<const TaskResult *>> by_cat;
  for (const auto & r : results) {
    by_cat[std::string(category_of(r.type))].push_back(&r);
    by_cat["total"].push_back(&r);
  }
  for (const auto & [cat, rs] : by_cat) {
    Aggregate a;
    a.tasks = static_cast<int>(rs.size());
    int successes = 0;
    for (const auto * r : rs) {
      a.ds += r->ds;
      a.rc += r->rc;
      a.is_score += r->is_score;
      successes += r->success ? 1 : 0;
    }
    const double n = static_cast<double>(rs.size());
    a.ds /= n;
    a.rc /= n;
    a.is_score /= n;
    a.sr = successes / n;
    report.categories[cat] = a;
  }
  return report;
}

namespace
{

nlohmann::json aggregate_json(const Aggregate & a)
{
  return {{"tasks", a.tasks}, {"DS", a.ds}, {"RC", a.rc}, {"IS", a.is_score}, {"SR", a.sr}};
}

nlohmann::json event_json(const CollisionEvent & e)
{
  return {
    {"tick", e.tick},
    {"ids", {to_int(e.ids.first), to_int(e.ids.second)}},
    {"class", to_string(e.obstacle_class)},
  };
}

}  // namespace

nlohmann::json to_json(const BenchmarkReport & report)
{
  nlohmann::json tasks = nlohmann::json::array();
  for (const auto & r : report.tasks) {
    nlohmann::json ev = nlohmann::json::array();
    for (const auto & e : r.infractions) {
      ev.push_back(event_json(e));
    }
    nlohmann::json t{
      {"task", r.task_id},
      {"scenario_type", std::string(to_string(r.type))},
      {"rc", r.rc},
      {"vehicle_rc", r.vehicle_rc},
      {"is", r.is_score},
      {"ds", r.ds},
      {"success", r.success},
      {"ticks", r.ticks_used},
      {"status", std::string(to_string(r.status))},
      {"infractions", ev},
      {"transcripts", r.transcript_refs},
    };
    if (!r.abort_reason.empty()) {
      t["abort_reason"] = r.abort_reason;
    }
    tasks.push_back(std::move(t));
  }
  nlohmann::json cats = nlohmann::json::object();
  for (const auto & [name, a] : report.categories) {
    cats[name] = aggregate_json(a);
  }
  return {
    {"config_hash", report.config_hash},
    {"seeds", report.seeds},
    {"categories", cats},
    {"tasks", tasks},
  };
}

std::string to_csv(const BenchmarkReport & report)
{
  std::string out = "category,tasks,DS,RC,IS,SR\n";
  for (const char * cat : {"total", "IC", "LM", "LC"}) {
    const auto it = report.categories.find(cat);
    if (it == report.categories.end()) {
      continue;
    }
    const auto & a = it->second;
    out += fmt::format("{},{},{:.2f},{:.2f},{:.2f},{:.2f}\n", cat, a.tasks, a.ds, 100.0 * a.rc,
                       a.is_score, 100.0 * a.sr);
  }
  return out;
}

TaskResult result_from_log(const std::vector<std::string> & lines)
{
  TaskResult r;
  PenaltyConfig penalties;
  std::vector<AgentId> test_ids;
  std::map<AgentId, double> progress;
  bool have_header = false;
  bool have_end = false;
  for (const auto & line : lines) {
    if (line.empty()) {
      continue;
    }
    const auto j = nlohmann::json::parse(line);
    const auto type = j.at("type").get<std::string>();
    if (type == "header") {
      have_header = true;
      r.task_id = j.at("task").get<std::string>();
      const auto st = parse_scenario_type(j.at("scenario_type").get<std::string>());
      if (!st) {
        throw std::invalid_argument("log header has an unknown scenario type");
      }
      r.type = *st;
      const auto & p = j.at("system").at("penalties");
      penalties.pedestrian = p.at("pedestrian").get<double>();
      penalties.vehicle = p.at("vehicle").get<double>();
      penalties.static_object = p.at("static").get<double>();
      for (const auto & id : j.at("test_vehicles")) {
        test_ids.push_back(agent(id.get<std::int32_t>()));
      }
    } else if (type == "state") {
      progress[agent(j.at("id").get<std::int32_t>())] = j.at("progress").get<double>();
    } else if (type == "collision") {
      CollisionEvent e;
      e.tick = j.at("tick").get<std::int64_t>();
      e.ids = {agent(j.at("ids").at(0).get<std::int32_t>()),
               agent(j.at("ids").at(1).get<std::int32_t>())};
      const auto cls = parse_obstacle_class(j.at("class").get<std::string>());
      if (!cls) {
        throw std::invalid_argument("log collision has an unknown class");
      }
      e.obstacle_class = *cls;
      r.infractions.push_back(e);
    } else if (type == "negotiation") {
      r.transcript_refs.push_back(
        fmt::format("{}#{}", r.task_id, j.at("transcript").get<std::size_t>()));
    } else if (type == "end") {
      have_end = true;
      r.ticks_used = j.at("tick").get<std::int64_t>();
      const auto st = parse_task_status(j.at("status").get<std::string>());
      if (!st) {
        throw std::invalid_argument("log end record has an unknown status");
      }
      r.status = *st;
      if (j.contains("reason")) {
        r.abort_reason = j.at("reason").get<std::string>();
      }
    }
  }
  if (!have_header || !have_end) {
    throw std::invalid_argument("task log is missing its header or end record");
  }
  for (AgentId id : test_ids) {
    const auto it = progress.find(id);
    r.vehicle_rc.push_back(it == progress.end() ? 0.0 : it->second);
  }
  finalize_result(r, penalties);
  return r;
}

std::string fnv1a_hex(const std::string & data)
{
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace coopdrive::bench
