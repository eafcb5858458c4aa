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

#include "coopdrive/bench/cli.hpp"

#include "coopdrive/bench/suite.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

namespace coopdrive::bench
{

namespace fs = std::filesystem;

namespace
{

struct RunOptions
{
  std::string suite;
  std::string scenario;
  int vehicles = 0;
  int variant = 0;
  bool obstacles = false;
  bool canonical = false;
  std::string negotiator = "rule";
  std::string latency = "ideal";
  std::uint64_t seed = 0;
  std::string out;
  int repeat = 1;
  bool strict = false;
  std::string endpoint;
};

std::string read_file(const fs::path & p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Every regular file under `dir`, relative path to contents.
std::map<std::string, std::string> snapshot(const fs::path & dir)
{
  std::map<std::string, std::string> files;
  for (const auto & e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) {
      files[fs::relative(e.path(), dir).generic_string()] = read_file(e.path());
    }
  }
  return files;
}

void print_summary(std::ostream & out, const BenchmarkReport & r)
{
  out << to_csv(r);
}

int do_run(const RunOptions & o, std::ostream & out, std::ostream & err)
{
  SystemConfig sys;
  const auto kind = parse_negotiator_kind(o.negotiator);
  if (!kind) {
    err << "unknown negotiator '" << o.negotiator << "'\n";
    return kExitUsage;
  }
  sys.negotiator = *kind;
  try {
    sys.latency = parse_latency(o.latency);
  } catch (const std::invalid_argument & e) {
    err << e.what() << "\n";
    return kExitUsage;
  }
  if (!o.endpoint.empty()) {
    sys.endpoint.url = o.endpoint;
  }

  std::vector<SuiteTask> tasks;
  if (!o.scenario.empty()) {
    const auto type = parse_scenario_type(o.scenario);
    if (!type) {
      err << "unknown scenario type '" << o.scenario << "'\n";
      return kExitUsage;
    }
    SuiteTask t;
    t.entry.type = *type;
    t.entry.params = {o.vehicles, o.variant, o.obstacles};
    t.id = fmt::format("{}_00{}", o.scenario, o.obstacles ? "_obs" : "");
    tasks.push_back(t);
  } else {
    tasks = load_suite(o.suite.empty() ? default_suite_path() : fs::path(o.suite));
  }
  if (o.canonical) {
    tasks = canonical_subset(tasks);
  }

  std::vector<std::map<std::string, std::string>> snapshots;
  bool aborted = false;
  for (int r = 0; r < o.repeat; ++r) {
    fs::path dir;
    if (!o.out.empty()) {
      dir = o.repeat > 1 ? fs::path(o.out) / fmt::format("repeat_{}", r) : fs::path(o.out);
    }
    const auto run = run_suite(tasks, sys, o.seed, dir);
    for (const auto & t : run.report.tasks) {
      if (t.status == TaskStatus::ABORTED) {
        aborted = true;
        err << fmt::format("task {} aborted: {}\n", t.task_id, t.abort_reason);
      }
    }
    if (r == 0) {
      print_summary(out, run.report);
    }
    if (!dir.empty() && o.repeat > 1) {
      snapshots.push_back(snapshot(dir));
    }
  }
  if (snapshots.size() > 1) {
    const bool same = std::all_of(snapshots.begin() + 1, snapshots.end(), [&](const auto & s) {
      return s == snapshots.front();
    });
    out << "repeats identical: " << (same ? "yes" : "no") << "\n";
    if (!same) {
      return 1;
    }
  }
  return o.strict && aborted ? 1 : 0;
}

int do_score(const std::string & dir, std::ostream & out)
{
  const auto report = score_directory(dir);
  print_summary(out, report);
  const auto stored = fs::path(dir) / "report.json";
  if (fs::exists(stored)) {
    const bool same = read_file(stored) == to_json(report).dump(2) + "\n";
    out << "matches stored report: " << (same ? "yes" : "no") << "\n";
    return same ? 0 : 1;
  }
  return 0;
}

int do_gen(const RunOptions & o, std::ostream & out, std::ostream & err)
{
  std::vector<SuiteTask> tasks;
  if (!o.scenario.empty()) {
    const auto type = parse_scenario_type(o.scenario);
    if (!type) {
      err << "unknown scenario type '" << o.scenario << "'\n";
      return kExitUsage;
    }
    SuiteTask t;
    t.entry.type = *type;
    t.entry.params = {o.vehicles, o.variant, o.obstacles};
    t.id = fmt::format("{}_00{}", o.scenario, o.obstacles ? "_obs" : "");
    tasks.push_back(t);
  } else {
    tasks = load_suite(o.suite.empty() ? default_suite_path() : fs::path(o.suite));
  }
  for (const auto & t : tasks) {
    const auto text = to_json(scenario_for(t, o.seed)).dump(2) + "\n";
    if (o.out.empty()) {
      out << text;
    } else {
      write_text(fs::path(o.out) / (t.id + ".json"), text);
    }
  }
  if (!o.out.empty()) {
    out << fmt::format("wrote {} scenario files to {}\n", tasks.size(), o.out);
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string> & args, std::ostream & out, std::ostream & err)
{
  CLI::App app{"Cooperative driving negotiation benchmark"};
  app.require_subcommand(1);

  RunOptions ro;
  auto * run = app.add_subcommand("run", "Run a suite or a single scenario");
  auto * suite_opt = run->add_option("--suite", ro.suite, "Suite file (JSON list)");
  auto * scen_opt = run->add_option("--scenario", ro.scenario, "Single scenario type");
  suite_opt->excludes(scen_opt);
  run->add_option("--vehicles", ro.vehicles, "Vehicle count for --scenario")->check(CLI::Range(0, 8));
  run->add_option("--variant", ro.variant, "Layout rotation for --scenario")->check(CLI::Range(0, 3));
  run->add_flag("--obstacles", ro.obstacles, "Add obstacles for --scenario");
  run->add_flag("--canonical", ro.canonical, "Only the first plain task of each type");
  run->add_option("--negotiator", ro.negotiator, "rule, llm or none")
    ->check(CLI::IsMember({"rule", "llm", "none"}));
  run->add_option("--latency", ro.latency, "ideal, <ticks> or <min>-<max>");
  run->add_option("--seed", ro.seed, "Global seed");
  run->add_option("--out", ro.out, "Output directory");
  run->add_option("--repeat", ro.repeat, "Run the suite N times")->check(CLI::PositiveNumber);
  run->add_flag("--strict", ro.strict, "Exit nonzero when any task aborts");
  run->add_option("--endpoint", ro.endpoint, "Language model endpoint URL");

  std::string score_dir;
  auto * score = app.add_subcommand("score", "Recompute a report from task logs");
  score->add_option("dir", score_dir, "Run directory")->required();

  RunOptions go;
  auto * gen = app.add_subcommand("gen", "Write scenario files");
  auto * gsuite = gen->add_option("--suite", go.suite, "Suite file");
  auto * gscen = gen->add_option("--scenario", go.scenario, "Single scenario type");
  gsuite->excludes(gscen);
  gen->add_option("--vehicles", go.vehicles, "Vehicle count")->check(CLI::Range(0, 8));
  gen->add_option("--variant", go.variant, "Layout rotation")->check(CLI::Range(0, 3));
  gen->add_flag("--obstacles", go.obstacles, "Add obstacles");
  gen->add_option("--seed", go.seed, "Global seed");
  gen->add_option("--out", go.out, "Output directory (stdout when empty)");

  std::vector<const char *> argv;
  for (const auto & a : args) {
    argv.push_back(a.c_str());
  }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError & e) {
    err << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*run) {
      return do_run(ro, out, err);
    }
    if (*score) {
      return do_score(score_dir, out);
    }
    return do_gen(go, out, err);
  } catch (const std::invalid_argument & e) {
    err << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception & e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace coopdrive::bench
