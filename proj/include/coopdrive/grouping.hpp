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

#ifndef COOPDRIVE__GROUPING_HPP_
#define COOPDRIVE__GROUPING_HPP_

#include "coopdrive/intention.hpp"
#include "coopdrive/waypoint_plan.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace coopdrive
{

struct GroupingConfig
{
  double theta = 0.5;            // risk threshold for an edge
  double horizon = 4.0;          // seconds of plan considered
  double conflict_radius = 4.0;  // metres; risk is 0 beyond it
  std::int64_t history_ttl = 50; // ticks a conflict-free member keeps its group alive

  void validate() const;
};

/// Risk of two time-aligned plans regardless of the edge threshold.
struct PlanRisk
{
  double risk = 0.0;
  std::optional<double> first_conflict_time;  // seconds into the plan
};

PlanRisk plan_risk(const WaypointPlan & a, const WaypointPlan & b, const GroupingConfig & cfg);

struct ConflictEdge
{
  std::pair<AgentId, AgentId> pair;  // ascending
  double risk = 0.0;
  double first_conflict_time = 0.0;

  bool operator==(const ConflictEdge &) const = default;
};

/// Edge between agents i and j when the plan risk reaches theta.
std::optional<ConflictEdge> pairwise_risk(
  AgentId i, const WaypointPlan & plan_i, AgentId j, const WaypointPlan & plan_j,
  const GroupingConfig & cfg);

/// Disjoint groups of size >= 2, each sorted, ordered by smallest member.
struct GroupSet
{
  std::vector<std::vector<AgentId>> groups;
  std::int64_t formed_at = 0;
  std::map<AgentId, std::size_t> member_index;

  static GroupSet from_groups(std::vector<std::vector<AgentId>> groups, std::int64_t formed_at);

  bool empty() const { return groups.empty(); }
  bool contains(AgentId id) const { return member_index.contains(id); }
  /// Groups compare equal when they partition the same agents the same way.
  bool same_partition(const GroupSet & other) const { return groups == other.groups; }
};

std::vector<ConflictEdge> conflict_edges(
  const std::vector<AgentId> & vehicles, const std::map<AgentId, WaypointPlan> & plans,
  const GroupingConfig & cfg);

/// Connected components of the conflict graph found by id-ordered DFS.
GroupSet instant_groups(
  const std::vector<AgentId> & vehicles, const std::map<AgentId, WaypointPlan> & plans,
  const GroupingConfig & cfg, std::int64_t tick = 0);

/// Connected components of an explicit edge list, same traversal as
/// instant_groups. Edges touching unlisted vehicles are ignored.
GroupSet groups_from_edges(
  const std::vector<AgentId> & vehicles, const std::vector<ConflictEdge> & edges,
  std::int64_t tick = 0);

/// Union of both sets with intersecting groups merged until disjoint.
GroupSet merge_temporal(const GroupSet & history, const GroupSet & current);

/// Rolling grouping state: merges each tick's groups into history and drops
/// groups whose members have all been conflict-free for longer than the ttl.
class GroupHistory
{
public:
  explicit GroupHistory(std::int64_t ttl) : ttl_(ttl) {}

  const GroupSet & update(const GroupSet & current, std::int64_t tick);
  const GroupSet & groups() const { return groups_; }

private:
  std::int64_t ttl_;
  GroupSet groups_;
  std::map<AgentId, std::int64_t> last_conflict_;
};

}  // namespace coopdrive

#endif  // COOPDRIVE__GROUPING_HPP_
