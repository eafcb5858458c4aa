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

#include "coopdrive/grouping.hpp"

#include "coopdrive/world.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <set>

namespace coopdrive
{

void GroupingConfig::validate() const
{
  if (!(theta > 0.0 && theta < 1.0)) {
    throw SimulationError(fmt::format("grouping theta {} outside (0, 1)", theta));
  }
  if (!(horizon > 0.0)) {
    throw SimulationError("grouping horizon must be positive");
  }
  if (!(conflict_radius > 0.0)) {
    throw SimulationError("conflict radius must be positive");
  }
}

PlanRisk plan_risk(const WaypointPlan & a, const WaypointPlan & b, const GroupingConfig & cfg)
{
  if (a.dt != b.dt || a.start_tick != b.start_tick) {
    throw SimulationError(fmt::format(
      "plans are not time-aligned (dt {} vs {}, start {} vs {})", a.dt, b.dt, a.start_tick,
      b.start_tick));
  }
  PlanRisk out;
  const std::size_t n = std::min(a.points.size(), b.points.size());
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k + 1) * a.dt;
    if (t > cfg.horizon + 1e-9) {
      break;
    }
    const double d = distance(a.points[k], b.points[k]);
    const double r = std::clamp((cfg.conflict_radius - d) / cfg.conflict_radius, 0.0, 1.0);
    if (r > 0.0 && !out.first_conflict_time) {
      out.first_conflict_time = t;
    }
    out.risk = std::max(out.risk, r);
  }
  return out;
}

std::optional<ConflictEdge> pairwise_risk(
  AgentId i, const WaypointPlan & plan_i, AgentId j, const WaypointPlan & plan_j,
  const GroupingConfig & cfg)
{
  const PlanRisk r = plan_risk(plan_i, plan_j, cfg);
  if (r.risk < cfg.theta) {
    return std::nullopt;
  }
  return ConflictEdge{std::minmax(i, j), r.risk, r.first_conflict_time.value_or(0.0)};
}

GroupSet GroupSet::from_groups(std::vector<std::vector<AgentId>> groups, std::int64_t formed_at)
{
  GroupSet out;
  out.formed_at = formed_at;
  for (auto & g : groups) {
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
  }
  std::erase_if(groups, [](const auto & g) { return g.size() < 2; });
  std::sort(groups.begin(), groups.end());
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    for (AgentId id : groups[gi]) {
      if (!out.member_index.emplace(id, gi).second) {
        throw SimulationError(fmt::format("agent {} appears in two groups", to_int(id)));
      }
    }
  }
  out.groups = std::move(groups);
  return out;
}

std::vector<ConflictEdge> conflict_edges(
  const std::vector<AgentId> & vehicles, const std::map<AgentId, WaypointPlan> & plans,
  const GroupingConfig & cfg)
{
  std::vector<AgentId> ids = vehicles;
  std::sort(ids.begin(), ids.end());
  for (AgentId id : ids) {
    if (!plans.contains(id)) {
      throw SimulationError(fmt::format("agent {} has no plan for grouping", to_int(id)));
    }
  }
  std::vector<ConflictEdge> edges;
  for (std::size_t a = 0; a < ids.size(); ++a) {
    for (std::size_t b = a + 1; b < ids.size(); ++b) {
      if (auto e = pairwise_risk(ids[a], plans.at(ids[a]), ids[b], plans.at(ids[b]), cfg)) {
        edges.push_back(*e);
      }
    }
  }
  return edges;
}

GroupSet instant_groups(
  const std::vector<AgentId> & vehicles, const std::map<AgentId, WaypointPlan> & plans,
  const GroupingConfig & cfg, std::int64_t tick)
{
  return groups_from_edges(vehicles, conflict_edges(vehicles, plans, cfg), tick);
}

GroupSet groups_from_edges(
  const std::vector<AgentId> & vehicles, const std::vector<ConflictEdge> & edges,
  std::int64_t tick)
{
  const std::set<AgentId> listed(vehicles.begin(), vehicles.end());
  std::map<AgentId, std::vector<AgentId>> adj;
  for (const auto & e : edges) {
    if (!listed.contains(e.pair.first) || !listed.contains(e.pair.second)) {
      continue;
    }
    adj[e.pair.first].push_back(e.pair.second);
    adj[e.pair.second].push_back(e.pair.first);
  }
  for (auto & [id, nbrs] : adj) {
    std::sort(nbrs.begin(), nbrs.end());
  }

  std::vector<AgentId> ids = vehicles;
  std::sort(ids.begin(), ids.end());
  std::set<AgentId> visited;
  std::vector<std::vector<AgentId>> groups;
  for (AgentId root : ids) {
    if (visited.contains(root)) {
      continue;
    }
    std::vector<AgentId> component;
    std::vector<AgentId> stack{root};
    visited.insert(root);
    while (!stack.empty()) {
      const AgentId cur = stack.back();
      stack.pop_back();
      component.push_back(cur);
      const auto it = adj.find(cur);
      if (it == adj.end()) {
        continue;
      }
      for (auto nb = it->second.rbegin(); nb != it->second.rend(); ++nb) {
        if (visited.insert(*nb).second) {
          stack.push_back(*nb);
        }
      }
    }
    groups.push_back(std::move(component));
  }
  return GroupSet::from_groups(std::move(groups), tick);
}

GroupSet merge_temporal(const GroupSet & history, const GroupSet & current)
{
  // Union-find over every agent that appears in either set.
  std::map<AgentId, AgentId> parent;
  const auto find = [&parent](AgentId x) {
    AgentId root = x;
    while (parent.at(root) != root) {
      root = parent.at(root);
    }
    while (parent.at(x) != root) {
      const AgentId next = parent.at(x);
      parent[x] = root;
      x = next;
    }
    return root;
  };
  const auto unite = [&](AgentId a, AgentId b) {
    a = find(a);
    b = find(b);
    if (a != b) {
      parent[std::max(a, b)] = std::min(a, b);
    }
  };
  for (const GroupSet * set : {&history, &current}) {
    for (const auto & g : set->groups) {
      for (AgentId id : g) {
        parent.try_emplace(id, id);
      }
      for (std::size_t k = 1; k < g.size(); ++k) {
        unite(g[0], g[k]);
      }
    }
  }
  std::map<AgentId, std::vector<AgentId>> buckets;
  for (const auto & [id, p] : parent) {
    buckets[find(id)].push_back(id);
  }
  std::vector<std::vector<AgentId>> groups;
  for (auto & [root, members] : buckets) {
    groups.push_back(std::move(members));
  }
  return GroupSet::from_groups(std::move(groups), std::max(history.formed_at, current.formed_at));
}

const GroupSet & GroupHistory::update(const GroupSet & current, std::int64_t tick)
{
  for (const auto & g : current.groups) {
    for (AgentId id : g) {
      last_conflict_[id] = tick;
    }
  }
  GroupSet merged = merge_temporal(groups_, current);
  std::vector<std::vector<AgentId>> kept;
  for (auto & g : merged.groups) {
    const bool alive = std::any_of(g.begin(), g.end(), [&](AgentId id) {
      return tick - last_conflict_.at(id) <= ttl_;
    });
    if (alive) {
      kept.push_back(std::move(g));
    }
  }
  groups_ = GroupSet::from_groups(std::move(kept), tick);
  return groups_;
}

}  // namespace coopdrive
