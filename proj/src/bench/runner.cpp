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

#include "coopdrive/bench/runner.hpp"

#include "coopdrive/bench/metrics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>

namespace coopdrive::bench
{

std::string_view to_string(NegotiatorKind k)
{
  switch (k) {
    case NegotiatorKind::RULE:
      return "rule";
    case NegotiatorKind::LLM:
      return "llm";
    case NegotiatorKind::NONE:
      return "none";
  }
  return "?";
}

std::optional<NegotiatorKind> parse_negotiator_kind(std::string_view text)
{
  for (auto k : {NegotiatorKind::RULE, NegotiatorKind::LLM, NegotiatorKind::NONE}) {
    if (to_string(k) == text) {
      return k;
    }
  }
  return std::nullopt;
}

void LatencyModel::validate() const
{
  if (min_ticks < 0 || max_ticks < min_ticks) {
    throw std::invalid_argument(
      fmt::format("latency range [{}, {}] is invalid", min_ticks, max_ticks));
  }
}

int LatencyModel::draw(std::mt19937_64 & rng) const
{
  if (mode == LatencyMode::IDEAL) {
    return 0;
  }
  const auto span = static_cast<std::uint64_t>(max_ticks - min_ticks + 1);
  return min_ticks + static_cast<int>(rng() % span);
}

std::string LatencyModel::describe() const
{
  if (mode == LatencyMode::IDEAL) {
    return "ideal";
  }
  if (min_ticks == max_ticks) {
    return std::to_string(min_ticks);
  }
  return fmt::format("{}-{}", min_ticks, max_ticks);
}

LatencyModel parse_latency(std::string_view text)
{
  LatencyModel m;
  if (text == "ideal") {
    return m;
  }
  const auto parse_int = [&](std::string_view part) {
    int v = 0;
    const auto res = std::from_chars(part.data(), part.data() + part.size(), v);
    if (res.ec != std::errc{} || res.ptr != part.data() + part.size()) {
      throw std::invalid_argument(fmt::format("bad latency '{}'", text));
    }
    return v;
  };
  m.mode = LatencyMode::LATENCY_AWARE;
  if (const auto dash = text.find('-'); dash != std::string_view::npos) {
    m.min_ticks = parse_int(text.substr(0, dash));
    m.max_ticks = parse_int(text.substr(dash + 1));
  } else {
    m.min_ticks = m.max_ticks = parse_int(text);
  }
  m.validate();
  return m;
}

double PenaltyConfig::factor(ObstacleClass c) const
{
  switch (c) {
    case ObstacleClass::PEDESTRIAN:
      return pedestrian;
    case ObstacleClass::VEHICLE:
      return vehicle;
    case ObstacleClass::STATIC:
      return static_object;
  }
  return 1.0;
}

nlohmann::json SystemConfig::to_json() const
{
  return {
    {"negotiator", std::string(to_string(negotiator))},
    {"latency", latency.describe()},
    {"guidance_period", guidance_period},
    {"dt", dt},
    {"grouping",
     {{"theta", grouping.theta},
      {"horizon", grouping.horizon},
      {"conflict_radius", grouping.conflict_radius},
      {"history_ttl", grouping.history_ttl},
      {"waypoints", grouping_waypoints}}},
    {"negotiation",
     {{"T_c", negotiation.consensus_threshold},
      {"T_s", negotiation.safety_threshold},
      {"T_e", negotiation.efficiency_threshold},
      {"max_rounds", negotiation.max_rounds},
      {"d_safe", negotiation.d_safe},
      {"v_ref", negotiation.v_ref}}},
    {"penalties",
     {{"pedestrian", penalties.pedestrian},
      {"vehicle", penalties.vehicle},
      {"static", penalties.static_object}}},
    {"sensing_radius", sensing_radius},
    {"zone_width", zone_width},
    {"deadlock_time", deadlock_time},
  };
}

std::string_view to_string(TaskStatus s)
{
  switch (s) {
    case TaskStatus::COMPLETED:
      return "COMPLETED";
    case TaskStatus::TIME_LIMIT:
      return "TIME_LIMIT";
    case TaskStatus::DEADLOCK:
      return "DEADLOCK";
    case TaskStatus::ABORTED:
      return "ABORTED";
  }
  return "?";
}

std::optional<TaskStatus> parse_task_status(std::string_view text)
{
  for (auto s : {TaskStatus::COMPLETED, TaskStatus::TIME_LIMIT, TaskStatus::DEADLOCK,
                 TaskStatus::ABORTED}) {
    if (to_string(s) == text) {
      return s;
    }
  }
  return std::nullopt;
}

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRunout = 100.0;  // m of straight road assumed past a route end

using Pair = std::pair<AgentId, AgentId>;

struct Zone
{
  double entry = 0.0;
  double exit = 0.0;
};

/// First stretch of route a that runs within `width` of route b.
std::optional<Zone> conflict_zone(const Route & a, const Route & b, double width)
{
  constexpr double kStep = 0.5;
  std::optional<Zone> z;
  for (double s = 0.0; s <= a.total_length(); s += kStep) {
    const bool near = b.project(a.point_at(s)).lateral < width;
    if (near) {
      if (!z) {
        z = Zone{s, s};
      }
      z->exit = s;
    } else if (z) {
      break;
    }
  }
  return z;
}

struct LiveEdge
{
  ConflictEdge edge;
  std::int64_t detected_at = 0;
};

struct PendingResult
{
  std::int64_t apply_tick = 0;
  std::map<AgentId, SpeedIntent> intents;
  std::vector<AgentId> members;
};

nlohmann::json point_json(const Vec2 & p) { return nlohmann::json::array({p.x, p.y}); }

class TaskRunner
{
public:
  TaskRunner(const ScenarioConfig & cfg, const SystemConfig & sys, std::string task_id)
  : cfg_(cfg), sys_(sys), task_id_(std::move(task_id)), rng_(cfg.seed),
    history_(sys.grouping.history_ttl)
  {
    sys_.grouping.validate();
    sys_.negotiation.validate();
    sys_.latency.validate();
    if (sys_.guidance_period < 1) {
      throw std::invalid_argument("guidance period must be at least one tick");
    }
    world_ = cfg_.initial_world(sys_.dt);
    for (const auto & v : cfg_.vehicles) {
      test_ids_.push_back(v.id);
      cruise_[v.id] = v.cruise_speed;
      maneuver_[v.id] = v.route->maneuver();
      auto line = v.route->polyline();
      const double end_s = v.route->total_length();
      line.push_back(v.route->point_at(end_s) + unit_from_heading(v.route->heading_at(end_s)) * kRunout);
      extended_[v.id] = std::make_shared<const Route>(line, v.route->lane_width(), v.route->maneuver());
      lateral_.emplace(v.id, PidController(kLateralGains));
      longitudinal_.emplace(v.id, PidController(kLongitudinalGains));
    }
    for (const auto & a : cfg_.vehicles) {
      for (const auto & b : cfg_.vehicles) {
        if (a.id == b.id) {
          continue;
        }
        if (auto z = conflict_zone(*a.route, *b.route, sys_.zone_width)) {
          zones_[{a.id, b.id}] = *z;
        }
      }
    }
    for (const auto & [key, z] : zones_) {
      const auto rev = zones_.find({key.second, key.first});
      if (z.entry <= 0.0 && rev != zones_.end() && rev->second.entry <= 0.0) {
        shared_lane_.insert(std::minmax(key.first, key.second));
      }
    }
    if (sys_.negotiator != NegotiatorKind::NONE) {
      build_stack();
    }
  }

  TaskRun run()
  {
    TaskRun out;
    out.result.task_id = task_id_;
    out.result.type = cfg_.type;
    log_header();

    const auto max_ticks = static_cast<std::int64_t>(std::llround(cfg_.time_limit / sys_.dt));
    const auto deadlock_ticks =
      static_cast<std::int64_t>(std::llround(sys_.deadlock_time / sys_.dt));
    std::int64_t still_ticks = 0;
    TaskStatus status = TaskStatus::TIME_LIMIT;
    std::string reason;
    try {
      while (true) {
        if (all_finished()) {
          status = TaskStatus::COMPLETED;
          break;
        }
        if (world_.tick >= max_ticks) {
          status = TaskStatus::TIME_LIMIT;
          break;
        }
        if (still_ticks >= deadlock_ticks) {
          status = TaskStatus::DEADLOCK;
          break;
        }
        log_states();
        tick();
        still_ticks = all_still() ? still_ticks + 1 : 0;
      }
    } catch (const std::exception & e) {
      status = TaskStatus::ABORTED;
      reason = e.what();
    }
    log_states();

    auto & r = out.result;
    for (AgentId id : test_ids_) {
      r.vehicle_rc.push_back(route_progress(world_.vehicle(id)));
    }
    r.infractions = infractions_;
    r.ticks_used = world_.tick;
    r.status = status;
    r.abort_reason = reason;
    for (std::size_t k = 0; k < negotiations_.size(); ++k) {
      r.transcript_refs.push_back(fmt::format("{}#{}", task_id_, k));
    }
    finalize_result(r, sys_.penalties);

    nlohmann::json end{
      {"type", "end"},
      {"tick", world_.tick},
      {"status", std::string(to_string(status))},
    };
    if (!reason.empty()) {
      end["reason"] = reason;
    }
    emit(end);
    out.log_lines = std::move(log_);
    out.negotiations = std::move(negotiations_);
    return out;
  }

private:
  // --- setup -------------------------------------------------------------

  void build_stack()
  {
    std::shared_ptr<Negotiator> member;
    if (sys_.negotiator == NegotiatorKind::RULE) {
      member = std::make_shared<RuleBasedNegotiator>();
      stack_.judge = std::make_shared<RuleConsensusJudge>();
    } else {
      auto client = sys_.client ? sys_.client : std::make_shared<HttpEndpointClient>(sys_.endpoint);
      member = std::make_shared<FallbackNegotiator>(std::make_shared<LlmNegotiator>(client));
      stack_.summarizer = std::make_shared<LlmActionSummarizer>(client);
      stack_.judge = std::make_shared<LlmConsensusJudge>(client);
    }
    for (AgentId id : test_ids_) {
      stack_.negotiators[id] = member;
    }
  }

  // --- logging -----------------------------------------------------------

  void emit(const nlohmann::json & j) { log_.push_back(j.dump()); }

  void log_header()
  {
    nlohmann::json ids = nlohmann::json::array();
    for (AgentId id : test_ids_) {
      ids.push_back(to_int(id));
    }
    emit({
      {"type", "header"},
      {"task", task_id_},
      {"scenario_type", std::string(to_string(cfg_.type))},
      {"category", std::string(category_of(cfg_.type))},
      {"seed", cfg_.seed},
      {"system", sys_.to_json()},
      {"test_vehicles", ids},
      {"scenario", to_json(cfg_)},
    });
  }

  void log_states()
  {
    for (const auto & v : world_.vehicles) {
      const auto it = effective_.find(v.id);
      const SpeedIntent intent = it != effective_.end() ? it->second : v.intention.speed;
      emit({
        {"type", "state"},
        {"tick", world_.tick},
        {"id", to_int(v.id)},
        {"x", v.position.x},
        {"y", v.position.y},
        {"heading", v.heading},
        {"speed", v.speed},
        {"intent", std::string(to_string(intent))},
        {"progress", v.route ? route_progress(v) : 0.0},
        {"finished", v.finished},
      });
    }
  }

  // --- perception helpers -----------------------------------------------

  bool all_finished() const
  {
    return std::all_of(test_ids_.begin(), test_ids_.end(), [&](AgentId id) {
      return world_.vehicle(id).finished;
    });
  }

  bool all_still() const
  {
    return std::all_of(test_ids_.begin(), test_ids_.end(), [&](AgentId id) {
      const auto & v = world_.vehicle(id);
      return v.finished || v.speed < sys_.deadlock_speed;
    });
  }

  std::vector<AgentId> active_ids() const
  {
    std::vector<AgentId> out;
    for (AgentId id : test_ids_) {
      if (!world_.vehicle(id).finished) {
        out.push_back(id);
      }
    }
    return out;
  }

  /// Bumper gap to the nearest same-direction agent ahead on the route.
  double lead_gap(const VehicleState & me) const
  {
    constexpr double kCorridor = 1.6;
    constexpr double kLookahead = 50.0;
    constexpr double kMaxHeadingGap = 1.0;
    const Route & r = *me.route;
    const double s_me = me.route_progress;
    double best = kInf;
    for (const auto & o : world_.vehicles) {
      if (o.id == me.id || o.finished || distance(o.position, me.position) > kLookahead + 10.0) {
        continue;
      }
      const auto pr = r.project(o.position, s_me, s_me + kLookahead);
      if (pr.lateral > kCorridor || pr.s <= s_me + 1e-6) {
        continue;
      }
      if (std::abs(normalize_angle(o.heading - r.heading_at(pr.s))) > kMaxHeadingGap) {
        continue;
      }
      best = std::min(best, pr.s - s_me - 0.5 * (me.length + o.length));
    }
    return best;
  }

  double density(const VehicleState & me) const
  {
    int n = 0;
    for (const auto & o : world_.vehicles) {
      if (o.id != me.id && !o.finished &&
          distance(o.position, me.position) <= sys_.sensing_radius) {
        ++n;
      }
    }
    return n;
  }

  /// Car-following constraint, if the lead vehicle demands one.
  std::optional<SpeedIntent> follow_constraint(const VehicleState & v, double gap) const
  {
    const double stop_need = 2.0 + v.speed * v.speed / 10.0 + 0.3 * v.speed;
    if (gap < stop_need) {
      return SpeedIntent::STOP;
    }
    if (gap < 2.0 + 1.0 * v.speed) {
      return SpeedIntent::SLOWER;
    }
    return std::nullopt;
  }

  /// Stand-in for the intention planner: keep cruise speed and follow.
  SpeedIntent base_intention(const VehicleState & v, double gap) const
  {
    if (auto f = follow_constraint(v, gap)) {
      return *f;
    }
    const double cruise = cruise_.at(v.id);
    if (v.speed < cruise - 0.5) {
      return SpeedIntent::FASTER;
    }
    if (v.speed > cruise + 0.5) {
      return SpeedIntent::SLOWER;
    }
    return SpeedIntent::KEEP;
  }

  /// Distance from my front bumper to the entry of the zone I share with a
  /// conflicting peer; nothing once I am already inside it.
  std::optional<double> zone_distance(const VehicleState & me, AgentId peer) const
  {
    const auto it = zones_.find({me.id, peer});
    if (it == zones_.end()) {
      return std::nullopt;
    }
    const double front = me.route_progress + 0.5 * me.length;
    if (front >= it->second.entry) {
      return std::nullopt;
    }
    return it->second.entry - front;
  }

  EnvContext env_for(const VehicleState & v, SpeedIntent intent) const
  {
    EnvContext env;
    env.sigma = density(v);
    double x = lead_gap(v);
    if (intent == SpeedIntent::STOP || intent == SpeedIntent::SLOWER) {
      for (const auto & [pair, live] : live_) {
        AgentId peer{};
        if (pair.first == v.id) {
          peer = pair.second;
        } else if (pair.second == v.id) {
          peer = pair.first;
        } else {
          continue;
        }
        if (auto d = zone_distance(v, peer)) {
          x = std::min(x, *d);
        }
      }
    }
    env.x = std::min(x, sys_.sensing_radius);
    return env;
  }

  Intention intention_of(AgentId id, SpeedIntent s) const
  {
    return Intention{s, world_.vehicle(id).intention.nav};
  }

  WaypointPlan plan_for(AgentId id, SpeedIntent s, const PlannerConfig & pc) const
  {
    const auto & v = world_.vehicle(id);
    return generate_plan(v, intention_of(id, s), *v.route, env_for(v, s), pc, world_.tick);
  }

  /// Prediction along the route extended past its end, so vehicles about to
  /// finish do not pile up on the endpoint.
  WaypointPlan predict_for(AgentId id, SpeedIntent s, const PlannerConfig & pc) const
  {
    VehicleState v = world_.vehicle(id);
    v.route = extended_.at(id);
    return generate_plan(v, intention_of(id, s), *v.route, env_for(v, s), pc, world_.tick);
  }

  // --- conflict bookkeeping --------------------------------------------

  bool cleared(AgentId me, AgentId peer) const
  {
    const auto it = zones_.find({me, peer});
    if (it == zones_.end()) {
      return true;
    }
    const auto & v = world_.vehicle(me);
    const double rear = v.route_progress - 0.5 * v.length;
    return v.finished ||
           rear > std::min(it->second.exit, it->second.entry + sys_.zone_clear);
  }

  bool negotiable(const Pair & p) const
  {
    return zones_.contains(p) && zones_.contains({p.second, p.first}) &&
           !shared_lane_.contains(p) && !cleared(p.first, p.second) &&
           !cleared(p.second, p.first);
  }

  void prune_live_edges()
  {
    std::erase_if(live_, [&](const auto & kv) { return !negotiable(kv.first); });
    std::set<AgentId> linked;
    for (const auto & [pair, live] : live_) {
      linked.insert(pair.first);
      linked.insert(pair.second);
    }
    std::erase_if(negotiated_, [&](const auto & kv) { return !linked.contains(kv.first); });
  }

  std::vector<ConflictEdge> edges_now(const std::vector<AgentId> & members) const
  {
    const std::set<AgentId> in(members.begin(), members.end());
    std::vector<ConflictEdge> out;
    for (const auto & [pair, live] : live_) {
      if (!in.contains(pair.first) || !in.contains(pair.second)) {
        continue;
      }
      ConflictEdge e = live.edge;
      const double elapsed = static_cast<double>(world_.tick - live.detected_at) * sys_.dt;
      e.first_conflict_time = std::max(0.0, e.first_conflict_time - elapsed);
      out.push_back(e);
    }
    return out;
  }

  // --- guidance (low frequency) -----------------------------------------

  void guidance(const std::map<AgentId, SpeedIntent> & base)
  {
    const auto ids = active_ids();
    PlannerConfig long_cfg = sys_.planner;
    long_cfg.num_waypoints = sys_.grouping_waypoints;
    long_cfg.dt = sys_.dt;
    std::map<AgentId, WaypointPlan> nominal;
    for (AgentId id : ids) {
      nominal.emplace(id, predict_for(id, base.at(id), long_cfg));
    }
    world_.broadcasts = nominal;

    std::vector<ConflictEdge> detected;
    for (const auto & e : conflict_edges(ids, nominal, sys_.grouping)) {
      if (negotiable(e.pair)) {
        detected.push_back(e);
        live_[e.pair] = LiveEdge{e, world_.tick};
      }
    }
    const GroupSet current = groups_from_edges(ids, detected, world_.tick);
    const GroupSet & groups = history_.update(current, world_.tick);
    nlohmann::json jg = nlohmann::json::array();
    for (const auto & g : groups.groups) {
      nlohmann::json members = nlohmann::json::array();
      for (AgentId id : g) {
        members.push_back(to_int(id));
      }
      jg.push_back(members);
    }
    emit({{"type", "groups"}, {"tick", world_.tick}, {"groups", jg}});

    if (sys_.negotiator == NegotiatorKind::NONE) {
      return;
    }
    std::vector<ConflictEdge> live_edges;
    for (const auto & [pair, live] : live_) {
      live_edges.push_back(live.edge);
    }
    const GroupSet negotiating = groups_from_edges(ids, live_edges, world_.tick);
    for (const auto & g : negotiating.groups) {
      const bool busy = std::any_of(g.begin(), g.end(), [&](AgentId id) {
        return pending_members_.contains(id);
      });
      if (!busy && group_active(g, base, long_cfg)) {
        negotiate_group(g);
      }
    }
  }

  /// A settled group is renegotiated only when its membership changes or the
  /// policy it is executing still produces a conflict.
  bool group_active(
    const std::vector<AgentId> & g, const std::map<AgentId, SpeedIntent> & base,
    const PlannerConfig & long_cfg) const
  {
    for (AgentId id : g) {
      const auto it = settled_with_.find(id);
      if (!negotiated_.contains(id) || it == settled_with_.end() || it->second != g) {
        return true;
      }
    }
    std::map<AgentId, WaypointPlan> executing;
    for (AgentId id : g) {
      const auto it = effective_.find(id);
      executing.emplace(
        id, predict_for(id, it != effective_.end() ? it->second : base.at(id), long_cfg));
    }
    return !conflict_edges(g, executing, sys_.grouping).empty();
  }

  void negotiate_group(const std::vector<AgentId> & members)
  {
    GroupView view;
    for (AgentId id : members) {
      const auto & v = world_.vehicle(id);
      MemberInfo m;
      m.id = id;
      m.position = v.position;
      m.speed = v.speed;
      m.intention = intention_of(id, effective_.contains(id) ? effective_.at(id) : v.intention.speed);
      m.maneuver = maneuver_.at(id);
      view.members.push_back(m);
    }
    view.conflicts = edges_now(members);
    // Safety is judged over the grouping horizon, efficiency over the
    // horizon the controller actually tracks.
    PlannerConfig pc = sys_.planner;
    pc.dt = sys_.dt;
    PlannerConfig long_pc = pc;
    long_pc.num_waypoints = sys_.grouping_waypoints;
    view.plan = [this, pc, long_pc](AgentId id, SpeedIntent s) {
      auto plan = predict_for(id, s, long_pc);
      plan.mean_speed = predict_for(id, s, pc).mean_speed;
      return plan;
    };

    NegotiationRecord rec;
    rec.tick = world_.tick;
    rec.transcript = negotiate(view, stack_, sys_.negotiation);
    const int drawn = sys_.latency.draw(rng_);
    rec.apply_tick = world_.tick + drawn;

    PendingResult pending;
    pending.apply_tick = rec.apply_tick;
    pending.members = members;
    for (const auto & [id, it] : rec.transcript.final_intentions) {
      pending.intents[id] = it.speed;
    }
    nlohmann::json jm = nlohmann::json::array();
    for (AgentId id : members) {
      jm.push_back(to_int(id));
    }
    emit({
      {"type", "negotiation"},
      {"tick", rec.tick},
      {"apply_tick", rec.apply_tick},
      {"group", jm},
      {"outcome", std::string(to_string(rec.transcript.outcome))},
      {"rounds", rec.transcript.rounds.size()},
      {"transcript", negotiations_.size()},
    });
    negotiations_.push_back(std::move(rec));
    if (drawn == 0) {
      apply(pending);
    } else {
      for (AgentId id : members) {
        pending_members_.insert(id);
      }
      pending_.push_back(std::move(pending));
    }
  }

  void apply(const PendingResult & p)
  {
    for (const auto & [id, s] : p.intents) {
      negotiated_[id] = s;
      settled_with_[id] = p.members;
    }
  }

  void apply_due_results()
  {
    std::vector<PendingResult> keep;
    for (auto & p : pending_) {
      if (p.apply_tick <= world_.tick) {
        apply(p);
        for (AgentId id : p.members) {
          pending_members_.erase(id);
        }
      } else {
        keep.push_back(std::move(p));
      }
    }
    pending_ = std::move(keep);
  }

  // --- one simulation tick ---------------------------------------------

  void tick()
  {
    apply_due_results();
    prune_live_edges();

    const auto ids = active_ids();
    std::map<AgentId, SpeedIntent> base;
    std::map<AgentId, std::optional<SpeedIntent>> follow;
    for (AgentId id : ids) {
      const auto & v = world_.vehicle(id);
      const double gap = lead_gap(v);
      base[id] = base_intention(v, gap);
      follow[id] = follow_constraint(v, gap);
    }

    const bool guidance_tick = world_.tick % sys_.guidance_period == 0;
    if (guidance_tick) {
      guidance(base);
      prune_live_edges();
    }

    effective_.clear();
    for (AgentId id : ids) {
      SpeedIntent s = base.at(id);
      if (const auto it = negotiated_.find(id); it != negotiated_.end()) {
        s = it->second == SpeedIntent::KEEP ? base.at(id) : it->second;
        if (follow.at(id)) {
          s = std::min(s, *follow.at(id));
        }
      }
      effective_[id] = s;
    }

    PlannerConfig pc = sys_.planner;
    pc.dt = sys_.dt;
    std::map<AgentId, ControlCommand> controls;
    for (AgentId id : ids) {
      const auto plan = plan_for(id, effective_.at(id), pc);
      if (guidance_tick) {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto & p : plan.points) {
          pts.push_back(point_json(p));
        }
        emit({{"type", "plan"}, {"tick", world_.tick}, {"id", to_int(id)}, {"points", pts}});
      }
      controls[id] = plan_to_control(
        plan, world_.vehicle(id), lateral_.at(id), longitudinal_.at(id), sys_.controller);
    }

    for (auto & v : world_.vehicles) {
      if (const auto it = effective_.find(v.id); it != effective_.end()) {
        v.intention.speed = it->second;
      }
    }
    world_ = step_world(world_, controls, sys_.dt, sys_.world);

    for (const auto & ev : tracker_.detect(world_)) {
      infractions_.push_back(ev);
      emit({
        {"type", "collision"},
        {"tick", ev.tick},
        {"ids", {to_int(ev.ids.first), to_int(ev.ids.second)}},
        {"class", to_string(ev.obstacle_class)},
      });
    }
  }

  const ScenarioConfig & cfg_;
  SystemConfig sys_;
  std::string task_id_;
  std::mt19937_64 rng_;
  GroupHistory history_;
  WorldState world_;
  std::vector<AgentId> test_ids_;
  std::map<AgentId, double> cruise_;
  std::map<AgentId, Maneuver> maneuver_;
  std::map<AgentId, RouteRef> extended_;  // route plus a straight runout, for prediction only
  std::map<AgentId, PidController> lateral_;
  std::map<AgentId, PidController> longitudinal_;
  std::map<Pair, Zone> zones_;
  std::set<Pair> shared_lane_;
  std::map<Pair, LiveEdge> live_;
  std::map<AgentId, SpeedIntent> negotiated_;
  std::map<AgentId, std::vector<AgentId>> settled_with_;  // group of the applied result
  std::map<AgentId, SpeedIntent> effective_;
  std::vector<PendingResult> pending_;
  std::set<AgentId> pending_members_;
  NegotiationStack stack_;
  CollisionTracker tracker_;
  std::vector<CollisionEvent> infractions_;
  std::vector<NegotiationRecord> negotiations_;
  std::vector<std::string> log_;
};

}  // namespace

TaskRun run_task(const ScenarioConfig & config, const SystemConfig & sys, const std::string & task_id)
{
  TaskRunner runner(config, sys, task_id);
  return runner.run();
}

nlohmann::json transcripts_json(const TaskRun & run)
{
  nlohmann::json out = nlohmann::json::array();
  for (const auto & n : run.negotiations) {
    nlohmann::json j = to_json(n.transcript);
    j["tick"] = n.tick;
    j["apply_tick"] = n.apply_tick;
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace coopdrive::bench
