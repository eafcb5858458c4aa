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

#include "coopdrive/negotiation.hpp"

#include "coopdrive/world.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace coopdrive
{

std::string_view to_string(Deficiency d)
{
  switch (d) {
    case Deficiency::CONSENSUS_LOW:
      return "CONSENSUS_LOW";
    case Deficiency::SAFETY_LOW:
      return "SAFETY_LOW";
    case Deficiency::EFFICIENCY_LOW:
      return "EFFICIENCY_LOW";
  }
  return "UNKNOWN";
}

std::map<AgentId, SpeedIntent> CriticFeedback::hints() const
{
  std::map<AgentId, SpeedIntent> out;
  for (const auto & c : criticisms) {
    for (const auto & [id, intent] : c.hints) {
      out.emplace(id, intent);
    }
  }
  return out;
}

std::string_view to_string(NegotiationOutcome o)
{
  switch (o) {
    case NegotiationOutcome::CONSENSUS:
      return "CONSENSUS";
    case NegotiationOutcome::ROUND_LIMIT:
      return "ROUND_LIMIT";
    case NegotiationOutcome::ABORTED:
      return "ABORTED";
  }
  return "UNKNOWN";
}

void NegotiationConfig::validate() const
{
  if (max_rounds < 1) {
    throw std::invalid_argument("max_rounds must be at least 1");
  }
  if (d_safe <= 0.0 || v_ref <= 0.0) {
    throw std::invalid_argument("d_safe and v_ref must be positive");
  }
  for (double t : {consensus_threshold, safety_threshold, efficiency_threshold}) {
    if (t < 0.0 || t > 100.0) {
      throw std::invalid_argument("score thresholds must lie in [0, 100]");
    }
  }
}

std::vector<NegotiationMessage> NegotiationTranscript::all_messages() const
{
  std::vector<NegotiationMessage> out;
  for (const auto & r : rounds) {
    out.insert(out.end(), r.messages.begin(), r.messages.end());
  }
  return out;
}

namespace
{

nlohmann::json intent_map_json(const std::map<AgentId, SpeedIntent> & m)
{
  nlohmann::json j = nlohmann::json::object();
  for (const auto & [id, s] : m) {
    j[std::to_string(to_int(id))] = std::string(to_string(s));
  }
  return j;
}

}  // namespace

nlohmann::json to_json(const NegotiationTranscript & t)
{
  nlohmann::json j;
  j["group"] = nlohmann::json::array();
  for (auto id : t.group) {
    j["group"].push_back(to_int(id));
  }
  j["outcome"] = std::string(to_string(t.outcome));
  if (!t.abort_reason.empty()) {
    j["abort_reason"] = t.abort_reason;
  }
  j["rounds"] = nlohmann::json::array();
  for (const auto & r : t.rounds) {
    nlohmann::json jr;
    jr["messages"] = nlohmann::json::array();
    for (const auto & m : r.messages) {
      nlohmann::json jm{
        {"sender", to_int(m.sender)},
        {"round", m.round},
        {"text", m.text},
        {"requests", intent_map_json(m.requests)},
        {"fallback", m.fallback},
      };
      jm["proposed_action"] =
        m.proposed_action ? nlohmann::json(std::string(to_string(*m.proposed_action))) : nullptr;
      if (!m.note.empty()) {
        jm["note"] = m.note;
      }
      jr["messages"].push_back(std::move(jm));
    }
    jr["action_summary"] = intent_map_json(r.action_summary);
    jr["scores"] = {
      {"consensus", r.scores.consensus},
      {"safety", r.scores.safety},
      {"efficiency", r.scores.efficiency},
    };
    nlohmann::json jf{{"converged", r.feedback.converged}, {"round", r.feedback.round}};
    jf["criticisms"] = nlohmann::json::array();
    for (const auto & c : r.feedback.criticisms) {
      jf["criticisms"].push_back(
        {{"tag", std::string(to_string(c.tag))}, {"detail", c.detail},
         {"hints", intent_map_json(c.hints)}});
    }
    jr["feedback"] = std::move(jf);
    jr["flags"] = r.flags;
    j["rounds"].push_back(std::move(jr));
  }
  nlohmann::json fi = nlohmann::json::object();
  for (const auto & [id, it] : t.final_intentions) {
    fi[std::to_string(to_int(id))] = {
      {"speed", std::string(to_string(it.speed))}, {"nav", std::string(to_string(it.nav))}};
  }
  j["final_intentions"] = std::move(fi);
  return j;
}

// ---------------------------------------------------------------------------

std::map<AgentId, SpeedIntent> LlmActionSummarizer::summarize(
  const std::vector<NegotiationMessage> & m)
{
  NegotiatorInput input;
  input.history = m;
  const std::string prompt = build_prompt(input, PromptKind::SUM_ACTIONS);
  try {
    return parse_action_summary(client_->complete(prompt));
  } catch (const EndpointError & e) {
    throw NegotiatorError(e.what());
  }
}

double rule_consensus_score(const std::vector<NegotiationMessage> & messages)
{
  std::map<AgentId, std::optional<SpeedIntent>> action;
  for (const auto & m : messages) {
    action[m.sender] = m.proposed_action;
  }
  double score = 100.0;
  for (const auto & m : messages) {
    for (const auto & [target, wanted] : m.requests) {
      const auto it = action.find(target);
      if (it == action.end() || !it->second || *it->second != wanted) {
        score -= 40.0;
      }
    }
  }
  // Mutual yield: both stop while asking the other to go on.
  const auto stops_and_waves = [&](const NegotiationMessage & a, AgentId b) {
    if (a.proposed_action != SpeedIntent::STOP) {
      return false;
    }
    const auto it = a.requests.find(b);
    return it != a.requests.end() && it->second != SpeedIntent::STOP;
  };
  for (std::size_t i = 0; i < messages.size(); ++i) {
    for (std::size_t j = i + 1; j < messages.size(); ++j) {
      if (
        stops_and_waves(messages[i], messages[j].sender) &&
        stops_and_waves(messages[j], messages[i].sender)) {
        score -= 30.0;
      }
    }
  }
  return std::clamp(score, 0.0, 100.0);
}

JudgeResult LlmConsensusJudge::judge(const std::vector<NegotiationMessage> & messages)
{
  NegotiatorInput input;
  input.history = messages;
  try {
    const std::string prompt = build_prompt(input, PromptKind::CONSENSUS_SCORE);
    return {parse_consensus_score(client_->complete(prompt)), false, {}};
  } catch (const std::exception & e) {
    return {rule_consensus_score(messages), true, fmt::format("judge fallback: {}", e.what())};
  }
}

// ---------------------------------------------------------------------------

std::vector<NegotiationMessage> run_round(
  const GroupView & group, const NegotiationTranscript & transcript,
  const std::map<AgentId, std::shared_ptr<Negotiator>> & negotiators)
{
  if (group.members.empty()) {
    throw std::invalid_argument("run_round needs a non-empty group");
  }
  const int round = static_cast<int>(transcript.rounds.size());
  std::vector<NegotiationMessage> history = transcript.all_messages();
  std::optional<CriticFeedback> suggestion;
  if (!transcript.rounds.empty()) {
    suggestion = transcript.rounds.back().feedback;
  }

  std::vector<MemberInfo> members = group.members;
  std::sort(members.begin(), members.end(), [](const auto & a, const auto & b) {
    return a.id < b.id;
  });

  std::vector<NegotiationMessage> out;
  for (const auto & ego : members) {
    const auto neg = negotiators.find(ego.id);
    if (neg == negotiators.end() || !neg->second) {
      throw std::invalid_argument(fmt::format("no negotiator for vehicle {}", to_int(ego.id)));
    }
    NegotiatorInput input;
    input.ego_id = ego.id;
    input.ego_speed = ego.speed;
    input.ego_intention = ego.intention;
    input.ego_position = ego.position;
    input.ego_maneuver = ego.maneuver;
    for (const auto & p : members) {
      if (p.id != ego.id) {
        input.peers.push_back(p);
      }
    }
    input.conflicts = group.conflicts;
    input.history = history;
    input.suggestion = suggestion;

    NegotiationMessage msg;
    try {
      msg = neg->second->negotiate(input);
    } catch (const std::exception & e) {
      msg = NegotiationMessage{};
      msg.proposed_action = SpeedIntent::KEEP;
      msg.text = "I will keep speed.";
      msg.fallback = true;
      msg.note = e.what();
    }
    msg.sender = ego.id;
    msg.round = round;
    history.push_back(msg);
    out.push_back(std::move(msg));
  }
  return out;
}

std::map<AgentId, SpeedIntent> sum_actions(
  const std::vector<NegotiationMessage> & messages, ActionSummarizer * summarizer,
  std::vector<std::string> * flags)
{
  std::map<AgentId, SpeedIntent> out;
  bool need_summary = false;
  for (const auto & m : messages) {
    if (m.proposed_action) {
      out[m.sender] = *m.proposed_action;
    } else {
      need_summary = true;
    }
  }
  if (!need_summary) {
    return out;
  }
  std::map<AgentId, SpeedIntent> summarized;
  if (summarizer != nullptr) {
    try {
      summarized = summarizer->summarize(messages);
    } catch (const std::exception & e) {
      if (flags != nullptr) {
        flags->push_back(fmt::format("summary fallback: {}", e.what()));
      }
    }
  }
  for (const auto & m : messages) {
    if (out.contains(m.sender)) {
      continue;
    }
    if (const auto it = summarized.find(m.sender); it != summarized.end()) {
      out[m.sender] = it->second;
    } else {
      out[m.sender] = SpeedIntent::KEEP;
      if (flags != nullptr) {
        flags->push_back(fmt::format("vehicle {} defaulted to KEEP", to_int(m.sender)));
      }
    }
  }
  return out;
}

double mean_plan_speed(const WaypointPlan & plan)
{
  if (plan.mean_speed >= 0.0) {
    return plan.mean_speed;
  }
  if (plan.points.size() < 2) {
    return plan.terminal_speed;
  }
  double length = 0.0;
  for (std::size_t k = 1; k < plan.points.size(); ++k) {
    length += distance(plan.points[k - 1], plan.points[k]);
  }
  return length / (static_cast<double>(plan.points.size() - 1) * plan.dt);
}

SafetyEfficiency safety_efficiency_scores(
  const std::map<AgentId, WaypointPlan> & plans, const NegotiationConfig & cfg)
{
  if (plans.empty()) {
    throw SimulationError("safety/efficiency scoring needs at least one plan");
  }
  const auto & ref = plans.begin()->second;
  for (const auto & [id, p] : plans) {
    if (p.points.empty()) {
      throw SimulationError(fmt::format("plan of vehicle {} is empty", to_int(id)));
    }
    if (p.start_tick != ref.start_tick || std::abs(p.dt - ref.dt) > 1e-12) {
      throw SimulationError(fmt::format("plan of vehicle {} is not time-aligned", to_int(id)));
    }
  }

  SafetyEfficiency out;
  double min_d = std::numeric_limits<double>::infinity();
  for (auto a = plans.begin(); a != plans.end(); ++a) {
    for (auto b = std::next(a); b != plans.end(); ++b) {
      const auto n = std::min(a->second.points.size(), b->second.points.size());
      for (std::size_t k = 0; k < n; ++k) {
        const double d = distance(a->second.points[k], b->second.points[k]);
        if (d < min_d) {
          min_d = d;
          out.closest_pair = std::make_pair(a->first, b->first);
        }
      }
    }
  }
  out.closest_distance = min_d;
  out.safety = out.closest_pair ? 100.0 * std::clamp(min_d / cfg.d_safe, 0.0, 1.0) : 100.0;

  double eff = 0.0;
  for (const auto & [id, p] : plans) {
    eff += std::clamp(mean_plan_speed(p) / cfg.v_ref, 0.0, 1.0);
  }
  out.efficiency = 100.0 * eff / static_cast<double>(plans.size());
  return out;
}

// ---------------------------------------------------------------------------

namespace
{

const MemberInfo * member(const GroupView & g, AgentId id)
{
  for (const auto & m : g.members) {
    if (m.id == id) {
      return &m;
    }
  }
  return nullptr;
}

bool outranks(const GroupView & g, AgentId a, AgentId b)
{
  const auto * ma = member(g, a);
  const auto * mb = member(g, b);
  if (ma == nullptr || mb == nullptr) {
    return a < b;
  }
  return has_priority(ma->maneuver, a, mb->maneuver, b);
}

/// True when `id` must give way to a conflicting member.
bool yields_to_someone(const GroupView & g, AgentId id)
{
  for (const auto & e : g.conflicts) {
    if (e.pair.first == id && outranks(g, e.pair.second, id)) {
      return true;
    }
    if (e.pair.second == id && outranks(g, e.pair.first, id)) {
      return true;
    }
  }
  return false;
}

SpeedIntent summary_of(const CriticContext & ctx, AgentId id)
{
  if (ctx.summary != nullptr) {
    if (const auto it = ctx.summary->find(id); it != ctx.summary->end()) {
      return it->second;
    }
  }
  return SpeedIntent::KEEP;
}

/// Replans the group under the current summary plus trial changes.
class Lookahead
{
public:
  Lookahead(const CriticContext & ctx, const NegotiationConfig & cfg) : g_(*ctx.group), cfg_(cfg)
  {
    for (const auto & m : g_.members) {
      intents_[m.id] = summary_of(ctx, m.id);
      plans_[m.id] = g_.plan(m.id, intents_[m.id]);
    }
    scores_ = safety_efficiency_scores(plans_, cfg_);
  }

  SpeedIntent intent(AgentId id) const { return intents_.at(id); }
  const SafetyEfficiency & scores() const { return scores_; }

  SafetyEfficiency trial(AgentId id, SpeedIntent s) const
  {
    auto plans = plans_;
    plans[id] = g_.plan(id, s);
    return safety_efficiency_scores(plans, cfg_);
  }

  void commit(AgentId id, SpeedIntent s)
  {
    intents_[id] = s;
    plans_[id] = g_.plan(id, s);
    scores_ = safety_efficiency_scores(plans_, cfg_);
  }

private:
  const GroupView & g_;
  const NegotiationConfig & cfg_;
  std::map<AgentId, SpeedIntent> intents_;
  std::map<AgentId, WaypointPlan> plans_;
  SafetyEfficiency scores_;
};

/// Greedy speed-ups that never lower the planned safety score. Agents that
/// yield to nobody go first, then by right of way. Without a planner only the
/// agents that yield to nobody are stepped up.
std::map<AgentId, SpeedIntent> safe_step_ups(const CriticContext & ctx, const NegotiationConfig & cfg)
{
  const GroupView & g = *ctx.group;
  std::map<AgentId, SpeedIntent> hints;
  if (!g.plan) {
    for (const auto & m : g.members) {
      if (!yields_to_someone(g, m.id)) {
        hints[m.id] = shift_speed_intent(summary_of(ctx, m.id), +1);
      }
    }
    return hints;
  }
  std::vector<AgentId> order;
  for (const auto & m : g.members) {
    order.push_back(m.id);
  }
  std::stable_sort(order.begin(), order.end(), [&](AgentId a, AgentId b) {
    const bool ya = yields_to_someone(g, a);
    const bool yb = yields_to_someone(g, b);
    if (ya != yb) {
      return !ya;
    }
    return outranks(g, a, b);
  });

  try {
    Lookahead look(ctx, cfg);
    bool changed = true;
    while (changed && look.scores().efficiency < cfg.efficiency_threshold) {
      changed = false;
      for (AgentId id : order) {
        // Smallest speed-up that actually raises efficiency; a vehicle at
        // rest gains nothing from KEEP.
        for (SpeedIntent up = look.intent(id); up != SpeedIntent::FASTER;) {
          up = shift_speed_intent(up, +1);
          const auto s = look.trial(id, up);
          if (s.safety < look.scores().safety) {
            break;
          }
          if (s.efficiency > look.scores().efficiency) {
            look.commit(id, up);
            hints[id] = up;
            changed = true;
            break;
          }
        }
        if (look.scores().efficiency >= cfg.efficiency_threshold) {
          break;
        }
      }
    }
  } catch (const std::exception &) {
    return {};
  }
  return hints;
}

/// Member of the closest pair that should slow down. The lower-priority agent
/// yields unless replanning shows the other one yielding is strictly safer.
/// With a planner, a yield that would lower min(S_c, S_s, S_e) is rejected and
/// nothing is returned.
std::optional<AgentId> safety_yielder(
  const CriticContext & ctx, const ScoreTriple & scores, const NegotiationConfig & cfg)
{
  const auto [a, b] = *ctx.closest_pair;
  const AgentId low = outranks(*ctx.group, a, b) ? b : a;
  const AgentId high = low == a ? b : a;
  if (!ctx.group->plan) {
    return low;
  }
  try {
    const Lookahead look(ctx, cfg);
    const double floor = scores.min();
    std::optional<AgentId> best;
    double best_safety = look.scores().safety;
    for (AgentId id : {low, high}) {
      const auto s = look.trial(id, shift_speed_intent(look.intent(id), -1));
      const double predicted = std::min({scores.consensus, s.safety, s.efficiency});
      if (predicted >= floor && s.safety > best_safety) {
        best = id;
        best_safety = s.safety;
      }
    }
    return best;
  } catch (const std::exception &) {
    return low;
  }
}

}  // namespace

CriticFeedback criticize(
  const ScoreTriple & scores, const NegotiationConfig & cfg, const CriticContext * ctx)
{
  CriticFeedback fb;
  const bool c_ok = scores.consensus >= cfg.consensus_threshold;
  const bool s_ok = scores.safety >= cfg.safety_threshold;
  const bool e_ok = scores.efficiency >= cfg.efficiency_threshold;
  fb.converged = c_ok && s_ok && e_ok;
  if (fb.converged) {
    return fb;
  }
  const bool with_hints = ctx != nullptr && ctx->group != nullptr;

  if (!s_ok) {
    Criticism c{Deficiency::SAFETY_LOW, {}, fmt::format("safety {:.1f} < {:.1f}", scores.safety,
                                                        cfg.safety_threshold)};
    if (with_hints && ctx->closest_pair) {
      auto [a, b] = *ctx->closest_pair;
      if (const auto low = safety_yielder(*ctx, scores, cfg)) {
        c.hints[*low] = shift_speed_intent(summary_of(*ctx, *low), -1);
        c.detail += fmt::format("; vehicles {} and {} closest, vehicle {} should yield", to_int(a),
                                to_int(b), to_int(*low));
      } else {
        c.detail += fmt::format(
          "; vehicles {} and {} closest, no single yield helps", to_int(a), to_int(b));
      }
    }
    fb.criticisms.push_back(std::move(c));
  }
  if (!c_ok) {
    Criticism c{Deficiency::CONSENSUS_LOW, {}, fmt::format("consensus {:.1f} < {:.1f}",
                                                           scores.consensus,
                                                           cfg.consensus_threshold)};
    if (with_hints && ctx->messages != nullptr) {
      for (const auto & m : *ctx->messages) {
        for (const auto & [target, wanted] : m.requests) {
          if (summary_of(*ctx, target) == wanted || member(*ctx->group, target) == nullptr) {
            continue;
          }
          if (outranks(*ctx->group, m.sender, target)) {
            c.hints.emplace(target, wanted);
          }
        }
      }
    }
    fb.criticisms.push_back(std::move(c));
  }
  if (!e_ok) {
    Criticism c{Deficiency::EFFICIENCY_LOW, {}, fmt::format("efficiency {:.1f} < {:.1f}",
                                                            scores.efficiency,
                                                            cfg.efficiency_threshold)};
    if (with_hints && s_ok) {
      c.hints = safe_step_ups(*ctx, cfg);
      if (c.hints.empty()) {
        c.detail += "; no speed-up keeps the group safe";
      }
    }
    fb.criticisms.push_back(std::move(c));
  }

  if (with_hints && !fb.criticisms.empty()) {
    const auto fresh = fb.hints();
    for (const auto & [id, intent] : ctx->carried_hints) {
      if (!fresh.contains(id)) {
        fb.criticisms.front().hints[id] = intent;
      }
    }
  }
  return fb;
}

NegotiationTranscript negotiate(
  const GroupView & group, const NegotiationStack & stack, const NegotiationConfig & cfg)
{
  cfg.validate();
  if (group.members.size() < 2) {
    throw std::invalid_argument("negotiation needs a group of at least two vehicles");
  }
  RuleConsensusJudge default_judge;
  ConsensusJudge * judge = stack.judge ? stack.judge.get() : &default_judge;

  NegotiationTranscript t;
  for (const auto & m : group.members) {
    t.group.push_back(m.id);
  }
  std::sort(t.group.begin(), t.group.end());

  std::map<AgentId, SpeedIntent> carried;
  for (int r = 0; r < cfg.max_rounds; ++r) {
    RoundRecord rec;
    rec.messages = run_round(group, t, stack.negotiators);
    rec.action_summary = sum_actions(rec.messages, stack.summarizer.get(), &rec.flags);

    std::map<AgentId, WaypointPlan> plans;
    try {
      for (const auto & [id, intent] : rec.action_summary) {
        plans.emplace(id, group.plan(id, intent));
      }
    } catch (const std::exception & e) {
      t.rounds.push_back(std::move(rec));
      t.outcome = NegotiationOutcome::ABORTED;
      t.abort_reason = e.what();
      t.final_intentions.clear();
      for (const auto & m : group.members) {
        t.final_intentions[m.id] = Intention{SpeedIntent::STOP, m.intention.nav};
      }
      return t;
    }

    const auto se = safety_efficiency_scores(plans, cfg);
    const auto verdict = judge->judge(rec.messages);
    if (verdict.fallback) {
      rec.flags.push_back(verdict.note);
    }
    rec.scores = ScoreTriple{verdict.score, se.safety, se.efficiency};

    CriticContext ctx;
    ctx.group = &group;
    ctx.messages = &rec.messages;
    ctx.summary = &rec.action_summary;
    ctx.closest_pair = se.closest_pair;
    ctx.carried_hints = carried;
    rec.feedback = criticize(rec.scores, cfg, &ctx);
    rec.feedback.round = r;
    for (const auto & [id, intent] : rec.feedback.hints()) {
      carried[id] = intent;
    }
    const bool done = rec.feedback.converged;
    t.rounds.push_back(std::move(rec));
    if (done) {
      break;
    }
  }

  const auto & last = t.rounds.back();
  t.outcome =
    last.feedback.converged ? NegotiationOutcome::CONSENSUS : NegotiationOutcome::ROUND_LIMIT;
  for (const auto & m : group.members) {
    const auto it = last.action_summary.find(m.id);
    t.final_intentions[m.id] =
      Intention{it != last.action_summary.end() ? it->second : SpeedIntent::KEEP, m.intention.nav};
  }
  return t;
}

}  // namespace coopdrive
