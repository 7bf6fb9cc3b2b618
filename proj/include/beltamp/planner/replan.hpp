#pragma once

#include <beltamp/belief/particle_filter.hpp>
#include <beltamp/belief/semantic_update.hpp>
#include <beltamp/log.hpp>
#include <beltamp/planner/search.hpp>
#include <beltamp/priors/llm_priors.hpp>
#include <beltamp/sim/executor.hpp>

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace beltamp::planner {

enum class UpdateMode { bayes, bayes_comodel, lgbu };

NLOHMANN_JSON_SERIALIZE_ENUM(UpdateMode, {{UpdateMode::bayes, "bayes"},
                                          {UpdateMode::bayes_comodel, "bayes+comodel"},
                                          {UpdateMode::lgbu, "lgbu"}})

struct ReplanConfig {
  PlannerConfig planner;
  sim::ExecConfig exec;
  belief::NoiseParams noise;
  UpdateMode mode = UpdateMode::bayes;
  std::size_t replan_cap = 100;
  /// Charge planning as expansions * seconds_per_expansion instead of wall
  /// clock, so traces are reproducible.
  bool deterministic_timing = true;
  double seconds_per_expansion = 1e-3;
  bool full_snapshots = false;  ///< include particle sets in belief snapshots
};

/// One detect as executed.
struct DetectRecord {
  std::size_t iteration = 0;
  ObjectId object;
  SurfaceId surface;
  RoomId room;
  bool success = false;
  double visibility = 0.0;  ///< surface visibility of the target's particles
  std::vector<std::string> co_detected;
};

struct PlanIteration {
  std::string trigger;  ///< "initial" or the failure that caused this replan
  bool plan_found = false;
  std::vector<ActionInstance> plan;
  double plan_cost = 0.0;
  std::vector<ActionInstance> executed;  ///< as run, after rebinding to detected poses
  std::optional<std::size_t> failure_index;  ///< into executed
  std::string failure_reason;
  std::size_t expansions = 0;
  double planning_s = 0.0;
  double execution_s = 0.0;
  nlohmann::json beliefs;  ///< snapshot at planning time, keyed by object label
};

struct PlanTrace {
  std::vector<PlanIteration> iterations;
  std::vector<DetectRecord> detects;
  std::size_t replans = 0;
  bool solved = false;
  std::string status;  ///< solved | replan_cap | planning_failure

  double planning_s() const {
    double t = 0.0;
    for (const auto& it : iterations) t += it.planning_s;
    return t;
  }
  double execution_s() const {
    double t = 0.0;
    for (const auto& it : iterations) t += it.execution_s;
    return t;
  }
  double cumulative_s() const { return planning_s() + execution_s(); }
};

inline nlohmann::json to_json(const PlanTrace& t, const sim::EnvironmentSpec& env) {
  using nlohmann::json;
  json its = json::array();
  for (const auto& it : t.iterations) {
    json plan = json::array();
    for (const auto& a : it.plan) plan.push_back(a.describe(env));
    json ex = json::array();
    for (const auto& a : it.executed) ex.push_back(to_json(a));
    json j{{"trigger", it.trigger},         {"plan_found", it.plan_found},   {"plan", plan},
           {"plan_cost", it.plan_cost},     {"executed", ex},                {"expansions", it.expansions},
           {"planning_s", it.planning_s},   {"execution_s", it.execution_s}, {"beliefs", it.beliefs}};
    if (it.failure_index) {
      j["failure_index"] = *it.failure_index;
      j["failure_reason"] = it.failure_reason;
    }
    its.push_back(std::move(j));
  }
  json dets = json::array();
  for (const auto& d : t.detects)
    dets.push_back({{"iteration", d.iteration},
                    {"object", env.object(d.object).label},
                    {"surface", env.surface(d.surface).label},
                    {"room", env.room(d.room).label},
                    {"success", d.success},
                    {"visibility", d.visibility},
                    {"co_detected", d.co_detected}});
  return {{"iterations", its},
          {"detects", dets},
          {"replans", t.replans},
          {"solved", t.solved},
          {"status", t.status},
          {"planning_s", t.planning_s()},
          {"execution_s", t.execution_s()},
          {"cumulative_s", t.cumulative_s()}};
}

/// Language-model access for LGBU updates.
struct LgbuContext {
  priors::Provider* provider = nullptr;
};

namespace detail {

inline nlohmann::json snapshot(const belief::HierarchicalBelief& b, bool full) {
  if (full) return belief::to_json(b);
  return {{"room_belief", b.room_belief()}, {"surface_belief", b.surface_beliefs()}};
}

inline bool same_belief(const belief::HierarchicalBelief& a, const belief::HierarchicalBelief& b) {
  return a.room_belief() == b.room_belief() && a.surface_beliefs() == b.surface_beliefs() &&
         a.all_particles() == b.all_particles();
}

/// Regenerate the moves of a plan suffix so every action starts where the
/// previous one left the robot.
inline std::vector<ActionInstance> repair_moves(const std::vector<ActionInstance>& rest, Pose2 base,
                                                const sim::EnvironmentSpec& env, double move_cost_per_m) {
  std::vector<ActionInstance> out;
  for (const auto& a : rest) {
    if (a.kind == ActionKind::move) continue;
    if (!(a.bq == base)) {
      ActionInstance m;
      m.kind = ActionKind::move;
      m.bq_from = base;
      m.bq = a.bq;
      const auto d = env.try_nav_distance(base.position(), a.bq.position());
      m.cost = std::max(1e-6, move_cost_per_m * d.value_or(0.0));
      out.push_back(m);
      base = a.bq;
    }
    out.push_back(a);
  }
  return out;
}

/// LGBU replacement of the room level and the inspected room's surface level.
inline void lgbu_categorical_update(belief::HierarchicalBelief& b, const sim::EnvironmentSpec& env,
                                    const ActionInstance& detect, const belief::ObservationEvent& ev,
                                    const std::vector<std::string>& co_detected, priors::Provider& provider) {
  const std::string& object = env.object(b.object()).label;
  const bool found = ev.target_detected();

  std::vector<std::string> rooms;
  for (std::size_t r = 0; r < env.num_rooms(); ++r) rooms.push_back(env.room(RoomId{r}).label);
  if (rooms.size() > 1) {
    priors::LgbuObservation obs{env.room(detect.room).label, ev.visibility.room(detect.room), found,
                                co_detected};
    b.set_room_belief(priors::lgbu_update(object, rooms, b.room_belief(), obs, provider, priors::Level::room));
  }

  const auto& members = b.layout().room_surfaces[detect.room.value];
  if (members.size() > 1) {
    std::vector<std::string> labels;
    for (const SurfaceId s : members) labels.push_back(env.surface(s).label);
    priors::LgbuObservation obs{env.surface(detect.surface).label, ev.visibility.surface(detect.surface),
                                found, co_detected};
    b.set_surface_belief(detect.room, priors::lgbu_update(object, labels, b.surface_belief(detect.room), obs, provider,
                                                          priors::Level::surface, env.room(detect.room).label));
  }
}

}  // namespace detail

/// Belief update after a detect, per update mode. Returns the new belief.
inline belief::HierarchicalBelief update_after_detect(const belief::HierarchicalBelief& b,
                                                      const sim::EnvironmentSpec& env, const ActionInstance& detect,
                                                      const belief::ObservationEvent& ev,
                                                      const belief::SimilarityMatrix* sims, const ReplanConfig& cfg,
                                                      const LgbuContext& lgbu, Rng& rng) {
  const belief::SimilarityMatrix* co = cfg.mode == UpdateMode::bayes_comodel ? sims : nullptr;
  belief::HierarchicalBelief next = b;
  if (cfg.mode == UpdateMode::lgbu) {
    expects(lgbu.provider != nullptr, "LGBU updates need a provider");
    std::vector<std::string> co_detected;
    for (const auto& d : ev.detections)
      if (d.object != b.object()) co_detected.push_back(env.object(d.object).label);
    detail::lgbu_categorical_update(next, env, detect, ev, co_detected, *lgbu.provider);
  } else {
    try {
      next = belief::update_semantic_belief(b, ev, co, cfg.noise);
    } catch (const DegenerateUpdate& e) {
      log_warning(std::string("semantic update degenerate, reseeding: ") + e.what());
      belief::reseed_semantic_levels(next);
    }
  }
  // Surfaces whose every particle was seen are re-seeded by the filter; their
  // categorical mass already carries the miss.
  next = belief::particle_filter_step(next, ev, co, cfg.noise, rng);
  return next;
}

/// Plan, execute, observe, update and replan until the goals hold or the
/// replan cap is reached.
///
/// A detect that does not report the target (including one that only sees
/// other objects) and any other failed action end the iteration and count as
/// one replan. A successful detect rebinds the rest of the plan to the
/// detected pose without a replan.
inline PlanTrace execute_and_replan(const sim::EnvironmentSpec& env, const std::vector<Goal>& goals,
                                    SymbolicState state, sim::WorldState& world,
                                    std::map<ObjectId, belief::HierarchicalBelief>& beliefs,
                                    const belief::SimilarityMatrix* sims, const ReplanConfig& cfg,
                                    sim::DetectorNoise& noise, Rng& rng, const LgbuContext& lgbu = {}) {
  expects(cfg.replan_cap >= 1, "replan cap must be at least 1");
  PlanTrace trace;
  std::string trigger = "initial";
  // (target, co-detected object, surface) triples already fed to the co-model.
  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> used_codetections;
  for (std::size_t iter = 0;; ++iter) {
    PlanIteration it;
    it.trigger = trigger;
    std::map<ObjectId, const belief::HierarchicalBelief*> views;
    it.beliefs = nlohmann::json::object();
    for (const auto& [o, b] : beliefs) {
      views[o] = &b;
      it.beliefs[env.object(o).label] = detail::snapshot(b, cfg.full_snapshots);
    }

    const PlanResult pr = plan(env, state, goals, views, cfg.planner, rng.fork(iter));
    it.plan_found = pr.found;
    it.plan = pr.actions;
    it.plan_cost = pr.cost;
    it.expansions = pr.expansions;
    it.planning_s = cfg.deterministic_timing ? static_cast<double>(pr.expansions) * cfg.seconds_per_expansion
                                             : pr.wall_s;
    if (!pr.found) {
      trace.iterations.push_back(std::move(it));
      trace.status = "planning_failure";
      return trace;
    }

    std::vector<ActionInstance> queue = pr.actions;
    for (std::size_t k = 0; k < queue.size(); ++k) {
      const ActionInstance a = queue[k];
      const belief::HierarchicalBelief* target = nullptr;
      if (a.kind == ActionKind::detect) target = &beliefs.at(a.object);
      sim::ActionOutcome out = sim::execute_action(env, world, a, target, noise, cfg.exec);
      it.executed.push_back(a);
      it.execution_s += out.duration_s;

      if (a.kind == ActionKind::move && out.success) state.base = a.bq;
      if (a.kind == ActionKind::pick && out.success) {
        state.holding = a.object;
        state.objects[a.object.value] = {ObjectStatus::held, {}, {}};
      }
      if (a.kind == ActionKind::pick && !out.success) state.objects[a.object.value] = {};
      if (a.kind == ActionKind::place && out.success) {
        state.holding.reset();
        state.objects[a.object.value] = {ObjectStatus::located, a.surface, a.pb};
      }
      if (a.kind == ActionKind::detect) {
        const auto& ev = out.detection->event;
        DetectRecord rec{iter, a.object, a.surface, a.room, out.success,
                         ev.visibility.surface(a.surface), {}};
        for (const auto& d : ev.detections)
          if (d.object != a.object) rec.co_detected.push_back(env.object(d.object).label);
        trace.detects.push_back(rec);

        const bool informative = !ev.uninformative();
        expects(informative, "detect produced no information; replanning on it is not allowed");
        // A static object seen again where it was seen before says nothing new
        // about the target, so only first sightings reach the co-model.
        belief::ObservationEvent fresh = ev;
        if (cfg.mode == UpdateMode::bayes_comodel)
          std::erase_if(fresh.detections, [&](const belief::Detection& d) {
            if (d.object == a.object) return false;
            return !used_codetections.insert({a.object.value, d.object.value, d.surface.value}).second;
          });
        if (fresh.uninformative()) fresh = ev;
        belief::HierarchicalBelief updated = update_after_detect(*target, env, a, fresh, sims, cfg, lgbu, rng);
        expects(!detail::same_belief(updated, *target), "belief unchanged after an informative detect");
        beliefs.at(a.object) = std::move(updated);

        if (out.success) {
          const auto det = ev.detection_of(a.object);
          state.objects[a.object.value] = {ObjectStatus::located, det->surface, det->pose};
          std::vector<ActionInstance> rest(queue.begin() + static_cast<std::ptrdiff_t>(k) + 1, queue.end());
          bool reachable = true;
          for (auto& r : rest) {
            if (r.object != a.object || r.kind != ActionKind::pick) continue;
            const auto q = reach_config(env, det->pose, r.bq, cfg.planner.reach);
            if (!q) {
              reachable = false;
              break;
            }
            r.pb = det->pose;
            r.surface = det->surface;
            r.room = env.surface(det->surface).room;
            r.bq = *q;
          }
          if (!reachable) {
            out.success = false;
            out.reason = "no base configuration reaches the detected pose";
          } else {
            rest = detail::repair_moves(rest, state.base, env, cfg.planner.move_cost_per_m);
            queue.resize(k + 1);
            queue.insert(queue.end(), rest.begin(), rest.end());
          }
        }
      }
      if (!out.success) {
        it.failure_index = it.executed.size() - 1;
        it.failure_reason = out.reason;
        break;
      }
    }
    const bool done = std::all_of(goals.begin(), goals.end(), [&](const Goal& g) { return g.satisfied(state); });
    trace.iterations.push_back(std::move(it));
    if (done) {
      trace.solved = true;
      trace.status = "solved";
      return trace;
    }
    if (trace.replans == cfg.replan_cap) {
      trace.status = "replan_cap";
      return trace;
    }
    ++trace.replans;
    const auto& last = trace.iterations.back();
    trigger = last.failure_index ? last.failure_reason : "plan ended without reaching the goal";
  }
}

}  // namespace beltamp::planner
