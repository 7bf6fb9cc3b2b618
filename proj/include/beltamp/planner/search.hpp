#pragma once

#include <beltamp/action.hpp>
#include <beltamp/belief/particle_filter.hpp>
#include <beltamp/planner/streams.hpp>
#include <beltamp/planner/symbolic.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <vector>

namespace beltamp::planner {

struct PlannerConfig {
  std::size_t top_b = 5;            ///< candidate surfaces per object, by joint mass
  std::size_t pose_samples = 3;     ///< sample-PoseB draws per candidate surface
  std::size_t views_per_pose = 2;   ///< inverse-visibility results kept per pose
  double move_cost_per_m = 1.0;
  double manipulation_cost = 1.0;
  double c_a = 1.0;
  double reach = 0.8;
  std::size_t node_budget = 200000;
  sim::SensorConfig sensor;
  ViewSearch views;
};

/// Object-pose hypothesis with the base configuration that can grasp it.
struct PoseBinding {
  ObjectId object;
  SurfaceId surface;
  Pose2 pb;
  std::size_t pick_config = 0;
  bool has_pick = false;
};

struct DetectBinding {
  ObjectId object;
  SurfaceId surface;
  RoomId room;
  std::size_t binding = 0;  ///< into bindings
  std::size_t config = 0;   ///< into configs
  ViewConfig view;
  double mass = 0.0;
  double cost = 0.0;
};

struct PlaceBinding {
  ObjectId object;
  SurfaceId surface;
  RoomId room;
  Pose2 pb;
  std::size_t config = 0;
};

/// Everything the search needs, with streams already evaluated.
struct GroundedProblem {
  std::vector<Pose2> configs;  ///< 0 is the robot's current base
  std::vector<std::vector<double>> move_cost;
  std::vector<PoseBinding> bindings;
  std::vector<DetectBinding> detects;
  std::vector<PlaceBinding> places;
  std::vector<Goal> goals;
  std::vector<ObjectId> task_objects;  ///< objects named by goals, in goal order
  std::vector<int> init_status;        ///< per task object, see SearchState
  std::optional<ObjectId> init_holding;
  double manipulation_cost = 1.0;
};

/// One step of a grounded plan, by index into the problem's tables.
struct GroundedStep {
  ActionKind kind = ActionKind::move;
  std::size_t index = 0;  ///< target config (move), detect, binding (pick) or place
  double cost = 0.0;
  std::vector<std::size_t> ordinal;  ///< tie-break key
};

namespace detail {

inline std::size_t add_config(GroundedProblem& p, Pose2 q) {
  for (std::size_t i = 0; i < p.configs.size(); ++i)
    if (distance(p.configs[i].position(), q.position()) < 1e-9 && std::abs(p.configs[i].yaw - q.yaw) < 1e-9) return i;
  p.configs.push_back(q);
  return p.configs.size() - 1;
}

}  // namespace detail

/// Evaluate the streams for the current beliefs and build the grounded problem.
///
/// For each unknown goal object the top-B surfaces by joint room/surface mass
/// get `pose_samples` sample-PoseB draws; each pose gets up to
/// `views_per_pose` inverse-visibility configurations. A detect's mass is the
/// room and surface belief times the particle weight its sweep would see;
/// views seeing no particles are dropped.
inline GroundedProblem ground(const sim::EnvironmentSpec& env, const SymbolicState& st, const std::vector<Goal>& goals,
                              const std::map<ObjectId, const belief::HierarchicalBelief*>& beliefs,
                              const PlannerConfig& cfg, const Rng& rng) {
  GroundedProblem p;
  p.goals = goals;
  p.manipulation_cost = cfg.manipulation_cost;
  p.configs.push_back(st.base);
  p.init_holding = st.holding;

  for (const auto& g : goals)
    if (std::find(p.task_objects.begin(), p.task_objects.end(), g.object) == p.task_objects.end())
      p.task_objects.push_back(g.object);

  for (const ObjectId o : p.task_objects) {
    const auto& status = st.objects.at(o.value);
    if (status.kind == ObjectStatus::held) {
      p.init_status.push_back(-2);
      continue;
    }
    if (status.kind == ObjectStatus::located) {
      PoseBinding b{o, status.surface, status.pose, 0, false};
      if (auto q = reach_config(env, status.pose, st.base, cfg.reach)) {
        b.pick_config = detail::add_config(p, *q);
        b.has_pick = true;
      }
      p.bindings.push_back(b);
      p.init_status.push_back(static_cast<int>(p.bindings.size() - 1));
      continue;
    }
    p.init_status.push_back(-1);
    auto it = beliefs.find(o);
    expects(it != beliefs.end() && it->second, "no belief for an unknown goal object");
    const auto& b = *it->second;

    std::vector<SurfaceId> ranked;
    for (std::size_t s = 0; s < env.num_surfaces(); ++s) ranked.push_back(SurfaceId{s});
    std::stable_sort(ranked.begin(), ranked.end(),
                     [&](SurfaceId a, SurfaceId c) { return b.surface_mass(a) > b.surface_mass(c); });
    ranked.resize(std::min(ranked.size(), cfg.top_b));
    std::sort(ranked.begin(), ranked.end());

    for (const SurfaceId s : ranked) {
      if (!(b.surface_mass(s) > 0.0)) continue;
      const RoomId r = env.surface(s).room;
      Rng srng = rng.fork(o.value * 1000003ULL + s.value);
      for (std::size_t k = 0; k < cfg.pose_samples; ++k) {
        Pose2 pb;
        try {
          pb = sample_pose_b(b, s, srng);
        } catch (const StreamFailure&) {
          break;
        }
        auto views = view_candidates(env, cfg.sensor, pb, s, cfg.views);
        if (views.empty()) continue;
        PoseBinding pbind{o, s, pb, 0, false};
        const std::size_t bi = p.bindings.size();
        std::size_t kept = 0;
        for (const auto& v : views) {
          if (kept == cfg.views_per_pose) break;
          const auto mask = sim::visible_surface_particles(env, cfg.sensor, v.bq, v.ht, b.particles(s));
          if (std::find(mask.begin(), mask.end(), true) == mask.end()) continue;
          const double mass = belief::joint_belief_mass(b, r, s, mask);
          if (!(mass > 0.0)) continue;
          if (kept == 0) {
            if (auto q = reach_config(env, pb, v.bq, cfg.reach)) {
              pbind.pick_config = detail::add_config(p, *q);
              pbind.has_pick = true;
            }
            p.bindings.push_back(pbind);
          }
          DetectBinding d{o, s, r, bi, detail::add_config(p, v.bq), v, mass, detect_cost_from_mass(mass, cfg.c_a)};
          p.detects.push_back(std::move(d));
          ++kept;
        }
      }
    }
  }

  for (const auto& g : goals) {
    if (g.kind != Goal::at) continue;
    const Rect& f = env.surface(g.surface).footprint;
    const Pose2 pb{f.center().x, f.center().y, 0.0};
    const Vec2 a = env.approach_point(g.surface);
    if (auto q = reach_config(env, pb, Pose2{a.x, a.y, 0.0}, cfg.reach))
      p.places.push_back({g.object, g.surface, env.surface(g.surface).room, pb, detail::add_config(p, *q)});
  }

  const std::size_t n = p.configs.size();
  p.move_cost.assign(n, std::vector<double>(n, std::numeric_limits<double>::infinity()));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (auto d = env.try_nav_distance(p.configs[i].position(), p.configs[j].position()))
        p.move_cost[i][j] = std::max(1e-6, cfg.move_cost_per_m * *d);
    }
  return p;
}

/// Search state: [config, holding task-object slot or -1, status per task object].
/// Status: -1 unknown, b >= 0 located at binding b, -2 held, -3 - p placed by place p.
using SearchState = std::vector<int>;

inline SearchState initial_search_state(const GroundedProblem& p) {
  SearchState s{0, -1};
  if (p.init_holding)
    for (std::size_t i = 0; i < p.task_objects.size(); ++i)
      if (p.task_objects[i] == *p.init_holding) s[1] = static_cast<int>(i);
  s.insert(s.end(), p.init_status.begin(), p.init_status.end());
  return s;
}

inline bool goal_reached(const GroundedProblem& p, const SearchState& s) {
  for (const auto& g : p.goals) {
    const std::size_t i = static_cast<std::size_t>(
        std::find(p.task_objects.begin(), p.task_objects.end(), g.object) - p.task_objects.begin());
    const int st = s[2 + i];
    if (g.kind == Goal::found) {
      if (st == -1) return false;
      continue;
    }
    if (st >= 0) {
      if (p.bindings[static_cast<std::size_t>(st)].surface != g.surface) return false;
    } else if (st <= -3) {
      if (p.places[static_cast<std::size_t>(-3 - st)].surface != g.surface) return false;
    } else {
      return false;
    }
  }
  return true;
}

/// Applicable steps and their successor states.
inline void successors(const GroundedProblem& p, const SearchState& s,
                       const std::function<void(const GroundedStep&, SearchState)>& emit) {
  const std::size_t at = static_cast<std::size_t>(s[0]);
  // A held object that is not a task object keeps the hand busy for good.
  const bool foreign_held = p.init_holding && std::find(p.task_objects.begin(), p.task_objects.end(),
                                                        *p.init_holding) == p.task_objects.end();
  const bool hand_empty = s[1] < 0 && !foreign_held;
  auto slot_of = [&](ObjectId o) {
    return static_cast<std::size_t>(std::find(p.task_objects.begin(), p.task_objects.end(), o) -
                                    p.task_objects.begin());
  };

  for (std::size_t c = 0; c < p.configs.size(); ++c) {
    if (c == at || !std::isfinite(p.move_cost[at][c])) continue;
    SearchState n = s;
    n[0] = static_cast<int>(c);
    emit({ActionKind::move, c, p.move_cost[at][c], {0, c}}, std::move(n));
  }
  for (std::size_t d = 0; d < p.detects.size(); ++d) {
    const auto& db = p.detects[d];
    if (db.config != at) continue;
    const std::size_t slot = slot_of(db.object);
    if (s[2 + slot] != -1) continue;
    SearchState n = s;
    n[2 + slot] = static_cast<int>(db.binding);
    emit({ActionKind::detect, d, db.cost, {1, db.object.value, db.surface.value, db.binding, db.config}}, std::move(n));
  }
  if (hand_empty) {
    for (std::size_t slot = 0; slot < p.task_objects.size(); ++slot) {
      const int st = s[2 + slot];
      if (st < 0) continue;
      const auto& b = p.bindings[static_cast<std::size_t>(st)];
      if (!b.has_pick || b.pick_config != at) continue;
      SearchState n = s;
      n[1] = static_cast<int>(slot);
      n[2 + slot] = -2;
      emit({ActionKind::pick, static_cast<std::size_t>(st), p.manipulation_cost, {2, b.object.value,
                                                                                  static_cast<std::size_t>(st)}},
           std::move(n));
    }
  }
  if (s[1] >= 0) {
    const std::size_t slot = static_cast<std::size_t>(s[1]);
    for (std::size_t k = 0; k < p.places.size(); ++k) {
      const auto& pl = p.places[k];
      if (pl.config != at || slot_of(pl.object) != slot) continue;
      SearchState n = s;
      n[1] = -1;
      n[2 + slot] = -3 - static_cast<int>(k);
      emit({ActionKind::place, k, p.manipulation_cost, {3, pl.object.value, k}}, std::move(n));
    }
  }
}

inline double tie_grid(double c) { return std::round(c * 1e9) / 1e9; }

struct SearchResult {
  bool found = false;
  std::vector<GroundedStep> steps;
  double cost = 0.0;
  std::size_t expansions = 0;
};

/// Uniform-cost search; ties broken by fewer actions, then lexicographic
/// action ordinals.
inline SearchResult uniform_cost_search(const GroundedProblem& p, std::size_t node_budget) {
  struct Node {
    double g;
    std::vector<GroundedStep> steps;
    SearchState state;
    std::vector<std::size_t> key;  ///< concatenated ordinals
  };
  auto worse = [](const Node& a, const Node& b) {
    const double ga = tie_grid(a.g);
    const double gb = tie_grid(b.g);
    if (ga != gb) return ga > gb;
    if (a.steps.size() != b.steps.size()) return a.steps.size() > b.steps.size();
    return a.key > b.key;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);
  std::set<SearchState> closed;
  open.push({0.0, {}, initial_search_state(p), {}});
  SearchResult res;
  while (!open.empty()) {
    Node n = open.top();
    open.pop();
    if (!closed.insert(n.state).second) continue;
    if (goal_reached(p, n.state)) {
      res.found = true;
      res.steps = std::move(n.steps);
      res.cost = n.g;
      return res;
    }
    if (++res.expansions > node_budget) return res;
    successors(p, n.state, [&](const GroundedStep& step, SearchState next) {
      if (closed.count(next)) return;
      Node m{n.g + step.cost, n.steps, std::move(next), n.key};
      m.steps.push_back(step);
      m.key.insert(m.key.end(), step.ordinal.begin(), step.ordinal.end());
      m.key.push_back(std::numeric_limits<std::size_t>::max());  // separator keeps keys prefix-free
      open.push(std::move(m));
    });
  }
  return res;
}

/// Cheapest goal-reaching sequence of at most `max_len` steps by exhaustive
/// enumeration (for cross-checking the search on small fixtures).
inline SearchResult enumerate_plans(const GroundedProblem& p, std::size_t max_len) {
  SearchResult best;
  best.cost = std::numeric_limits<double>::infinity();
  std::vector<GroundedStep> path;
  std::function<void(const SearchState&, double)> dfs = [&](const SearchState& s, double g) {
    if (goal_reached(p, s)) {
      if (g < best.cost) {
        best.found = true;
        best.cost = g;
        best.steps = path;
      }
      return;
    }
    if (path.size() == max_len) return;
    successors(p, s, [&](const GroundedStep& step, SearchState next) {
      path.push_back(step);
      dfs(next, g + step.cost);
      path.pop_back();
    });
  };
  dfs(initial_search_state(p), 0.0);
  if (!best.found) best.cost = 0.0;
  return best;
}

/// Concrete action instances for a grounded plan.
inline std::vector<ActionInstance> instantiate(const GroundedProblem& p, const std::vector<GroundedStep>& steps,
                                               const sim::EnvironmentSpec& env) {
  std::vector<ActionInstance> out;
  std::size_t at = 0;
  for (const auto& st : steps) {
    ActionInstance a;
    a.kind = st.kind;
    a.cost = st.cost;
    switch (st.kind) {
      case ActionKind::move:
        a.bq_from = p.configs[at];
        a.bq = p.configs[st.index];
        at = st.index;
        break;
      case ActionKind::detect: {
        const auto& d = p.detects[st.index];
        a.object = d.object;
        a.surface = d.surface;
        a.room = d.room;
        a.pb = p.bindings[d.binding].pb;
        a.bq = p.configs[d.config];
        a.hq = d.view.hq;
        a.ht = d.view.ht;
        break;
      }
      case ActionKind::pick: {
        const auto& b = p.bindings[st.index];
        a.object = b.object;
        a.surface = b.surface;
        a.room = env.surface(b.surface).room;
        a.pb = b.pb;
        a.bq = p.configs[b.pick_config];
        break;
      }
      case ActionKind::place: {
        const auto& pl = p.places[st.index];
        a.object = pl.object;
        a.surface = pl.surface;
        a.room = pl.room;
        a.pb = pl.pb;
        a.bq = p.configs[pl.config];
        break;
      }
    }
    out.push_back(std::move(a));
  }
  return out;
}

struct PlanResult {
  bool found = false;
  std::vector<ActionInstance> actions;
  double cost = 0.0;
  std::size_t expansions = 0;
  double wall_s = 0.0;
};

/// Ground the streams and search for the least-cost plan.
inline PlanResult plan(const sim::EnvironmentSpec& env, const SymbolicState& st, const std::vector<Goal>& goals,
                       const std::map<ObjectId, const belief::HierarchicalBelief*>& beliefs, const PlannerConfig& cfg,
                       const Rng& rng) {
  const auto t0 = std::chrono::steady_clock::now();
  const GroundedProblem p = ground(env, st, goals, beliefs, cfg, rng);
  const SearchResult r = uniform_cost_search(p, cfg.node_budget);
  PlanResult out;
  out.found = r.found;
  out.cost = r.cost;
  out.expansions = r.expansions;
  if (r.found) out.actions = instantiate(p, r.steps, env);
  out.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace beltamp::planner
