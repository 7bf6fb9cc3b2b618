#pragma once

#include <beltamp/errors.hpp>
#include <beltamp/geometry.hpp>
#include <beltamp/ids.hpp>
#include <beltamp/sim/environment.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace beltamp::planner {

/// Ground literal such as (At ?apple ?coffee_table).
struct Literal {
  std::string predicate;
  std::vector<std::string> args;

  auto operator<=>(const Literal&) const = default;

  std::string str() const {
    std::string s = "(" + predicate;
    for (auto a : args) {
      std::replace(a.begin(), a.end(), ' ', '_');
      s += " ?" + a;
    }
    return s + ")";
  }
};

inline const std::set<std::string>& known_predicates() {
  static const std::set<std::string> p{"IsItem", "IsSurf",   "IsRoom",    "HandEmpty", "AtBConf", "PoseB",
                                       "Vis",    "Supported", "AtPoseB", "At",        "Holding", "Found"};
  return p;
}

/// Parse one literal; "?" prefixes on arguments are optional.
inline Literal parse_literal(const std::string& text) {
  std::string t = text;
  t.erase(0, t.find_first_not_of(" \t\r\n"));
  t.erase(t.find_last_not_of(" \t\r\n,") + 1);
  if (t.size() < 3 || t.front() != '(' || t.back() != ')') throw ConfigurationError("bad literal '" + text + "'");
  std::istringstream in(t.substr(1, t.size() - 2));
  Literal lit;
  in >> lit.predicate;
  if (!known_predicates().count(lit.predicate)) throw ConfigurationError("unknown predicate '" + lit.predicate + "'");
  std::string a;
  while (in >> a) {
    if (!a.empty() && a.front() == '?') a.erase(0, 1);
    std::replace(a.begin(), a.end(), '_', ' ');  // "coffee_table" names the label "coffee table"
    lit.args.push_back(a);
  }
  return lit;
}

/// Parse a comma- or newline-separated literal list.
inline std::vector<Literal> parse_literals(const std::string& text) {
  std::vector<Literal> out;
  std::size_t i = 0;
  while ((i = text.find('(', i)) != std::string::npos) {
    const std::size_t j = text.find(')', i);
    if (j == std::string::npos) throw ConfigurationError("unterminated literal");
    out.push_back(parse_literal(text.substr(i, j - i + 1)));
    i = j + 1;
  }
  return out;
}

/// What the robot knows about one task object.
struct ObjectStatus {
  enum Kind { unknown, located, held } kind = unknown;
  SurfaceId surface;  ///< located: surface it is supported by
  Pose2 pose;         ///< located: AtPoseB pose

  friend bool operator==(const ObjectStatus&, const ObjectStatus&) = default;
};

/// The planner's state: robot base, hand and per-object knowledge. The
/// literal view (`literals()`) is derived from these fields, which keeps the
/// AtBConf and HandEmpty/Holding invariants true by construction.
struct SymbolicState {
  Pose2 base;
  std::optional<ObjectId> holding;
  std::vector<ObjectStatus> objects;  ///< indexed by ObjectId
  double total_cost = 0.0;

  bool hand_empty() const { return !holding.has_value(); }

  std::set<Literal> literals(const sim::EnvironmentSpec& env) const {
    std::set<Literal> out;
    for (std::size_t o = 0; o < env.num_objects(); ++o) out.insert({"IsItem", {env.object(ObjectId{o}).label}});
    for (std::size_t s = 0; s < env.num_surfaces(); ++s) out.insert({"IsSurf", {env.surface(SurfaceId{s}).label}});
    for (std::size_t r = 0; r < env.num_rooms(); ++r) out.insert({"IsRoom", {env.room(RoomId{r}).label}});
    out.insert({"AtBConf", {"bq"}});
    if (holding) {
      out.insert({"Holding", {env.object(*holding).label}});
    } else {
      out.insert({"HandEmpty", {"arm"}});
    }
    for (std::size_t o = 0; o < objects.size(); ++o) {
      if (objects[o].kind != ObjectStatus::located) continue;
      const auto& name = env.object(ObjectId{o}).label;
      out.insert({"Supported", {name, "pb", env.surface(objects[o].surface).label}});
      out.insert({"AtPoseB", {name, "pb"}});
      out.insert({"At", {name, env.surface(objects[o].surface).label}});
    }
    return out;
  }
};

/// Goal literal the planner understands: At(o, s) or Found(o).
struct Goal {
  enum Kind { at, found } kind = at;
  ObjectId object;
  SurfaceId surface;

  bool satisfied(const SymbolicState& st) const {
    const auto& s = st.objects.at(object.value);
    if (kind == found) return s.kind != ObjectStatus::unknown;
    return s.kind == ObjectStatus::located && s.surface == surface;
  }
};

inline ObjectId object_named(const sim::EnvironmentSpec& env, const std::string& name) {
  auto o = env.find_object(name);
  if (!o) throw ConfigurationError("unknown object '" + name + "'");
  return *o;
}

inline SurfaceId surface_named(const sim::EnvironmentSpec& env, const std::string& name) {
  auto s = env.find_surface(name);
  if (!s) throw ConfigurationError("unknown surface '" + name + "'");
  return *s;
}

inline std::vector<Goal> goals_from_literals(const sim::EnvironmentSpec& env, const std::vector<Literal>& lits) {
  std::vector<Goal> out;
  for (const auto& l : lits) {
    if (l.predicate == "At" && l.args.size() == 2) {
      out.push_back({Goal::at, object_named(env, l.args[0]), surface_named(env, l.args[1])});
    } else if ((l.predicate == "Found" || l.predicate == "AtPoseB") && !l.args.empty()) {
      out.push_back({Goal::found, object_named(env, l.args[0]), SurfaceId{}});
    } else {
      throw ConfigurationError("goal literal " + l.str() + " is not expressible");
    }
  }
  return out;
}

/// Initial state from literals. Objects known in advance are given as
/// Supported(o, pb, s) together with AtPoseB(o, pb); their poses come from
/// `known_poses` (keyed by object label) or the surface centre.
inline SymbolicState state_from_literals(const sim::EnvironmentSpec& env, const std::vector<Literal>& lits,
                                         Pose2 start, const std::map<std::string, Pose2>& known_poses = {}) {
  SymbolicState st;
  st.base = start;
  st.objects.assign(env.num_objects(), {});
  std::size_t confs = 0;
  bool hand_empty = false;
  std::set<std::string> at_pose;
  for (const auto& l : lits) {
    if (l.predicate == "AtBConf") ++confs;
    if (l.predicate == "HandEmpty") hand_empty = true;
    if (l.predicate == "Holding") st.holding = object_named(env, l.args.at(0));
    if (l.predicate == "AtPoseB") at_pose.insert(l.args.at(0));
  }
  expects(confs <= 1, "more than one AtBConf literal");
  expects(hand_empty != st.holding.has_value(), "exactly one of HandEmpty and Holding must hold");
  if (st.holding) st.objects[st.holding->value].kind = ObjectStatus::held;
  for (const auto& l : lits) {
    if (l.predicate != "Supported" || l.args.size() != 3 || !at_pose.count(l.args[0])) continue;
    const ObjectId o = object_named(env, l.args[0]);
    const SurfaceId s = surface_named(env, l.args[2]);
    auto it = known_poses.find(l.args[0]);
    const Vec2 c = env.surface(s).footprint.center();
    st.objects[o.value] = {ObjectStatus::located, s, it != known_poses.end() ? it->second : Pose2{c.x, c.y, 0.0}};
  }
  return st;
}

/// Task file: {objects, initial_literals, goal_literals}.
struct Task {
  std::vector<std::string> objects;  ///< task-relevant objects (beliefs are tracked for these)
  std::vector<Literal> initial;
  std::vector<Literal> goal;
};

inline Task task_from_json(const nlohmann::json& j) {
  Task t;
  t.objects = j.at("objects").get<std::vector<std::string>>();
  auto lits = [](const nlohmann::json& a) {
    if (a.is_string()) return parse_literals(a.get<std::string>());
    std::vector<Literal> out;
    for (const auto& e : a) out.push_back(parse_literal(e.get<std::string>()));
    return out;
  };
  t.initial = lits(j.at("initial_literals"));
  t.goal = lits(j.at("goal_literals"));
  return t;
}

inline nlohmann::json to_json(const Task& t) {
  nlohmann::json j{{"objects", t.objects}};
  for (const auto& l : t.initial) j["initial_literals"].push_back(l.str());
  for (const auto& l : t.goal) j["goal_literals"].push_back(l.str());
  return j;
}

}  // namespace beltamp::planner
