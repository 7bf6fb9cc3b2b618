#pragma once

#include <beltamp/geometry.hpp>
#include <beltamp/ids.hpp>
#include <beltamp/sim/environment.hpp>

#include <nlohmann/json.hpp>

#include <sstream>
#include <string>
#include <vector>

namespace beltamp {

enum class ActionKind { move, detect, pick, place };

NLOHMANN_JSON_SERIALIZE_ENUM(ActionKind, {{ActionKind::move, "move"},
                                          {ActionKind::detect, "detect"},
                                          {ActionKind::pick, "pick"},
                                          {ActionKind::place, "place"}})

inline const char* to_string(ActionKind k) {
  switch (k) {
    case ActionKind::move: return "move";
    case ActionKind::detect: return "detect";
    case ActionKind::pick: return "pick";
    case ActionKind::place: return "place";
  }
  return "?";
}

/// A grounded action. Which bindings are meaningful depends on the kind:
/// move uses bq_from/bq; detect uses o, s, r, pb, bq, hq, ht; pick uses o, pb,
/// bq; place uses o, s, r, pb, bq.
struct ActionInstance {
  ActionKind kind = ActionKind::move;
  ObjectId object;
  SurfaceId surface;
  RoomId room;
  Pose2 pb;
  Pose2 bq_from;
  Pose2 bq;
  double hq = 0.0;
  std::vector<double> ht;
  double cost = 0.0;

  std::string describe(const sim::EnvironmentSpec& env) const {
    std::ostringstream os;
    os << to_string(kind);
    switch (kind) {
      case ActionKind::move:
        os << " (" << bq_from.x << "," << bq_from.y << ")->(" << bq.x << "," << bq.y << ")";
        break;
      case ActionKind::detect:
      case ActionKind::place:
        os << " " << env.object(object).label << " " << env.surface(surface).label << " "
           << env.room(room).label;
        break;
      case ActionKind::pick:
        os << " " << env.object(object).label;
        break;
    }
    return os.str();
  }
};

inline nlohmann::json to_json(const ActionInstance& a) {
  nlohmann::json j;
  j["kind"] = a.kind;
  if (a.object.valid()) j["object"] = a.object.value;
  if (a.surface.valid()) j["surface"] = a.surface.value;
  if (a.room.valid()) j["room"] = a.room.value;
  j["pb"] = {a.pb.x, a.pb.y, a.pb.yaw};
  j["bq"] = {a.bq.x, a.bq.y, a.bq.yaw};
  if (a.kind == ActionKind::move) j["bq_from"] = {a.bq_from.x, a.bq_from.y, a.bq_from.yaw};
  if (a.kind == ActionKind::detect) {
    j["hq"] = a.hq;
    j["ht"] = a.ht;
  }
  j["cost"] = a.cost;
  return j;
}

}  // namespace beltamp
