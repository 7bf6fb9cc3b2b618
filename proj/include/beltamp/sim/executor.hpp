#pragma once

#include <beltamp/action.hpp>
#include <beltamp/sim/sensor.hpp>

#include <optional>
#include <string>
#include <vector>

namespace beltamp::sim {

/// Declared execution-time model and manipulation limits.
struct ExecConfig {
  double speed = 0.25;             ///< m/s
  double head_waypoint_s = 2.0;    ///< seconds per head waypoint
  double manipulation_s = 5.0;     ///< seconds per pick or place
  double reach = 0.8;              ///< base-to-object reach radius (m)
  double grasp_tolerance = 0.3;    ///< max error between ?pb and the true pose for a pick
  SensorConfig sensor;
};

/// Ground truth during one run: where every object is, the robot, and which
/// poses a detect has confirmed (AtPoseB).
struct WorldState {
  std::vector<ObjectPlacement> objects;
  RobotState robot;
  std::vector<std::optional<Pose2>> confirmed;

  static WorldState from(const EnvironmentSpec& env, Pose2 start) {
    WorldState w;
    w.objects = env.objects();
    w.robot.base = start;
    w.confirmed.assign(w.objects.size(), std::nullopt);
    return w;
  }

  std::vector<bool> held_mask() const {
    std::vector<bool> m(objects.size(), false);
    if (robot.holding) m[robot.holding->value] = true;
    return m;
  }
};

struct ActionOutcome {
  bool success = false;
  std::string reason;
  double duration_s = 0.0;
  std::optional<DetectionResult> detection;
};

namespace detail {

inline void require_at(const RobotState& robot, const Pose2& bq) {
  expects(distance(robot.base.position(), bq.position()) <= 1e-6, "robot is not at the action's base configuration");
}

}  // namespace detail

/// Execute one grounded action against the ground truth.
///
/// Failures are reported in the outcome; a symbolically invalid action (wrong
/// base configuration, picking with a full hand, placing with an empty one)
/// throws ContractViolation. A detect needs the target's current belief to
/// build the seen mask.
inline ActionOutcome execute_action(const EnvironmentSpec& env, WorldState& world, const ActionInstance& action,
                                    const belief::HierarchicalBelief* target_belief, DetectorNoise& noise,
                                    const ExecConfig& cfg = {}) {
  ActionOutcome out;
  RobotState& robot = world.robot;
  switch (action.kind) {
    case ActionKind::move: {
      detail::require_at(robot, action.bq_from);
      const auto d = env.try_nav_distance(robot.base.position(), action.bq.position());
      if (!d || !env.in_free_space(action.bq.position(), 0.0)) {
        out.reason = "target base configuration unreachable";
        return out;
      }
      robot.base = action.bq;
      robot.head_pan = action.hq;
      out.duration_s = *d / cfg.speed;
      out.success = true;
      return out;
    }
    case ActionKind::detect: {
      detail::require_at(robot, action.bq);
      expects(target_belief != nullptr && target_belief->object() == action.object,
              "detect needs the target object's belief");
      expects(!action.ht.empty(), "detect needs a head trajectory");
      DetectionResult res =
          sense(env, world.objects, cfg.sensor, robot.base, action.ht, *target_belief, world.held_mask(), noise);
      robot.head_pan = action.ht.back();
      out.duration_s = cfg.head_waypoint_s * static_cast<double>(action.ht.size());
      for (const auto& d : res.detections) world.confirmed[d.object.value] = d.pose;
      out.success = res.target_detected();
      if (!out.success) out.reason = res.detections.empty() ? "nothing detected" : "target not detected";
      out.detection = std::move(res);
      return out;
    }
    case ActionKind::pick: {
      detail::require_at(robot, action.bq);
      expects(!robot.holding.has_value(), "pick with a full hand");
      out.duration_s = cfg.manipulation_s;
      const auto& truth = world.objects.at(action.object.value);
      if (!world.confirmed.at(action.object.value)) {
        out.reason = "object pose not confirmed by a detect";
        return out;
      }
      if (distance(robot.base.position(), truth.pose.position()) > cfg.reach) {
        out.reason = "object out of reach";
        return out;
      }
      if (distance(action.pb.position(), truth.pose.position()) > cfg.grasp_tolerance) {
        out.reason = "no object at the grasp pose";
        return out;
      }
      robot.holding = action.object;
      out.success = true;
      return out;
    }
    case ActionKind::place: {
      detail::require_at(robot, action.bq);
      expects(robot.holding == action.object, "place without holding the object");
      out.duration_s = cfg.manipulation_s;
      const Surface& s = env.surface(action.surface);
      if (!s.footprint.contains(action.pb.position(), 1e-9)) {
        out.reason = "place pose is not on the surface";
        return out;
      }
      if (distance(robot.base.position(), action.pb.position()) > cfg.reach) {
        out.reason = "place pose out of reach";
        return out;
      }
      auto& obj = world.objects.at(action.object.value);
      obj.surface = action.surface;
      obj.pose = action.pb;
      world.confirmed[action.object.value] = action.pb;
      robot.holding.reset();
      out.success = true;
      return out;
    }
  }
  throw ContractViolation("unknown action kind");
}

}  // namespace beltamp::sim
