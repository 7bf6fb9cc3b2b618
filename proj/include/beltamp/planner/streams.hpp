#pragma once

#include <beltamp/belief/hierarchical_belief.hpp>
#include <beltamp/belief/particle_filter.hpp>
#include <beltamp/errors.hpp>
#include <beltamp/rng.hpp>
#include <beltamp/sim/sensor.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace beltamp::planner {

/// Draw a pose from a weighted particle set (one uniform per draw).
inline Pose2 sample_pose_b(const std::vector<belief::Particle>& particles, Rng& rng) {
  double total = 0.0;
  for (const auto& p : particles) total += p.weight;
  if (particles.empty() || !(total > 0.0)) throw StreamFailure("sample-PoseB: no particle mass on the surface");
  const double u = rng.uniform() * total;
  double acc = 0.0;
  for (const auto& p : particles) {
    acc += p.weight;
    if (u < acc) return p.pose;
  }
  for (auto it = particles.rbegin(); it != particles.rend(); ++it)
    if (it->weight > 0.0) return it->pose;
  return particles.back().pose;
}

/// sample-PoseB for an object's belief on one surface; certifies PoseB(o, pb, s).
inline Pose2 sample_pose_b(const belief::HierarchicalBelief& b, SurfaceId s, Rng& rng) {
  if (!(b.surface_mass(s) > 0.0)) throw StreamFailure("sample-PoseB: surface has zero belief mass");
  return sample_pose_b(b.particles(s), rng);
}

/// Base and head configuration for a detect: Vis(o, pb, bq, hq, ht).
struct ViewConfig {
  Pose2 bq;
  double hq = 0.0;
  std::vector<double> ht;
  bool occluded = false;  ///< the ray to pb crosses an occluder
};

struct ViewSearch {
  std::vector<double> radii{0.7, 1.1, 1.6, 2.4, 3.2};
  std::size_t angles = 16;
  double clearance = 0.25;
};

/// Candidate viewing configurations for a pose, best first.
///
/// Bases lie on rings around the pose, in free space, in the surface's room,
/// within sensing range and with a wall-free ray to the pose. Bases whose ray
/// crosses an occluder are kept but ranked after every clear one; within a
/// class nearer rings win, then ring angle order.
inline std::vector<ViewConfig> view_candidates(const sim::EnvironmentSpec& env, const sim::SensorConfig& sensor,
                                               Pose2 pb, SurfaceId surface, const ViewSearch& search = {}) {
  const RoomId room = env.surface(surface).room;
  const Vec2 target = pb.position();
  std::vector<ViewConfig> clear;
  std::vector<ViewConfig> blocked;
  for (double r : search.radii) {
    if (r > sensor.range) continue;
    for (std::size_t k = 0; k < search.angles; ++k) {
      const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(search.angles);
      const Vec2 p{target.x + r * std::cos(a), target.y + r * std::sin(a)};
      if (!env.in_free_space(p, search.clearance)) continue;
      const auto pr = env.room_at(p);
      if (!pr || *pr != room) continue;
      if (!env.line_of_sight_walls(p, target)) continue;
      const double yaw = std::atan2(target.y - p.y, target.x - p.x);
      ViewConfig v{Pose2{p.x, p.y, yaw}, 0.0, sim::head_sweep(0.0, sensor), !env.line_of_sight_occluders(p, target)};
      (v.occluded ? blocked : clear).push_back(std::move(v));
    }
  }
  clear.insert(clear.end(), blocked.begin(), blocked.end());
  return clear;
}

/// inverse-visibility: the best viewing configuration, or StreamFailure.
inline ViewConfig inverse_visibility(const sim::EnvironmentSpec& env, const sim::SensorConfig& sensor, Pose2 pb,
                                     SurfaceId surface, const ViewSearch& search = {}) {
  auto c = view_candidates(env, sensor, pb, surface, search);
  if (c.empty()) throw StreamFailure("inverse-visibility: no reachable viewing configuration");
  return c.front();
}

/// Base configuration within reach of a pose, preferring `near`.
inline std::optional<Pose2> reach_config(const sim::EnvironmentSpec& env, Pose2 target, Pose2 near, double reach,
                                         double clearance = 0.2) {
  if (distance(near.position(), target.position()) <= reach - 0.05 && env.in_free_space(near.position(), 0.0))
    return near;
  const auto room = env.room_at(target.position());
  std::optional<Pose2> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (double r : {0.5, 0.6, 0.7}) {
    if (r > reach - 0.05) continue;
    for (int k = 0; k < 24; ++k) {
      const double a = 2.0 * std::numbers::pi * k / 24.0;
      const Vec2 p{target.x + r * std::cos(a), target.y + r * std::sin(a)};
      if (!env.in_free_space(p, clearance)) continue;
      if (room && env.room_at(p) != room) continue;
      const double d = distance(p, near.position());
      if (d < best_d - 1e-12) {
        best_d = d;
        best = Pose2{p.x, p.y, std::atan2(target.y - p.y, target.x - p.x)};
      }
    }
  }
  return best;
}

inline constexpr double kDetectCostFloor = 1e-4;

/// c_a / max(mass, floor).
inline double detect_cost_from_mass(double mass, double c_a = 1.0, double floor = kDetectCostFloor) {
  return c_a / std::max(mass, floor);
}

/// DetectCost of looking for an object in the given pose region (a mask over
/// the surface's particles).
inline double detect_cost(const belief::HierarchicalBelief& b, RoomId room, SurfaceId surface,
                          const std::vector<bool>& region, double c_a = 1.0) {
  return detect_cost_from_mass(belief::joint_belief_mass(b, room, surface, region), c_a);
}

}  // namespace beltamp::planner
