#pragma once

#include <beltamp/belief/hierarchical_belief.hpp>
#include <beltamp/belief/models.hpp>
#include <beltamp/belief/observation.hpp>
#include <beltamp/rng.hpp>
#include <beltamp/sim/environment.hpp>

#include <deque>
#include <numbers>
#include <optional>
#include <vector>

namespace beltamp::sim {

/// Head camera model. The cone parameters are configuration, not measured values.
struct SensorConfig {
  double half_angle = std::numbers::pi / 4.0;  ///< cone half-angle (rad)
  double range = 3.5;                          ///< max sensing distance (m)
  double sweep = 0.35;                         ///< pan offset of the outer sweep waypoints (rad)
  std::size_t waypoints = 3;                   ///< head waypoints per detect
  std::size_t area_grid = 8;                   ///< per-axis grid for visible-area estimates
};

struct RobotState {
  Pose2 base;
  double head_pan = 0.0;
  std::optional<ObjectId> holding;
};

/// Pan angles swept by one detect, centred on `center`.
inline std::vector<double> head_sweep(double center, const SensorConfig& cfg) {
  if (cfg.waypoints <= 1) return {center};
  std::vector<double> pans;
  const double n = static_cast<double>(cfg.waypoints - 1);
  for (std::size_t i = 0; i < cfg.waypoints; ++i)
    pans.push_back(center - cfg.sweep + 2.0 * cfg.sweep * static_cast<double>(i) / n);
  return pans;
}

/// Inside the cone of one head configuration with an unblocked ray.
inline bool point_visible(const EnvironmentSpec& env, const SensorConfig& cfg, const Pose2& base, double pan,
                          Vec2 p) {
  const Vec2 eye = base.position();
  const Vec2 d = p - eye;
  const double range = norm(d);
  if (range > cfg.range) return false;
  if (range > 1e-12) {
    const double bearing = std::atan2(d.y, d.x);
    if (std::abs(wrap_angle(bearing - (base.yaw + pan))) > cfg.half_angle) return false;
  }
  return env.line_of_sight_walls(eye, p) && env.line_of_sight_occluders(eye, p);
}

inline bool point_visible_any(const EnvironmentSpec& env, const SensorConfig& cfg, const Pose2& base,
                              const std::vector<double>& pans, Vec2 p) {
  for (double pan : pans)
    if (point_visible(env, cfg, base, pan, p)) return true;
  return false;
}

/// Seen mask over a belief's particles (surface-major) for a head sweep.
inline std::vector<bool> visible_particles(const EnvironmentSpec& env, const SensorConfig& cfg, const Pose2& base,
                                           const std::vector<double>& pans, const belief::HierarchicalBelief& b) {
  std::vector<bool> mask;
  mask.reserve(b.total_particles());
  for (std::size_t s = 0; s < b.layout().num_surfaces(); ++s)
    for (const auto& p : b.particles(SurfaceId{s})) mask.push_back(point_visible_any(env, cfg, base, pans, p.pose.position()));
  return mask;
}

inline std::vector<bool> visible_particles(const EnvironmentSpec& env, const SensorConfig& cfg,
                                           const RobotState& robot, const belief::HierarchicalBelief& b) {
  return visible_particles(env, cfg, robot.base, {robot.head_pan}, b);
}

/// Mask over one surface's particles.
inline std::vector<bool> visible_surface_particles(const EnvironmentSpec& env, const SensorConfig& cfg,
                                                   const Pose2& base, const std::vector<double>& pans,
                                                   const std::vector<belief::Particle>& ps) {
  std::vector<bool> mask;
  mask.reserve(ps.size());
  for (const auto& p : ps) mask.push_back(point_visible_any(env, cfg, base, pans, p.pose.position()));
  return mask;
}

/// Cell centres of an n x n grid over a rectangle.
inline std::vector<Vec2> grid_points(const Rect& r, std::size_t n) {
  std::vector<Vec2> pts;
  pts.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      pts.push_back({r.x0 + (static_cast<double>(i) + 0.5) * r.width() / static_cast<double>(n),
                     r.y0 + (static_cast<double>(j) + 0.5) * r.height() / static_cast<double>(n)});
  return pts;
}

/// Pre-drawn detector coins; an exhausted list means "no error".
struct NoiseScript {
  std::deque<bool> false_negatives;
  std::deque<bool> false_positives;
};

/// Detector randomness: coin flips either drawn from the run's stream or
/// replayed from a script.
class DetectorNoise {
 public:
  DetectorNoise(belief::NoiseParams params, Rng rng, std::optional<NoiseScript> script = std::nullopt)
      : params_(params), rng_(std::move(rng)), script_(std::move(script)) {}

  const belief::NoiseParams& params() const { return params_; }
  Rng& rng() { return rng_; }
  bool scripted() const { return script_.has_value(); }

  bool false_negative() {
    if (script_) return pop(script_->false_negatives);
    return rng_.bernoulli(params_.p_fn);
  }
  bool false_positive(double visible_fraction) {
    if (script_) return pop(script_->false_positives);
    return rng_.bernoulli(params_.p_fp * visible_fraction);
  }
  /// Pose noise; scripted runs observe exact poses.
  Vec2 pose_noise(double sigma) {
    if (script_) return {0.0, 0.0};
    const double nx = rng_.normal();
    const double ny = rng_.normal();
    return {sigma * nx, sigma * ny};
  }

 private:
  static bool pop(std::deque<bool>& q) {
    if (q.empty()) return false;
    const bool v = q.front();
    q.pop_front();
    return v;
  }

  belief::NoiseParams params_;
  Rng rng_;
  std::optional<NoiseScript> script_;
};

struct DetectionResult {
  std::vector<bool> seen_mask;
  std::vector<belief::Detection> detections;
  std::vector<SurfaceId> visible_surfaces;  ///< surfaces with nonzero visible area
  belief::ObservationEvent event;

  bool target_detected() const { return event.target_detected(); }
};

/// Ground-truth detector for one head sweep.
///
/// Each object whose true pose is in view is reported unless its false-negative
/// coin fires, with Gaussian pose noise clamped onto its surface. Every surface
/// with visible area fraction a > 0 fires one false-positive coin with
/// probability p_fp * a, reporting a uniformly chosen object there.
inline DetectionResult sense(const EnvironmentSpec& env, const std::vector<ObjectPlacement>& objects,
                             const SensorConfig& cfg, const Pose2& base, const std::vector<double>& pans,
                             const belief::HierarchicalBelief& target_belief, const std::vector<bool>& excluded,
                             DetectorNoise& noise) {
  DetectionResult out;
  out.seen_mask = visible_particles(env, cfg, base, pans, target_belief);

  std::vector<double> area(env.num_surfaces(), 0.0);
  std::vector<std::vector<Vec2>> visible_pts(env.num_surfaces());
  for (std::size_t s = 0; s < env.num_surfaces(); ++s) {
    const auto pts = grid_points(env.surface(SurfaceId{s}).footprint, cfg.area_grid);
    for (const Vec2& p : pts)
      if (point_visible_any(env, cfg, base, pans, p)) visible_pts[s].push_back(p);
    area[s] = static_cast<double>(visible_pts[s].size()) / static_cast<double>(pts.size());
    if (area[s] > 0.0) out.visible_surfaces.push_back(SurfaceId{s});
  }

  std::vector<bool> detected(objects.size(), false);
  for (std::size_t o = 0; o < objects.size(); ++o) {
    if (o < excluded.size() && excluded[o]) continue;
    const auto& obj = objects[o];
    if (!point_visible_any(env, cfg, base, pans, obj.pose.position())) continue;
    if (noise.false_negative()) continue;
    const Rect& f = env.surface(obj.surface).footprint;
    const Vec2 p = f.clamp(obj.pose.position() + noise.pose_noise(noise.params().sigma));
    out.detections.push_back({ObjectId{o}, obj.surface, Pose2{p.x, p.y, obj.pose.yaw}});
    detected[o] = true;
  }

  if (!objects.empty()) {
    for (std::size_t s = 0; s < env.num_surfaces(); ++s) {
      if (area[s] <= 0.0) continue;
      if (!noise.false_positive(area[s])) continue;
      const std::size_t o = noise.rng().index(objects.size());
      if (detected[o] || (o < excluded.size() && excluded[o])) continue;
      const auto& pts = visible_pts[s];
      const Vec2 p = pts[noise.rng().index(pts.size())];
      out.detections.push_back({ObjectId{o}, SurfaceId{s}, Pose2{p.x, p.y, 0.0}});
      detected[o] = true;
    }
  }

  out.event = belief::make_event(target_belief, out.seen_mask, out.detections, out.visible_surfaces);
  return out;
}

}  // namespace beltamp::sim
