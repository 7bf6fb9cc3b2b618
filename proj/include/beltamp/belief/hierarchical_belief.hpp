#pragma once

#include <beltamp/errors.hpp>
#include <beltamp/geometry.hpp>
#include <beltamp/ids.hpp>
#include <beltamp/rng.hpp>
#include <beltamp/sim/environment.hpp>

#include <nlohmann/json.hpp>

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace beltamp::belief {

inline constexpr double kNormTolerance = 1e-9;

/// Room/surface structure the belief is indexed by.
struct BeliefLayout {
  std::vector<RoomId> surface_room;
  std::vector<std::vector<SurfaceId>> room_surfaces;
  std::vector<std::size_t> local_index;
  std::vector<Rect> footprints;

  static BeliefLayout from(const sim::EnvironmentSpec& env) {
    BeliefLayout l;
    l.room_surfaces.resize(env.num_rooms());
    for (std::size_t r = 0; r < env.num_rooms(); ++r) l.room_surfaces[r] = env.surfaces_in(RoomId{r});
    for (std::size_t s = 0; s < env.num_surfaces(); ++s) {
      l.surface_room.push_back(env.surface(SurfaceId{s}).room);
      l.local_index.push_back(env.local_index(SurfaceId{s}));
      l.footprints.push_back(env.surface(SurfaceId{s}).footprint);
    }
    return l;
  }

  std::size_t num_rooms() const { return room_surfaces.size(); }
  std::size_t num_surfaces() const { return surface_room.size(); }
};

struct Particle {
  Pose2 pose;
  double weight = 0.0;
  friend bool operator==(const Particle&, const Particle&) = default;
};

/// Categorical room belief, room-conditioned surface beliefs and a weighted
/// particle set of planar poses per surface, for one object.
class HierarchicalBelief {
 public:
  HierarchicalBelief() = default;
  HierarchicalBelief(ObjectId object, BeliefLayout layout, std::vector<double> room_belief,
                     std::vector<std::vector<double>> surface_belief,
                     std::vector<std::vector<Particle>> particles, std::uint64_t seed = 0)
      : object_(object),
        layout_(std::move(layout)),
        room_belief_(std::move(room_belief)),
        surface_belief_(std::move(surface_belief)),
        particles_(std::move(particles)),
        seed_(seed) {
    for (const auto& ps : particles_) initial_counts_.push_back(ps.size());
    check_invariants();
  }

  ObjectId object() const { return object_; }
  const BeliefLayout& layout() const { return layout_; }
  std::uint64_t seed() const { return seed_; }

  const std::vector<double>& room_belief() const { return room_belief_; }
  const std::vector<double>& surface_belief(RoomId r) const { return surface_belief_.at(r.value); }
  const std::vector<std::vector<double>>& surface_beliefs() const { return surface_belief_; }
  const std::vector<Particle>& particles(SurfaceId s) const { return particles_.at(s.value); }
  const std::vector<std::vector<Particle>>& all_particles() const { return particles_; }
  const std::vector<std::size_t>& initial_particle_counts() const { return initial_counts_; }

  std::size_t total_particles() const {
    return std::accumulate(particles_.begin(), particles_.end(), std::size_t{0},
                           [](std::size_t a, const auto& v) { return a + v.size(); });
  }

  /// P(room) * P(surface | room).
  double surface_mass(SurfaceId s) const {
    const RoomId r = layout_.surface_room.at(s.value);
    return room_belief_[r.value] * surface_belief_[r.value][layout_.local_index[s.value]];
  }

  void set_room_belief(std::vector<double> b) {
    room_belief_ = std::move(b);
    check_distribution(room_belief_, "room belief");
  }
  void set_surface_belief(RoomId r, std::vector<double> b) {
    expects(b.size() == surface_belief_.at(r.value).size(), "surface belief size mismatch");
    surface_belief_[r.value] = std::move(b);
    check_distribution(surface_belief_[r.value], "surface belief");
  }
  void set_particles(SurfaceId s, std::vector<Particle> ps) {
    expects(ps.size() == initial_counts_.at(s.value), "particle count must be preserved");
    particles_[s.value] = std::move(ps);
  }

  /// Throws ContractViolation when any stated invariant is broken.
  void check_invariants() const {
    expects(object_.valid(), "belief needs an object");
    expects(room_belief_.size() == layout_.num_rooms(), "room belief size mismatch");
    expects(surface_belief_.size() == layout_.num_rooms(), "surface belief table size mismatch");
    expects(particles_.size() == layout_.num_surfaces(), "particle table size mismatch");
    check_distribution(room_belief_, "room belief");
    for (std::size_t r = 0; r < surface_belief_.size(); ++r) {
      expects(surface_belief_[r].size() == layout_.room_surfaces[r].size(), "surface belief size mismatch");
      check_distribution(surface_belief_[r], "surface belief");
    }
    for (std::size_t s = 0; s < particles_.size(); ++s) {
      const auto& ps = particles_[s];
      expects(!ps.empty(), "every surface needs particles");
      double sum = 0.0;
      for (const auto& p : ps) {
        expects(p.weight >= 0.0, "negative particle weight");
        expects(layout_.footprints[s].contains(p.pose.position(), 1e-9), "particle outside its surface");
        sum += p.weight;
      }
      expects(std::abs(sum - 1.0) <= kNormTolerance, "particle weights not normalised");
    }
  }

 private:
  static void check_distribution(const std::vector<double>& p, const char* what) {
    double sum = 0.0;
    for (double x : p) {
      expects(x >= 0.0 && std::isfinite(x), std::string(what) + " has an invalid entry");
      sum += x;
    }
    expects(std::abs(sum - 1.0) <= kNormTolerance, std::string(what) + " does not sum to 1");
  }

  ObjectId object_;
  BeliefLayout layout_;
  std::vector<double> room_belief_;
  std::vector<std::vector<double>> surface_belief_;
  std::vector<std::vector<Particle>> particles_;
  std::vector<std::size_t> initial_counts_;
  std::uint64_t seed_ = 0;
};

inline std::vector<double> uniform_vector(std::size_t n) {
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

/// Divide by the sum; throws DegenerateUpdate on zero mass.
inline std::vector<double> normalized(std::vector<double> v, const char* what = "distribution") {
  double sum = 0.0;
  for (double x : v) sum += x;
  if (!(sum > 0.0) || !std::isfinite(sum)) throw DegenerateUpdate(std::string(what) + " has zero mass");
  for (double& x : v) x /= sum;
  return v;
}

inline Pose2 sample_uniform_pose(const Rect& footprint, Rng& rng) {
  const double x = rng.uniform(footprint.x0, footprint.x1);
  const double y = rng.uniform(footprint.y0, footprint.y1);
  const double yaw = rng.uniform(-std::numbers::pi, std::numbers::pi);
  return {x, y, yaw};
}

inline std::vector<Particle> uniform_particles(const Rect& footprint, std::size_t n, Rng& rng) {
  std::vector<Particle> ps;
  ps.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ps.push_back({sample_uniform_pose(footprint, rng), 1.0 / static_cast<double>(n)});
  return ps;
}

/// Uniform rooms, uniform surfaces per room, uniform particles per surface.
inline HierarchicalBelief init_uniform_belief(const sim::EnvironmentSpec& env, ObjectId object,
                                              std::size_t particles_per_surface, Rng& rng) {
  if (particles_per_surface < 1) throw ConfigurationError("particles_per_surface must be at least 1");
  if (env.num_rooms() == 0 || env.num_surfaces() == 0) throw ConfigurationError("empty room/surface table");
  BeliefLayout layout = BeliefLayout::from(env);
  std::vector<std::vector<double>> surf;
  for (const auto& rs : layout.room_surfaces) surf.push_back(uniform_vector(rs.size()));
  std::vector<std::vector<Particle>> particles;
  for (const Rect& f : layout.footprints) particles.push_back(uniform_particles(f, particles_per_surface, rng));
  auto rooms = uniform_vector(layout.num_rooms());
  return HierarchicalBelief(object, std::move(layout), std::move(rooms), std::move(surf), std::move(particles),
                            rng.seed());
}

/// Reset room and surface levels to uniform, keeping particles.
inline void reseed_semantic_levels(HierarchicalBelief& b) {
  b.set_room_belief(uniform_vector(b.layout().num_rooms()));
  for (std::size_t r = 0; r < b.layout().num_rooms(); ++r)
    b.set_surface_belief(RoomId{r}, uniform_vector(b.layout().room_surfaces[r].size()));
}

// ---------------------------------------------------------------------------
// Snapshot JSON: {object, seed, room_belief, surface_belief: {room: [...]},
//                 particles: {surface: [[x,y,yaw,w],...]}}

inline nlohmann::json to_json(const HierarchicalBelief& b) {
  using nlohmann::json;
  json j;
  j["object"] = b.object().value;
  j["seed"] = b.seed();
  j["room_belief"] = b.room_belief();
  json sb = json::object();
  for (std::size_t r = 0; r < b.layout().num_rooms(); ++r) sb[std::to_string(r)] = b.surface_belief(RoomId{r});
  j["surface_belief"] = sb;
  json parts = json::object();
  for (std::size_t s = 0; s < b.layout().num_surfaces(); ++s) {
    json arr = json::array();
    for (const auto& p : b.particles(SurfaceId{s})) arr.push_back({p.pose.x, p.pose.y, p.pose.yaw, p.weight});
    parts[std::to_string(s)] = arr;
  }
  j["particles"] = parts;
  j["initial_particle_counts"] = b.initial_particle_counts();
  return j;
}

/// Rebuild a snapshot against the environment it was taken in.
inline HierarchicalBelief belief_from_json(const nlohmann::json& j, const sim::EnvironmentSpec& env) {
  BeliefLayout layout = BeliefLayout::from(env);
  std::vector<std::vector<double>> surf;
  for (std::size_t r = 0; r < layout.num_rooms(); ++r)
    surf.push_back(j.at("surface_belief").at(std::to_string(r)).get<std::vector<double>>());
  std::vector<std::vector<Particle>> parts;
  for (std::size_t s = 0; s < layout.num_surfaces(); ++s) {
    std::vector<Particle> ps;
    for (const auto& e : j.at("particles").at(std::to_string(s)))
      ps.push_back({Pose2{e.at(0).get<double>(), e.at(1).get<double>(), e.at(2).get<double>()}, e.at(3).get<double>()});
    parts.push_back(std::move(ps));
  }
  return HierarchicalBelief(ObjectId{j.at("object").get<std::size_t>()}, std::move(layout),
                            j.at("room_belief").get<std::vector<double>>(), std::move(surf), std::move(parts),
                            j.at("seed").get<std::uint64_t>());
}

}  // namespace beltamp::belief
