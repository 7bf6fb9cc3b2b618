#pragma once

#include <beltamp/belief/hierarchical_belief.hpp>

#include <cmath>
#include <vector>

namespace beltamp::checks {

// Rooms laid side by side, unit-square surfaces side by side inside each room.
inline belief::BeliefLayout make_layout(const std::vector<std::size_t>& surfaces_per_room) {
  belief::BeliefLayout l;
  for (std::size_t r = 0; r < surfaces_per_room.size(); ++r) {
    l.room_surfaces.emplace_back();
    for (std::size_t i = 0; i < surfaces_per_room[r]; ++i) {
      const SurfaceId s{l.surface_room.size()};
      l.room_surfaces[r].push_back(s);
      l.surface_room.push_back(RoomId{r});
      l.local_index.push_back(i);
      const double x = 10.0 * static_cast<double>(r) + 2.0 * static_cast<double>(i);
      l.footprints.push_back({x, 0.0, x + 1.0, 1.0});
    }
  }
  return l;
}

inline belief::HierarchicalBelief uniform_belief(const belief::BeliefLayout& l, std::size_t n, Rng& rng,
                                                 ObjectId o = ObjectId{0}) {
  std::vector<std::vector<double>> surf;
  for (const auto& rs : l.room_surfaces) surf.push_back(belief::uniform_vector(rs.size()));
  std::vector<std::vector<belief::Particle>> ps;
  for (const Rect& f : l.footprints) ps.push_back(belief::uniform_particles(f, n, rng));
  return belief::HierarchicalBelief(o, l, belief::uniform_vector(l.num_rooms()), surf, ps, rng.seed());
}

inline std::vector<double> random_simplex(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = 0.05 + rng.uniform();
  return belief::normalized(v);
}

inline double tv_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return 0.5 * d;
}

}  // namespace beltamp::checks
