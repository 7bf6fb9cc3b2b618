#pragma once

#include <beltamp/belief/hierarchical_belief.hpp>
#include <beltamp/belief/models.hpp>
#include <beltamp/belief/observation.hpp>

#include <optional>
#include <vector>

namespace beltamp::belief {

/// A categorical observation: the location it concerned and whether the
/// object was detected there.
struct CategoricalObservation {
  std::size_t location = 0;
  bool detected = false;
};

/// Visibility used for a detection factor. A detection proves the location
/// was in view even when none of the target's particles were; the factor is
/// common to every hypothesis and cancels after normalisation.
inline double detection_visibility(double v) { return v > 0.0 ? v : 1.0; }

/// P(z_j | x_k) by total probability over the R possible locations of j,
/// with the co-location model linking j to k.
inline double cross_object_likelihood(const CategoricalObservation& obs_j, std::size_t x_k, double sim_jk,
                                      const std::vector<double>& visibility, const NoiseParams& noise) {
  const std::size_t n = visibility.size();
  const double v = obs_j.detected ? detection_visibility(visibility.at(obs_j.location))
                                  : visibility.at(obs_j.location);
  double total = 0.0;
  for (std::size_t x_j = 0; x_j < n; ++x_j) {
    const double lik = location_obs_likelihood(obs_j.detected, obs_j.location == x_j, v, noise);
    total += lik * colocation_prob(sim_jk, x_j == x_k, n);
  }
  return total;
}

inline double cross_object_room_likelihood(const CategoricalObservation& obs_j, RoomId x_k_room, double sim_jk,
                                           const VisibilityReport& v, const NoiseParams& noise) {
  return cross_object_likelihood(obs_j, x_k_room.value, sim_jk, v.room_visibilities(), noise);
}

/// P(x_s^j, x_r^j | x_s^k, x_r^k): room co-location times co-location among
/// the surfaces of the shared room; uniform over j's room when rooms differ.
inline double joint_surface_colocation(double sim, const BeliefLayout& layout, SurfaceId s_j, SurfaceId s_k) {
  const RoomId r_j = layout.surface_room[s_j.value];
  const RoomId r_k = layout.surface_room[s_k.value];
  const std::size_t nr = layout.num_rooms();
  const double room_term = nr < 2 ? 1.0 : colocation_prob(sim, r_j == r_k, nr);
  const std::size_t ns = layout.room_surfaces[r_j.value].size();
  double surf_term = 0.0;
  if (r_j != r_k) {
    surf_term = 1.0 / static_cast<double>(ns);
  } else if (ns < 2) {
    surf_term = 1.0;
  } else {
    surf_term = colocation_prob(sim, s_j == s_k, ns);
  }
  return room_term * surf_term;
}

/// Unnormalised room-level likelihood of the event for each room.
inline std::vector<double> room_likelihoods(const BeliefLayout& layout, const ObservationEvent& event,
                                            const SimilarityMatrix* sims, const NoiseParams& noise) {
  const std::size_t nr = layout.num_rooms();
  const auto& vis = event.visibility.room_visibilities();
  std::vector<double> lik(nr, 1.0);
  const auto target_det = event.detection_of(event.target);
  for (std::size_t r = 0; r < nr; ++r) {
    if (target_det) {
      const std::size_t at = layout.surface_room[target_det->surface.value].value;
      lik[r] = room_obs_likelihood(true, at == r, detection_visibility(vis[at]), noise);
    } else {
      lik[r] = room_obs_likelihood(false, true, vis[r], noise);
    }
  }
  if (nr < 2) return lik;
  for (const auto& d : event.detections) {
    if (!detail::colocation_applies(d, event.target, sims)) continue;
    const CategoricalObservation obs{layout.surface_room[d.surface.value].value, true};
    const double sim = sims->sim(d.object, event.target);
    for (std::size_t r = 0; r < nr; ++r) lik[r] *= cross_object_likelihood(obs, r, sim, vis, noise);
  }
  return lik;
}

/// Unnormalised surface-level likelihood of the event for each surface of a
/// room, conditional on the object being in that room.
inline std::vector<double> surface_likelihoods(const BeliefLayout& layout, RoomId room, const ObservationEvent& event,
                                               const SimilarityMatrix* sims, const NoiseParams& noise) {
  const auto& members = layout.room_surfaces[room.value];
  const auto& vis = event.visibility.surface_visibilities();
  std::vector<double> lik(members.size(), 1.0);
  const auto target_det = event.detection_of(event.target);
  for (std::size_t i = 0; i < members.size(); ++i) {
    const SurfaceId s = members[i];
    if (target_det) {
      const SurfaceId at = target_det->surface;
      lik[i] = surface_obs_likelihood(true, at == s, detection_visibility(vis[at.value]), noise);
    } else {
      lik[i] = surface_obs_likelihood(false, true, vis[s.value], noise);
    }
  }
  for (const auto& d : event.detections) {
    if (!detail::colocation_applies(d, event.target, sims)) continue;
    const double sim = sims->sim(d.object, event.target);
    const double v = detection_visibility(vis[d.surface.value]);
    for (std::size_t i = 0; i < members.size(); ++i) {
      double total = 0.0;
      for (std::size_t sj = 0; sj < layout.num_surfaces(); ++sj) {
        const double obs_lik = surface_obs_likelihood(true, SurfaceId{sj} == d.surface, v, noise);
        total += obs_lik * joint_surface_colocation(sim, layout, SurfaceId{sj}, members[i]);
      }
      lik[i] *= total;
    }
  }
  return lik;
}

/// Bayes update of the room and room-conditioned surface beliefs.
///
/// Pass `sims == nullptr` to ignore detections of other objects. Throws
/// DegenerateUpdate, leaving nothing modified, when a level receives zero mass.
inline HierarchicalBelief update_semantic_belief(const HierarchicalBelief& belief, const ObservationEvent& event,
                                                 const SimilarityMatrix* sims, const NoiseParams& noise) {
  expects(event.target == belief.object(), "event concerns a different object");
  event.validate(belief.layout());
  if (event.uninformative()) return belief;

  const auto& layout = belief.layout();
  std::vector<double> rooms = room_likelihoods(layout, event, sims, noise);
  for (std::size_t r = 0; r < rooms.size(); ++r) rooms[r] *= belief.room_belief()[r];
  rooms = normalized(std::move(rooms), "room belief");

  std::vector<std::vector<double>> surfaces;
  for (std::size_t r = 0; r < layout.num_rooms(); ++r) {
    auto lik = surface_likelihoods(layout, RoomId{r}, event, sims, noise);
    const auto& prior = belief.surface_belief(RoomId{r});
    for (std::size_t i = 0; i < lik.size(); ++i) lik[i] *= prior[i];
    surfaces.push_back(normalized(std::move(lik), "surface belief"));
  }

  HierarchicalBelief out = belief;
  out.set_room_belief(std::move(rooms));
  for (std::size_t r = 0; r < surfaces.size(); ++r) out.set_surface_belief(RoomId{r}, std::move(surfaces[r]));
  return out;
}

}  // namespace beltamp::belief
