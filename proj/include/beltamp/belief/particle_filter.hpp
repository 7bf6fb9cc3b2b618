#pragma once

#include <beltamp/belief/hierarchical_belief.hpp>
#include <beltamp/belief/models.hpp>
#include <beltamp/belief/observation.hpp>

#include <algorithm>
#include <limits>
#include <vector>

namespace beltamp::belief {

/// Draw `n` indices with probability proportional to `weights` (inverse CDF,
/// one uniform per draw).
inline std::vector<std::size_t> multinomial_resample(const std::vector<double>& weights, std::size_t n, Rng& rng) {
  std::vector<double> cdf(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    cdf[i] = acc;
  }
  std::vector<std::size_t> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t j = static_cast<std::size_t>(it - cdf.begin());
    if (j >= weights.size()) {
      // u rounded up to the total: take the last positive entry.
      j = weights.size() - 1;
      while (j > 0 && weights[j] <= 0.0) --j;
    }
    out.push_back(j);
  }
  return out;
}

/// What happened to each surface's particle set in one filter step.
enum class SurfaceStep { unchanged, resampled, reseeded };

struct FilterReport {
  std::vector<SurfaceStep> surfaces;
  bool any_reseeded() const {
    return std::find(surfaces.begin(), surfaces.end(), SurfaceStep::reseeded) != surfaces.end();
  }
};

/// Occlusion-aware particle filter step over every surface of the belief.
///
/// Objects are stationary, so poses are copied. On the surface holding a
/// target detection the weights come from the Gaussian pose model; when the
/// target was detected elsewhere the set is left as is. Otherwise visible
/// particles are zeroed, invisible ones keep their weight and are then
/// multiplied by the distance-based co-location weight of every detected,
/// co-location-enabled object. Surfaces whose factors are all equal are not
/// resampled. A surface left with zero mass is re-seeded uniformly and
/// reported; with `throw_on_degenerate` it raises DegenerateUpdate instead.
inline HierarchicalBelief particle_filter_step(const HierarchicalBelief& belief, const ObservationEvent& event,
                                               const SimilarityMatrix* sims, const NoiseParams& noise, Rng& rng,
                                               FilterReport* report = nullptr, bool throw_on_degenerate = false) {
  expects(event.target == belief.object(), "event concerns a different object");
  expects(event.seen_mask.size() == belief.total_particles(), "seen mask does not cover the particle set");
  const auto& layout = belief.layout();
  HierarchicalBelief out = belief;
  FilterReport local;
  local.surfaces.assign(layout.num_surfaces(), SurfaceStep::unchanged);

  const auto target_det = event.detection_of(event.target);
  std::vector<Detection> colocated;
  for (const auto& d : event.detections)
    if (detail::colocation_applies(d, event.target, sims)) colocated.push_back(d);

  std::size_t offset = 0;
  for (std::size_t s = 0; s < layout.num_surfaces(); ++s) {
    const auto& ps = belief.particles(SurfaceId{s});
    const std::size_t n = ps.size();
    const std::size_t base = offset;
    offset += n;

    std::vector<double> w(n);
    if (target_det) {
      if (target_det->surface.value != s) continue;
      // Gaussian weights relative to the closest particle, so a tiny sigma
      // cannot underflow every weight at once.
      std::vector<double> d2(n);
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        const double d = distance(ps[i].pose, target_det->pose);
        d2[i] = d * d;
        best = std::min(best, d2[i]);
      }
      for (std::size_t i = 0; i < n; ++i)
        w[i] = std::exp(-(d2[i] - best) / (2.0 * noise.sigma * noise.sigma));
    } else {
      bool informative = false;
      for (std::size_t i = 0; i < n; ++i) {
        const bool visible = event.seen_mask[base + i];
        informative = informative || visible;
        w[i] = particle_weight_missed(visible, ps[i].weight);
      }
      for (const auto& d : colocated) {
        const double sim = sims->sim(d.object, event.target);
        std::vector<double> f(n);
        for (std::size_t i = 0; i < n; ++i)
          f[i] = particle_weight_colocated(distance(ps[i].pose, d.pose), sim, noise.lambda);
        const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
        if (*hi - *lo > 1e-15 * std::max(1.0, *hi)) informative = true;
        for (std::size_t i = 0; i < n; ++i) w[i] *= f[i];
      }
      if (!informative) continue;
    }

    double total = 0.0;
    for (double x : w) total += x;
    if (!(total > 0.0)) {
      if (throw_on_degenerate) throw DegenerateUpdate("surface " + std::to_string(s) + " lost all particle weight");
      out.set_particles(SurfaceId{s}, uniform_particles(layout.footprints[s], n, rng));
      local.surfaces[s] = SurfaceStep::reseeded;
      continue;
    }
    const auto picks = multinomial_resample(w, n, rng);
    std::vector<Particle> next;
    next.reserve(n);
    for (std::size_t j : picks) next.push_back({ps[j].pose, 1.0 / static_cast<double>(n)});
    out.set_particles(SurfaceId{s}, std::move(next));
    local.surfaces[s] = SurfaceStep::resampled;
  }
  if (report) *report = std::move(local);
  return out;
}

/// P(room) * P(surface | room) * (particle weight of the surface inside `region`).
inline double joint_belief_mass(const HierarchicalBelief& belief, RoomId room, SurfaceId surface, const Rect& region) {
  const auto& layout = belief.layout();
  expects(layout.surface_room.at(surface.value) == room, "surface is not in the given room");
  expects(layout.footprints[surface.value].contains(region, 1e-9), "pose region lies outside the surface");
  double in = 0.0;
  for (const auto& p : belief.particles(surface))
    if (region.contains(p.pose.position())) in += p.weight;
  return belief.room_belief()[room.value] * belief.surface_belief(room)[layout.local_index[surface.value]] * in;
}

/// Same product with the pose region given as a mask over the surface's particles.
inline double joint_belief_mass(const HierarchicalBelief& belief, RoomId room, SurfaceId surface,
                                const std::vector<bool>& region_mask) {
  const auto& layout = belief.layout();
  expects(layout.surface_room.at(surface.value) == room, "surface is not in the given room");
  const auto& ps = belief.particles(surface);
  expects(region_mask.size() == ps.size(), "region mask does not match the surface's particles");
  double in = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i)
    if (region_mask[i]) in += ps[i].weight;
  return belief.room_belief()[room.value] * belief.surface_belief(room)[layout.local_index[surface.value]] * in;
}

}  // namespace beltamp::belief
