#pragma once

#include <beltamp/belief/hierarchical_belief.hpp>

#include <algorithm>
#include <optional>
#include <set>
#include <vector>

namespace beltamp::belief {

/// Per-surface seen-particle counts of one detect, with derived visibilities.
class VisibilityReport {
 public:
  VisibilityReport() = default;
  VisibilityReport(const BeliefLayout& layout, std::vector<std::size_t> seen, std::vector<std::size_t> initial)
      : seen_(std::move(seen)), initial_(std::move(initial)) {
    expects(seen_.size() == layout.num_surfaces() && initial_.size() == layout.num_surfaces(),
            "visibility report size mismatch");
    surface_v_.resize(seen_.size());
    for (std::size_t s = 0; s < seen_.size(); ++s) {
      expects(seen_[s] <= initial_[s], "seen count exceeds initial particle count");
      surface_v_[s] = initial_[s] == 0 ? 0.0 : static_cast<double>(seen_[s]) / static_cast<double>(initial_[s]);
    }
    room_v_.resize(layout.num_rooms());
    for (std::size_t r = 0; r < layout.num_rooms(); ++r) {
      std::size_t num = 0;
      std::size_t den = 0;
      for (SurfaceId s : layout.room_surfaces[r]) {
        num += seen_[s.value];
        den += initial_[s.value];
      }
      room_v_[r] = den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
    }
  }

  double surface(SurfaceId s) const { return surface_v_.at(s.value); }
  double room(RoomId r) const { return room_v_.at(r.value); }
  std::size_t seen_count(SurfaceId s) const { return seen_.at(s.value); }
  const std::vector<double>& surface_visibilities() const { return surface_v_; }
  const std::vector<double>& room_visibilities() const { return room_v_; }

  bool any_visible() const {
    return std::any_of(surface_v_.begin(), surface_v_.end(), [](double v) { return v > 0.0; });
  }

 private:
  std::vector<std::size_t> seen_;
  std::vector<std::size_t> initial_;
  std::vector<double> surface_v_;
  std::vector<double> room_v_;
};

/// Visibility from a per-particle mask laid out surface by surface.
inline VisibilityReport compute_visibility(const HierarchicalBelief& belief, const std::vector<bool>& seen_mask) {
  expects(seen_mask.size() == belief.total_particles(), "seen mask length does not match particle count");
  std::vector<std::size_t> seen(belief.layout().num_surfaces(), 0);
  std::size_t k = 0;
  for (std::size_t s = 0; s < seen.size(); ++s)
    for (std::size_t i = 0; i < belief.particles(SurfaceId{s}).size(); ++i, ++k)
      if (seen_mask[k]) ++seen[s];
  return VisibilityReport(belief.layout(), std::move(seen), belief.initial_particle_counts());
}

struct Detection {
  ObjectId object;
  SurfaceId surface;
  Pose2 pose;
};

/// One detect outcome, expressed against the target's belief particles.
struct ObservationEvent {
  ObjectId target;
  std::vector<bool> seen_mask;         ///< per target particle, surface-major
  VisibilityReport visibility;
  std::vector<SurfaceId> observed_region;
  std::vector<Detection> detections;

  std::optional<Detection> detection_of(ObjectId o) const {
    for (const auto& d : detections)
      if (d.object == o) return d;
    return std::nullopt;
  }

  bool target_detected() const { return detection_of(target).has_value(); }

  /// Carries no information: nothing seen and nothing detected.
  bool uninformative() const { return detections.empty() && !visibility.any_visible(); }

  void validate(const BeliefLayout& layout) const {
    std::set<ObjectId> objs;
    for (const auto& d : detections) {
      expects(objs.insert(d.object).second, "duplicate detection of one object");
      expects(d.surface.value < layout.num_surfaces(), "detection on unknown surface");
      expects(std::find(observed_region.begin(), observed_region.end(), d.surface) != observed_region.end(),
              "detection outside the observed region");
      expects(layout.footprints[d.surface.value].contains(d.pose.position(), 1e-9),
              "detected pose is not on its surface");
    }
  }
};

/// Build an event from a seen mask and detections; the observed region is
/// every surface with a seen particle plus any extra surfaces passed in.
inline ObservationEvent make_event(const HierarchicalBelief& belief, std::vector<bool> mask,
                                   std::vector<Detection> detections, std::vector<SurfaceId> extra_region = {}) {
  ObservationEvent ev;
  ev.target = belief.object();
  ev.visibility = compute_visibility(belief, mask);
  ev.seen_mask = std::move(mask);
  std::set<SurfaceId> region(extra_region.begin(), extra_region.end());
  for (std::size_t s = 0; s < belief.layout().num_surfaces(); ++s)
    if (ev.visibility.seen_count(SurfaceId{s}) > 0) region.insert(SurfaceId{s});
  for (const auto& d : detections) region.insert(d.surface);
  ev.observed_region.assign(region.begin(), region.end());
  ev.detections = std::move(detections);
  ev.validate(belief.layout());
  return ev;
}

/// Pairwise object similarity with per-object co-location enable flags.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  explicit SimilarityMatrix(std::size_t n) : n_(n), sim_(n * n, 0.0), toggle_(n, true) {
    for (std::size_t i = 0; i < n; ++i) sim_[i * n + i] = 1.0;
  }

  std::size_t size() const { return n_; }

  double sim(ObjectId j, ObjectId k) const { return sim_.at(j.value * n_ + k.value); }

  void set(ObjectId j, ObjectId k, double v) {
    expects(v >= -1.0 && v <= 1.0, "similarity must lie in [-1,1]");
    if (j == k) {
      expects(std::abs(v - 1.0) <= 1e-6, "self-similarity must be 1");
      v = 1.0;
    }
    sim_.at(j.value * n_ + k.value) = v;
    sim_.at(k.value * n_ + j.value) = v;
  }

  /// False disables co-location evidence from detections of this object.
  bool enabled(ObjectId j) const { return toggle_.at(j.value); }
  void set_enabled(ObjectId j, bool on) { toggle_.at(j.value) = on; }

  void check_invariants() const {
    for (std::size_t i = 0; i < n_; ++i) {
      expects(sim_[i * n_ + i] == 1.0, "diagonal must be 1");
      for (std::size_t j = 0; j < n_; ++j) {
        const double v = sim_[i * n_ + j];
        expects(v >= -1.0 && v <= 1.0, "similarity outside [-1,1]");
        expects(v == sim_[j * n_ + i], "similarity not symmetric");
      }
    }
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> sim_;
  std::vector<bool> toggle_;
};

namespace detail {

/// Detections of other objects feed the target's belief only when a
/// similarity matrix is supplied and the detected object's toggle is on.
inline bool colocation_applies(const Detection& d, ObjectId target, const SimilarityMatrix* sims) {
  return sims != nullptr && d.object != target && d.object.value < sims->size() && sims->enabled(d.object);
}

}  // namespace detail

}  // namespace beltamp::belief
