#pragma once

// Brute-force posterior oracle for the semantic update. Each event is scored
// by enumerating the full joint of the target's location and every detected
// object's location, using likelihood and co-location tables written out
// here; the posterior of one event is the prior of the next.

#include "fixtures.hpp"

#include <beltamp/belief/semantic_update.hpp>

#include <string>

namespace beltamp::checks {

namespace oracle {

inline double obs(bool detected, bool match, double v, const belief::NoiseParams& n) {
  if (match) return detected ? (1 - n.p_fn) * v : 1 - v + v * n.p_fn;
  return detected ? n.p_fp * v : 1 - v * n.p_fp;
}

inline double coloc(double sim, bool same, std::size_t R) {
  const double u = 1.0 / static_cast<double>(R);
  if (sim >= 0) return sim * (same ? 1.0 : 0.0) + (1 - sim) * u;
  return -sim * (same ? 0.0 : 1.0 / (static_cast<double>(R) - 1)) + (1 + sim) * u;
}

struct Instance {
  belief::BeliefLayout layout;
};

// Room posterior: sum over the detected objects' rooms.
inline std::vector<double> room_posterior(const Instance& in, const std::vector<double>& prior, const belief::ObservationEvent& ev,
                                   const belief::SimilarityMatrix& sims, const belief::NoiseParams& n) {
  const auto& L = in.layout;
  const std::size_t R = L.num_rooms();
  const auto& vis = ev.visibility.room_visibilities();
  std::vector<const belief::Detection*> others;
  const belief::Detection* tgt = nullptr;
  for (const auto& d : ev.detections) {
    if (d.object == ev.target) tgt = &d;
    else if (sims.enabled(d.object)) others.push_back(&d);
  }
  std::vector<double> post(R, 0.0);
  std::size_t combos = 1;
  for (std::size_t i = 0; i < others.size(); ++i) combos *= R;
  for (std::size_t rk = 0; rk < R; ++rk) {
    double own;
    if (tgt) {
      const std::size_t at = L.surface_room[tgt->surface.value].value;
      own = obs(true, at == rk, vis[at] > 0 ? vis[at] : 1.0, n);
    } else {
      own = obs(false, true, vis[rk], n);
    }
    for (std::size_t c = 0; c < combos; ++c) {
      double p = prior[rk] * own;
      std::size_t code = c;
      for (const belief::Detection* d : others) {
        const std::size_t rj = code % R;
        code /= R;
        const std::size_t at = L.surface_room[d->surface.value].value;
        const double v = vis[at] > 0 ? vis[at] : 1.0;
        p *= (R > 1 ? coloc(sims.sim(d->object, ev.target), rj == rk, R) : 1.0) * obs(true, at == rj, v, n);
      }
      post[rk] += p;
    }
  }
  double z = 0;
  for (double x : post) z += x;
  for (double& x : post) x /= z;
  return post;
}

// Surface posterior within room r: sum over the detected objects' surfaces.
inline std::vector<double> surface_posterior(const Instance& in, std::size_t r, const std::vector<double>& prior,
                                      const belief::ObservationEvent& ev, const belief::SimilarityMatrix& sims,
                                      const belief::NoiseParams& n) {
  const auto& L = in.layout;
  const auto& members = L.room_surfaces[r];
  const std::size_t S = L.num_surfaces();
  const std::size_t R = L.num_rooms();
  const auto& vis = ev.visibility.surface_visibilities();
  std::vector<const belief::Detection*> others;
  const belief::Detection* tgt = nullptr;
  for (const auto& d : ev.detections) {
    if (d.object == ev.target) tgt = &d;
    else if (sims.enabled(d.object)) others.push_back(&d);
  }
  auto pair_coloc = [&](double sim, std::size_t sj, std::size_t sk) {
    const std::size_t rj = L.surface_room[sj].value;
    const std::size_t rk = L.surface_room[sk].value;
    const double room = R > 1 ? coloc(sim, rj == rk, R) : 1.0;
    const std::size_t ns = L.room_surfaces[rj].size();
    double surf;
    if (rj != rk) surf = 1.0 / static_cast<double>(ns);
    else if (ns == 1) surf = 1.0;
    else surf = coloc(sim, sj == sk, ns);
    return room * surf;
  };
  std::vector<double> post(members.size(), 0.0);
  std::size_t combos = 1;
  for (std::size_t i = 0; i < others.size(); ++i) combos *= S;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const std::size_t sk = members[i].value;
    double own;
    if (tgt) {
      const std::size_t at = tgt->surface.value;
      own = obs(true, at == sk, vis[at] > 0 ? vis[at] : 1.0, n);
    } else {
      own = obs(false, true, vis[sk], n);
    }
    for (std::size_t c = 0; c < combos; ++c) {
      double p = prior[i] * own;
      std::size_t code = c;
      for (const belief::Detection* d : others) {
        const std::size_t sj = code % S;
        code /= S;
        const std::size_t at = d->surface.value;
        const double v = vis[at] > 0 ? vis[at] : 1.0;
        p *= pair_coloc(sims.sim(d->object, ev.target), sj, sk) * obs(true, at == sj, v, n);
      }
      post[i] += p;
    }
  }
  double z = 0;
  for (double x : post) z += x;
  for (double& x : post) x /= z;
  return post;
}

}  // namespace oracle

struct OracleResult {
  std::size_t instances = 0;
  double worst_tv = 0.0;
  std::string failure;  ///< empty when every instance matched
  bool ok() const { return failure.empty(); }
};

/// Random micro-instances: up to 3 rooms, 2 surfaces per room, 3 objects and
/// 2 events, with random priors, similarities, toggles, noise and masks.
inline OracleResult run_oracle_check(std::size_t instances, std::uint64_t seed, double tol = 1e-6) {
  using namespace belief;
  Rng rng(seed);
  OracleResult res;
  for (; res.instances < instances; ++res.instances) {
    const std::size_t R = 1 + rng.index(3);
    std::vector<std::size_t> spr;
    for (std::size_t r = 0; r < R; ++r) spr.push_back(1 + rng.index(2));
    const auto L = make_layout(spr);
    const std::size_t K = 1 + rng.index(3);
    const NoiseParams noise{rng.uniform(0.005, 0.2), rng.uniform(0.005, 0.2), 0.1, 1.0};

    auto b = uniform_belief(L, 4, rng);
    b.set_room_belief(random_simplex(R, rng));
    for (std::size_t r = 0; r < R; ++r) b.set_surface_belief(RoomId{r}, random_simplex(spr[r], rng));

    SimilarityMatrix sims(K);
    for (std::size_t j = 0; j < K; ++j)
      for (std::size_t k = j + 1; k < K; ++k) sims.set(ObjectId{j}, ObjectId{k}, rng.uniform(-1.0, 1.0));
    for (std::size_t j = 1; j < K; ++j) sims.set_enabled(ObjectId{j}, rng.bernoulli(0.8));

    const oracle::Instance in{L};
    auto room = b.room_belief();
    auto surf = b.surface_beliefs();

    const std::size_t events = 1 + rng.index(2);
    for (std::size_t e = 0; e < events; ++e) {
      std::vector<bool> mask(b.total_particles());
      for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = rng.bernoulli(0.4);
      std::vector<Detection> dets;
      for (std::size_t o = 0; o < K; ++o) {
        if (!rng.bernoulli(0.4)) continue;
        const SurfaceId s{rng.index(L.num_surfaces())};
        dets.push_back({ObjectId{o}, s, {L.footprints[s.value].center().x, 0.5, 0.0}});
      }
      const auto ev = make_event(b, mask, dets);
      b = update_semantic_belief(b, ev, &sims, noise);
      if (!ev.uninformative()) {
        room = oracle::room_posterior(in, room, ev, sims, noise);
        for (std::size_t r = 0; r < R; ++r) surf[r] = oracle::surface_posterior(in, r, surf[r], ev, sims, noise);
      }
      double d = tv_distance(room, b.room_belief());
      for (std::size_t r = 0; r < R; ++r) d = std::max(d, tv_distance(surf[r], b.surface_belief(RoomId{r})));
      res.worst_tv = std::max(res.worst_tv, d);
      if (!(d < tol)) {
        res.failure = "instance " + std::to_string(res.instances) + " event " + std::to_string(e) +
                      ": TV " + std::to_string(d);
        return res;
      }
    }
  }
  return res;
}

}  // namespace beltamp::checks
