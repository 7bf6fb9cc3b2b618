#pragma once

// Monte Carlo check that the simulated detector produces the frequencies the
// estimator's location likelihoods assume. A unit surface is watched from
// (-2, 0.5) with a box covering x in [v, 1], so exactly a fraction v of it is
// in view.

#include <beltamp/belief/hierarchical_belief.hpp>
#include <beltamp/belief/models.hpp>
#include <beltamp/sim/sampler.hpp>
#include <beltamp/sim/sensor.hpp>

#include <cmath>
#include <string>

namespace beltamp::checks {

inline sim::EnvironmentSpec calibration_world(double v) {
  std::vector<sim::Occluder> occ;
  if (v < 1.0) occ.push_back({"box", {v, 0.0, 1.0, 1.0}});
  // A second surface behind the robot, never in view.
  return sim::EnvironmentSpec({{"room", {-3.0, -1.0, 2.0, 2.0}}},
                              {{"shelf", RoomId{0}, {0.0, 0.0, 1.0, 1.0}},
                               {"bin", RoomId{0}, {-2.9, -0.9, -2.5, -0.5}}},
                              occ, {}, {});
}

struct CalibrationResult {
  double expected = 0.0;
  double observed = 0.0;
  double sigma = 0.0;
  bool ok() const { return std::abs(observed - expected) <= 3.0 * sigma; }
};

/// `on_surface`: the target sits uniformly on the watched surface and the
/// frequency of reporting it there is compared with (1 - p_fn) v. Otherwise
/// it sits on the hidden surface and the frequency of a false report on the
/// watched surface is compared with p_fp v.
inline CalibrationResult run_calibration(double v, bool on_surface, std::size_t trials, std::uint64_t seed,
                                         belief::NoiseParams noise) {
  const auto env = calibration_world(v);
  Rng rng(seed);
  const auto b = belief::init_uniform_belief(env, ObjectId{0}, 1, rng);
  sim::SensorConfig cfg;
  const Pose2 base{-2.0, 0.5, 0.0};
  const std::vector<double> pans{0.0};
  sim::DetectorNoise detector(noise, rng.fork(1));
  Rng place = rng.fork(2);
  std::size_t hits = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const SurfaceId s{on_surface ? 0u : 1u};
    const Pose2 at = on_surface ? Pose2{place.uniform(), place.uniform(), 0.0} : Pose2{-2.7, -0.7, 0.0};
    const std::vector<sim::ObjectPlacement> objects{{"target", s, at}};
    const auto res = sim::sense(env, objects, cfg, base, pans, b, {}, detector);
    for (const auto& d : res.detections)
      if (d.object == ObjectId{0} && d.surface == SurfaceId{0}) ++hits;
  }
  CalibrationResult r;
  r.expected = belief::location_obs_likelihood(true, on_surface, v, noise);
  r.observed = static_cast<double>(hits) / static_cast<double>(trials);
  r.sigma = std::sqrt(r.expected * (1.0 - r.expected) / static_cast<double>(trials));
  return r;
}

}  // namespace beltamp::checks
