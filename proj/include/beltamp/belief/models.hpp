#pragma once

#include <beltamp/errors.hpp>

#include <cmath>
#include <cstddef>

namespace beltamp::belief {

/// Detector and co-location noise parameters.
struct NoiseParams {
  double p_fn = 0.01;    ///< false-negative probability
  double p_fp = 0.01;    ///< false-positive probability
  double sigma = 0.1;    ///< pose measurement std (m)
  double lambda = 1.0;   ///< co-location distance decay length (m)

  void validate() const {
    if (!(p_fn >= 0.0 && p_fn <= 1.0)) throw ConfigurationError("p_fn must lie in [0,1]");
    if (!(p_fp >= 0.0 && p_fp <= 1.0)) throw ConfigurationError("p_fp must lie in [0,1]");
    if (!(sigma > 0.0)) throw ConfigurationError("sigma must be positive");
    if (!(lambda > 0.0)) throw ConfigurationError("lambda must be positive");
  }
};

/// Visibility-aware likelihood of one categorical observation of a location.
///
/// `matches` is true when the observed location equals the hypothesised one.
inline double location_obs_likelihood(bool detected, bool matches, double visibility,
                                      const NoiseParams& noise) {
  expects(visibility >= 0.0 && visibility <= 1.0, "visibility must lie in [0,1]");
  if (matches) {
    return detected ? (1.0 - noise.p_fn) * visibility
                    : (1.0 - visibility) + visibility * noise.p_fn;
  }
  return detected ? noise.p_fp * visibility : 1.0 - visibility * noise.p_fp;
}

inline double room_obs_likelihood(bool detected, bool obs_room_matches_state, double v_r,
                                  const NoiseParams& noise) {
  return location_obs_likelihood(detected, obs_room_matches_state, v_r, noise);
}

inline double surface_obs_likelihood(bool detected, bool obs_surface_matches_state, double v_s,
                                     const NoiseParams& noise) {
  return location_obs_likelihood(detected, obs_surface_matches_state, v_s, noise);
}

/// P(location of j | location of k) for a similarity in [-1,1] over
/// `num_locations` equally likely places.
///
/// sim >= 0 blends the Kronecker delta with the uniform distribution;
/// sim <= 0 blends the normalised complement of the delta with it.
inline double colocation_prob(double sim, bool same_location, std::size_t num_locations) {
  if (num_locations < 2) throw ConfigurationError("co-location needs at least two locations");
  expects(sim >= -1.0 && sim <= 1.0, "similarity must lie in [-1,1]");
  const double n = static_cast<double>(num_locations);
  const double u = 1.0 / n;
  if (sim >= 0.0) {
    const double delta = same_location ? 1.0 : 0.0;
    return sim * delta + (1.0 - sim) * u;
  }
  const double complement = same_location ? 0.0 : 1.0 / (n - 1.0);
  return -sim * complement + (1.0 + sim) * u;
}

/// Unnormalised Gaussian weight of a particle given a pose detection.
inline double particle_weight_detected(double distance, double sigma) {
  expects(sigma > 0.0, "sigma must be positive");
  return std::exp(-distance * distance / (2.0 * sigma * sigma));
}

/// Weight of a particle after the target was not detected.
inline double particle_weight_missed(bool particle_visible, double prior_weight) {
  expects(prior_weight >= 0.0, "prior weight must be nonnegative");
  return particle_visible ? 0.0 : prior_weight;
}

/// Distance-based re-weighting from a detection of a different object.
inline double particle_weight_colocated(double distance, double sim, double lambda) {
  expects(distance >= 0.0, "distance must be nonnegative");
  expects(sim >= -1.0 && sim <= 1.0, "similarity must lie in [-1,1]");
  expects(lambda > 0.0, "lambda must be positive");
  const double near = std::exp(-distance / lambda);
  return 0.5 * (1.0 + sim) * near + 0.5 * (1.0 - sim) * (1.0 - near);
}

}  // namespace beltamp::belief
