#pragma once

#include <beltamp/errors.hpp>

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace beltamp::harness {

inline constexpr double kZ95 = 1.96;

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;    ///< sample standard deviation (n - 1)
  double ci95 = 0.0;  ///< half-width, 1.96 * sd / sqrt(n)
};

inline Summary summarize(const std::vector<double>& xs) {
  Summary s;
  s.n = xs.size();
  if (s.n == 0) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
    s.ci95 = kZ95 * s.sd / std::sqrt(static_cast<double>(s.n));
  }
  return s;
}

struct PairwiseRow {
  std::string variant;
  bool best = false;
  Summary delta;  ///< paired differences variant - best

  /// The best variant is statistically superior to this one.
  bool significant() const { return !best && delta.mean - delta.ci95 > 0.0; }
};

/// Paired comparison against the variant with the lowest mean. Rows keep the
/// map's order; the best row is exactly zero.
inline std::vector<PairwiseRow> pairwise_vs_best(const std::map<std::string, std::vector<double>>& metric) {
  std::vector<PairwiseRow> rows;
  if (metric.empty()) return rows;
  const std::size_t n = metric.begin()->second.size();
  std::string best;
  double best_mean = std::numeric_limits<double>::infinity();
  for (const auto& [name, xs] : metric) {
    expects(xs.size() == n, "pairwise comparison needs paired samples of equal length");
    const double m = summarize(xs).mean;
    if (m < best_mean) {
      best_mean = m;
      best = name;
    }
  }
  const auto& ref = metric.at(best);
  for (const auto& [name, xs] : metric) {
    PairwiseRow r;
    r.variant = name;
    r.best = name == best;
    if (!r.best) {
      std::vector<double> d(n);
      for (std::size_t i = 0; i < n; ++i) d[i] = xs[i] - ref[i];
      r.delta = summarize(d);
    } else {
      r.delta.n = n;
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace beltamp::harness
