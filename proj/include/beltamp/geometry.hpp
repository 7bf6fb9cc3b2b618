#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>

namespace beltamp {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

/// Planar pose: position plus heading.
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;

  Vec2 position() const { return {x, y}; }
  friend bool operator==(const Pose2&, const Pose2&) = default;
};

inline double distance(const Pose2& a, const Pose2& b) {
  return distance(a.position(), b.position());
}

/// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a + std::numbers::pi, two_pi);
  if (a <= 0.0) a += two_pi;
  return a - std::numbers::pi;
}

struct Segment {
  Vec2 a;
  Vec2 b;
};

/// Axis-aligned rectangle, closed on all sides.
struct Rect {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  Vec2 center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
  bool valid() const { return x1 > x0 && y1 > y0; }

  bool contains(Vec2 p, double eps = 1e-12) const {
    return p.x >= x0 - eps && p.x <= x1 + eps && p.y >= y0 - eps && p.y <= y1 + eps;
  }
  bool contains(const Rect& r, double eps = 1e-12) const {
    return r.x0 >= x0 - eps && r.x1 <= x1 + eps && r.y0 >= y0 - eps && r.y1 <= y1 + eps;
  }
  /// Interiors overlap (touching edges do not count).
  bool overlaps(const Rect& r) const {
    return x0 < r.x1 && r.x0 < x1 && y0 < r.y1 && r.y0 < y1;
  }
  Rect inflated(double m) const { return {x0 - m, y0 - m, x1 + m, y1 + m}; }
  Vec2 clamp(Vec2 p) const { return {std::clamp(p.x, x0, x1), std::clamp(p.y, y0, y1)}; }

  std::array<Segment, 4> edges() const {
    return {Segment{{x0, y0}, {x1, y0}}, Segment{{x1, y0}, {x1, y1}},
            Segment{{x1, y1}, {x0, y1}}, Segment{{x0, y1}, {x0, y0}}};
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

namespace detail {
inline int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  constexpr double eps = 1e-12;
  if (v > eps) return 1;
  if (v < -eps) return -1;
  return 0;
}
inline bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) - 1e-12 <= p.x && p.x <= std::max(a.x, b.x) + 1e-12 &&
         std::min(a.y, b.y) - 1e-12 <= p.y && p.y <= std::max(a.y, b.y) + 1e-12;
}
}  // namespace detail

/// Closed segment intersection, collinear overlap included.
inline bool segments_intersect(const Segment& s, const Segment& t) {
  using detail::on_segment;
  using detail::orientation;
  const int o1 = orientation(s.a, s.b, t.a);
  const int o2 = orientation(s.a, s.b, t.b);
  const int o3 = orientation(t.a, t.b, s.a);
  const int o4 = orientation(t.a, t.b, s.b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(s.a, s.b, t.a)) return true;
  if (o2 == 0 && on_segment(s.a, s.b, t.b)) return true;
  if (o3 == 0 && on_segment(t.a, t.b, s.a)) return true;
  if (o4 == 0 && on_segment(t.a, t.b, s.b)) return true;
  return false;
}

/// True when the closed segment touches the closed box (Liang-Barsky clip).
inline bool segment_hits_rect(const Segment& s, const Rect& r) {
  double t0 = 0.0;
  double t1 = 1.0;
  const Vec2 d = s.b - s.a;
  const std::array<double, 4> p{-d.x, d.x, -d.y, d.y};
  const std::array<double, 4> q{s.a.x - r.x0, r.x1 - s.a.x, s.a.y - r.y0, r.y1 - s.a.y};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
    if (t0 > t1) return false;
  }
  return true;
}

}  // namespace beltamp
