#pragma once

#include <beltamp/belief/hierarchical_belief.hpp>
#include <beltamp/sim/environment.hpp>

#include <optional>
#include <sstream>
#include <string>

namespace beltamp::sim {

/// Debug snapshot: rooms and walls, surfaces (blue), occluders (yellow),
/// objects (grey), optional particle overlay and robot marker.
inline std::string render_svg(const EnvironmentSpec& env, const belief::HierarchicalBelief* belief = nullptr,
                              std::optional<Pose2> robot = std::nullopt, double scale = 60.0) {
  double x1 = 0.0;
  double y1 = 0.0;
  for (const auto& r : env.rooms()) {
    x1 = std::max(x1, r.rect.x1);
    y1 = std::max(y1, r.rect.y1);
  }
  // SVG y grows downward; flip so the map reads like the plan view.
  auto X = [&](double x) { return x * scale; };
  auto Y = [&](double y) { return (y1 - y) * scale; };
  auto rect = [&](std::ostringstream& os, const Rect& r, const char* fill, const char* stroke) {
    os << "<rect x='" << X(r.x0) << "' y='" << Y(r.y1) << "' width='" << r.width() * scale << "' height='"
       << r.height() * scale << "' fill='" << fill << "' stroke='" << stroke << "'/>\n";
  };

  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << x1 * scale << "' height='" << y1 * scale << "'>\n";
  for (const auto& r : env.rooms()) {
    rect(os, r.rect, "#f7f7f7", "none");
    os << "<text x='" << X(r.rect.x0) + 4 << "' y='" << Y(r.rect.y1) + 14 << "' font-size='12'>" << r.label
       << "</text>\n";
  }
  for (const auto& w : env.walls())
    os << "<line x1='" << X(w.a.x) << "' y1='" << Y(w.a.y) << "' x2='" << X(w.b.x) << "' y2='" << Y(w.b.y)
       << "' stroke='black' stroke-width='3'/>\n";
  for (const auto& s : env.surfaces()) {
    rect(os, s.footprint, "#9ec5ff", "#1f5fbf");
    os << "<text x='" << X(s.footprint.x0) << "' y='" << Y(s.footprint.y0) + 11 << "' font-size='9'>" << s.label
       << "</text>\n";
  }
  for (const auto& o : env.occluders()) rect(os, o.box, "#ffe066", "#b38f00");
  if (belief) {
    for (std::size_t s = 0; s < belief->layout().num_surfaces(); ++s) {
      const double mass = belief->surface_mass(SurfaceId{s});
      for (const auto& p : belief->particles(SurfaceId{s}))
        os << "<circle cx='" << X(p.pose.x) << "' cy='" << Y(p.pose.y) << "' r='1.5' fill='red' fill-opacity='"
           << std::min(1.0, 0.1 + mass) << "'/>\n";
    }
  }
  for (const auto& o : env.objects()) {
    os << "<rect x='" << X(o.pose.x) - 4 << "' y='" << Y(o.pose.y) - 4
       << "' width='8' height='8' fill='#888'/>\n";
    os << "<text x='" << X(o.pose.x) + 5 << "' y='" << Y(o.pose.y) - 5 << "' font-size='8'>" << o.label
       << "</text>\n";
  }
  if (robot)
    os << "<circle cx='" << X(robot->x) << "' cy='" << Y(robot->y) << "' r='6' fill='green'/>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace beltamp::sim
