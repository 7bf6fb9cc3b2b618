#pragma once

#include <beltamp/errors.hpp>
#include <beltamp/geometry.hpp>
#include <beltamp/ids.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <vector>

namespace beltamp::sim {

enum class HeightClass { low, mid, high };

NLOHMANN_JSON_SERIALIZE_ENUM(HeightClass, {{HeightClass::low, "low"},
                                           {HeightClass::mid, "mid"},
                                           {HeightClass::high, "high"}})

struct Room {
  std::string label;
  Rect rect;
};

struct Surface {
  std::string label;
  RoomId room;
  Rect footprint;
  HeightClass height = HeightClass::mid;
};

struct Occluder {
  std::string label;
  Rect box;
};

struct ObjectPlacement {
  std::string label;
  SurfaceId surface;
  Pose2 pose;
};

/// Opening in the wall shared by two rooms.
struct Doorway {
  RoomId a;
  RoomId b;
  Segment gap;
  Vec2 center() const { return 0.5 * (gap.a + gap.b); }
};

inline constexpr int kEnvironmentSchemaVersion = 1;

/// Planar household: rooms partitioned by walls, rectangular surfaces, box
/// occluders and the ground-truth object placements. Immutable once built.
class EnvironmentSpec {
 public:
  EnvironmentSpec() = default;
  EnvironmentSpec(std::vector<Room> rooms, std::vector<Surface> surfaces,
                  std::vector<Occluder> occluders, std::vector<ObjectPlacement> objects,
                  std::vector<Doorway> doorways)
      : rooms_(std::move(rooms)),
        surfaces_(std::move(surfaces)),
        occluders_(std::move(occluders)),
        objects_(std::move(objects)),
        doorways_(std::move(doorways)) {
    build();
  }

  const std::vector<Room>& rooms() const { return rooms_; }
  const std::vector<Surface>& surfaces() const { return surfaces_; }
  const std::vector<Occluder>& occluders() const { return occluders_; }
  const std::vector<ObjectPlacement>& objects() const { return objects_; }
  const std::vector<Doorway>& doorways() const { return doorways_; }
  const std::vector<Segment>& walls() const { return walls_; }

  std::size_t num_rooms() const { return rooms_.size(); }
  std::size_t num_surfaces() const { return surfaces_.size(); }
  std::size_t num_objects() const { return objects_.size(); }

  const Room& room(RoomId r) const { return rooms_.at(r.value); }
  const Surface& surface(SurfaceId s) const { return surfaces_.at(s.value); }
  const ObjectPlacement& object(ObjectId o) const { return objects_.at(o.value); }

  /// Surfaces of a room in table order.
  const std::vector<SurfaceId>& surfaces_in(RoomId r) const { return room_surfaces_.at(r.value); }

  /// Position of a surface within its room's list.
  std::size_t local_index(SurfaceId s) const { return local_index_.at(s.value); }

  std::optional<RoomId> find_room(const std::string& label) const {
    for (std::size_t i = 0; i < rooms_.size(); ++i)
      if (rooms_[i].label == label) return RoomId{i};
    return std::nullopt;
  }
  std::optional<SurfaceId> find_surface(const std::string& label) const {
    for (std::size_t i = 0; i < surfaces_.size(); ++i)
      if (surfaces_[i].label == label) return SurfaceId{i};
    return std::nullopt;
  }
  std::optional<ObjectId> find_object(const std::string& label) const {
    for (std::size_t i = 0; i < objects_.size(); ++i)
      if (objects_[i].label == label) return ObjectId{i};
    return std::nullopt;
  }

  std::optional<RoomId> room_at(Vec2 p) const {
    for (std::size_t i = 0; i < rooms_.size(); ++i)
      if (rooms_[i].rect.contains(p)) return RoomId{i};
    return std::nullopt;
  }

  std::optional<SurfaceId> surface_at(Vec2 p) const {
    for (std::size_t i = 0; i < surfaces_.size(); ++i)
      if (surfaces_[i].footprint.contains(p)) return SurfaceId{i};
    return std::nullopt;
  }

  /// Inside a room with the given clearance from walls, surfaces and occluders.
  bool in_free_space(Vec2 p, double clearance) const {
    bool inside = false;
    for (const auto& r : rooms_) {
      const Rect shrunk = r.rect.inflated(-clearance);
      if (shrunk.valid() && shrunk.contains(p)) {
        inside = true;
        break;
      }
    }
    if (!inside) return false;
    for (const auto& s : surfaces_)
      if (s.footprint.inflated(clearance).contains(p)) return false;
    for (const auto& o : occluders_)
      if (o.box.inflated(clearance).contains(p)) return false;
    return true;
  }

  bool line_of_sight_walls(Vec2 from, Vec2 to) const {
    const Segment ray{from, to};
    return std::none_of(walls_.begin(), walls_.end(),
                        [&](const Segment& w) { return segments_intersect(ray, w); });
  }

  bool line_of_sight_occluders(Vec2 from, Vec2 to) const {
    const Segment ray{from, to};
    return std::none_of(occluders_.begin(), occluders_.end(),
                        [&](const Occluder& o) { return segment_hits_rect(ray, o.box); });
  }

  /// Shortest travel distance through doorways; nullopt when unreachable.
  std::optional<double> try_nav_distance(Vec2 from, Vec2 to) const {
    const auto ra = room_at(from);
    const auto rb = room_at(to);
    if (!ra || !rb) return std::nullopt;
    if (*ra == *rb) return distance(from, to);

    // Nodes: doorways, then the two endpoints.
    const std::size_t nd = doorways_.size();
    const std::size_t src = nd;
    const std::size_t dst = nd + 1;
    auto node_pos = [&](std::size_t i) {
      if (i == src) return from;
      if (i == dst) return to;
      return doorways_[i].center();
    };
    auto touches = [&](std::size_t i, RoomId r) {
      if (i == src) return r == *ra;
      if (i == dst) return r == *rb;
      return doorways_[i].a == r || doorways_[i].b == r;
    };
    auto share_room = [&](std::size_t i, std::size_t j) {
      for (std::size_t r = 0; r < rooms_.size(); ++r)
        if (touches(i, RoomId{r}) && touches(j, RoomId{r})) return true;
      return false;
    };

    std::vector<double> dist(nd + 2, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[src] = 0.0;
    pq.push({0.0, src});
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (d > dist[u]) continue;
      if (u == dst) return d;
      for (std::size_t v = 0; v < nd + 2; ++v) {
        if (v == u || !share_room(u, v)) continue;
        const double nd2 = d + distance(node_pos(u), node_pos(v));
        if (nd2 < dist[v]) {
          dist[v] = nd2;
          pq.push({nd2, v});
        }
      }
    }
    return std::nullopt;
  }

  double nav_distance(Vec2 from, Vec2 to) const {
    auto d = try_nav_distance(from, to);
    if (!d) throw ContractViolation("nav_distance: endpoints not connected");
    return *d;
  }

  /// Point in front of the surface's longest free edge, used as its approach node.
  Vec2 approach_point(SurfaceId s, double standoff = 0.4) const {
    const Rect& f = surface(s).footprint;
    const Rect& r = room(surface(s).room).rect;
    const Vec2 c = f.center();
    const std::array<Vec2, 4> cands{Vec2{c.x, f.y0 - standoff}, Vec2{c.x, f.y1 + standoff},
                                    Vec2{f.x0 - standoff, c.y}, Vec2{f.x1 + standoff, c.y}};
    for (const Vec2& p : cands)
      if (in_free_space(p, 0.05)) return p;
    return r.clamp(cands[0]);
  }

 private:
  void build() {
    if (rooms_.empty()) throw ConfigurationError("environment has no rooms");
    for (const auto& r : rooms_)
      if (!r.rect.valid()) throw ConfigurationError("room '" + r.label + "' has an empty rectangle");
    for (std::size_t i = 0; i < rooms_.size(); ++i)
      for (std::size_t j = i + 1; j < rooms_.size(); ++j)
        if (rooms_[i].rect.overlaps(rooms_[j].rect))
          throw ConfigurationError("rooms '" + rooms_[i].label + "' and '" + rooms_[j].label + "' overlap");

    room_surfaces_.assign(rooms_.size(), {});
    local_index_.assign(surfaces_.size(), 0);
    for (std::size_t s = 0; s < surfaces_.size(); ++s) {
      const auto& surf = surfaces_[s];
      if (surf.room.value >= rooms_.size())
        throw ConfigurationError("surface '" + surf.label + "' names a missing room");
      if (!surf.footprint.valid() || !rooms_[surf.room.value].rect.contains(surf.footprint))
        throw ConfigurationError("surface '" + surf.label + "' is not inside its room");
      local_index_[s] = room_surfaces_[surf.room.value].size();
      room_surfaces_[surf.room.value].push_back(SurfaceId{s});
    }
    for (std::size_t r = 0; r < rooms_.size(); ++r)
      if (room_surfaces_[r].empty())
        throw ConfigurationError("room '" + rooms_[r].label + "' has no surfaces");
    for (const auto& o : objects_) {
      if (o.surface.value >= surfaces_.size())
        throw ConfigurationError("object '" + o.label + "' names a missing surface");
      if (!surfaces_[o.surface.value].footprint.contains(o.pose.position(), 1e-9))
        throw ConfigurationError("object '" + o.label + "' is not on its surface");
    }
    for (const auto& d : doorways_)
      if (d.a.value >= rooms_.size() || d.b.value >= rooms_.size() || d.a == d.b)
        throw ConfigurationError("doorway joins invalid rooms");

    build_walls();
    check_connected();
  }

  static bool on_edge(const Segment& edge, Vec2 p) {
    return std::abs(cross(edge.b - edge.a, p - edge.a)) < 1e-9 &&
           detail::on_segment(edge.a, edge.b, p);
  }

  // Room edges minus the doorway gaps lying on them.
  void build_walls() {
    walls_.clear();
    for (const auto& room : rooms_) {
      for (const Segment& edge : room.rect.edges()) {
        const Vec2 dir = edge.b - edge.a;
        const double len = norm(dir);
        std::vector<std::pair<double, double>> cuts;
        for (const auto& d : doorways_) {
          if (!on_edge(edge, d.gap.a) || !on_edge(edge, d.gap.b)) continue;
          double ta = dot(d.gap.a - edge.a, dir) / (len * len);
          double tb = dot(d.gap.b - edge.a, dir) / (len * len);
          if (ta > tb) std::swap(ta, tb);
          cuts.emplace_back(ta, tb);
        }
        std::sort(cuts.begin(), cuts.end());
        double t = 0.0;
        for (auto [a, b] : cuts) {
          if (a > t) walls_.push_back({edge.a + t * dir, edge.a + a * dir});
          t = std::max(t, b);
        }
        if (t < 1.0) walls_.push_back({edge.a + t * dir, edge.b});
      }
    }
  }

  void check_connected() const {
    std::vector<bool> seen(rooms_.size(), false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      const std::size_t r = stack.back();
      stack.pop_back();
      for (const auto& d : doorways_) {
        std::size_t other = rooms_.size();
        if (d.a.value == r) other = d.b.value;
        if (d.b.value == r) other = d.a.value;
        if (other < rooms_.size() && !seen[other]) {
          seen[other] = true;
          stack.push_back(other);
        }
      }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
      throw ConfigurationError("navigation graph is not connected");
  }

  std::vector<Room> rooms_;
  std::vector<Surface> surfaces_;
  std::vector<Occluder> occluders_;
  std::vector<ObjectPlacement> objects_;
  std::vector<Doorway> doorways_;

  std::vector<Segment> walls_;
  std::vector<std::vector<SurfaceId>> room_surfaces_;
  std::vector<std::size_t> local_index_;
};

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json rect_to_json(const Rect& r) { return {r.x0, r.y0, r.x1, r.y1}; }
inline Rect rect_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4) throw ConfigurationError("rectangle must be [x0,y0,x1,y1]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

inline nlohmann::json to_json(const EnvironmentSpec& env) {
  using nlohmann::json;
  json j;
  j["schema_version"] = kEnvironmentSchemaVersion;
  json rooms = json::array();
  for (std::size_t i = 0; i < env.num_rooms(); ++i)
    rooms.push_back({{"id", i}, {"label", env.rooms()[i].label}, {"rect", rect_to_json(env.rooms()[i].rect)}});
  j["rooms"] = rooms;
  json surfaces = json::array();
  for (std::size_t i = 0; i < env.num_surfaces(); ++i) {
    const auto& s = env.surfaces()[i];
    surfaces.push_back({{"id", i},
                        {"label", s.label},
                        {"room", s.room.value},
                        {"rect", rect_to_json(s.footprint)},
                        {"height", s.height}});
  }
  j["surfaces"] = surfaces;
  json occ = json::array();
  for (const auto& o : env.occluders()) occ.push_back({{"label", o.label}, {"rect", rect_to_json(o.box)}});
  j["occluders"] = occ;
  json objs = json::array();
  for (std::size_t i = 0; i < env.num_objects(); ++i) {
    const auto& o = env.objects()[i];
    objs.push_back({{"id", i},
                    {"label", o.label},
                    {"surface", o.surface.value},
                    {"pose", {o.pose.x, o.pose.y, o.pose.yaw}}});
  }
  j["objects"] = objs;
  json doors = json::array();
  for (const auto& d : env.doorways())
    doors.push_back({{"rooms", {d.a.value, d.b.value}}, {"gap", {d.gap.a.x, d.gap.a.y, d.gap.b.x, d.gap.b.y}}});
  j["doorways"] = doors;

  // Derived navigation graph: doorway nodes then surface approach nodes.
  json nodes = json::array();
  json edges = json::array();
  for (const auto& d : env.doorways()) nodes.push_back({{"kind", "doorway"}, {"xy", {d.center().x, d.center().y}}});
  for (std::size_t s = 0; s < env.num_surfaces(); ++s) {
    const Vec2 p = env.approach_point(SurfaceId{s});
    nodes.push_back({{"kind", "approach"}, {"surface", s}, {"xy", {p.x, p.y}}});
  }
  auto node_rooms = [&](std::size_t n) {
    std::vector<std::size_t> rs;
    if (n < env.doorways().size()) {
      rs = {env.doorways()[n].a.value, env.doorways()[n].b.value};
    } else {
      rs = {env.surfaces()[n - env.doorways().size()].room.value};
    }
    return rs;
  };
  for (std::size_t a = 0; a < nodes.size(); ++a)
    for (std::size_t b = a + 1; b < nodes.size(); ++b) {
      const auto ra = node_rooms(a);
      const auto rb = node_rooms(b);
      const bool shared = std::any_of(ra.begin(), ra.end(), [&](std::size_t r) {
        return std::find(rb.begin(), rb.end(), r) != rb.end();
      });
      if (shared) edges.push_back({a, b});
    }
  j["nav_graph"] = {{"nodes", nodes}, {"edges", edges}};
  return j;
}

inline EnvironmentSpec environment_from_json(const nlohmann::json& j) {
  try {
    if (j.value("schema_version", 0) != kEnvironmentSchemaVersion)
      throw ConfigurationError("unsupported environment schema_version");
    std::vector<Room> rooms;
    for (const auto& r : j.at("rooms")) rooms.push_back({r.at("label").get<std::string>(), rect_from_json(r.at("rect"))});
    std::vector<Surface> surfaces;
    for (const auto& s : j.at("surfaces"))
      surfaces.push_back({s.at("label").get<std::string>(), RoomId{s.at("room").get<std::size_t>()},
                          rect_from_json(s.at("rect")), s.value("height", HeightClass::mid)});
    std::vector<Occluder> occluders;
    for (const auto& o : j.value("occluders", nlohmann::json::array()))
      occluders.push_back({o.value("label", std::string("box")), rect_from_json(o.at("rect"))});
    std::vector<ObjectPlacement> objects;
    for (const auto& o : j.value("objects", nlohmann::json::array())) {
      const auto& p = o.at("pose");
      objects.push_back({o.at("label").get<std::string>(), SurfaceId{o.at("surface").get<std::size_t>()},
                         Pose2{p.at(0).get<double>(), p.at(1).get<double>(), p.size() > 2 ? p.at(2).get<double>() : 0.0}});
    }
    std::vector<Doorway> doors;
    for (const auto& d : j.value("doorways", nlohmann::json::array())) {
      const auto& g = d.at("gap");
      doors.push_back({RoomId{d.at("rooms").at(0).get<std::size_t>()}, RoomId{d.at("rooms").at(1).get<std::size_t>()},
                       Segment{{g.at(0).get<double>(), g.at(1).get<double>()},
                               {g.at(2).get<double>(), g.at(3).get<double>()}}});
    }
    return EnvironmentSpec(std::move(rooms), std::move(surfaces), std::move(occluders), std::move(objects),
                           std::move(doors));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError(std::string("malformed environment file: ") + e.what());
  }
}

inline EnvironmentSpec load_environment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open environment file " + path);
  return environment_from_json(nlohmann::json::parse(in));
}

inline void save_environment(const EnvironmentSpec& env, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigurationError("cannot write " + path);
  out << to_json(env).dump(2) << '\n';
}

}  // namespace beltamp::sim
