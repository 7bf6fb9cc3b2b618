#pragma once

#include <beltamp/rng.hpp>
#include <beltamp/sim/dataset.hpp>
#include <beltamp/sim/environment.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace beltamp::sim {

struct SamplerConfig {
  std::size_t num_rooms = 4;
  std::size_t num_surfaces = 8;
  std::size_t objects_per_surface = 1;
  bool adversarial = false;
  std::string target = "apple";
  std::vector<std::string> required_surfaces{"table"};
  std::size_t occluders = 1;      ///< boxes beside the target's surface
  double occluder_rate = 0.0;     ///< chance of a box beside each other surface
  double room_size = 6.0;
  std::size_t max_retries = 50;
};

/// Joint placement distribution of one object over the (room, surface) pairs
/// of an environment: P(s | o, room) from the aggregation, weighted by the
/// object's affinity to the room. Falls back to uniform when the dataset
/// gives the object no mass anywhere in the environment.
inline std::vector<double> placement_distribution(const PlacementDataset& data, const EnvironmentSpec& env,
                                                  const std::string& object, bool adversarial = false) {
  std::vector<double> w(env.num_surfaces(), 0.0);
  double total = 0.0;
  if (!adversarial) {
    for (std::size_t s = 0; s < env.num_surfaces(); ++s) {
      const auto& surf = env.surface(SurfaceId{s});
      const std::string& room = env.room(surf.room).label;
      w[s] = data.room_affinity(object, room) * data.surface_probability(object, room, surf.label);
      total += w[s];
    }
  }
  if (!(total > 0.0)) return std::vector<double>(env.num_surfaces(), 1.0 / static_cast<double>(env.num_surfaces()));
  for (double& x : w) x /= total;
  return w;
}

inline std::size_t draw_categorical(const std::vector<double>& w, Rng& rng) {
  double total = 0.0;
  for (double x : w) total += x;
  const double u = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    acc += w[i];
    if (u < acc) return i;
  }
  for (std::size_t i = w.size(); i-- > 0;)
    if (w[i] > 0.0) return i;
  return w.size() - 1;
}

/// Uniform pose on a footprint, kept a little inside its border.
inline Pose2 sample_object_pose(const Rect& f, Rng& rng) {
  const Rect inner = f.inflated(-std::min(0.05, 0.25 * std::min(f.width(), f.height())));
  const double x = rng.uniform(inner.x0, inner.x1);
  const double y = rng.uniform(inner.y0, inner.y1);
  return {x, y, 0.0};
}

namespace detail {

struct Layout {
  std::vector<Room> rooms;
  std::vector<Doorway> doors;
};

/// Rooms on a grid of square cells, each joined to its left neighbour, the
/// first column joined vertically, other vertical doors with probability 1/2.
inline Layout grid_rooms(const std::vector<std::string>& labels, double size, Rng& rng) {
  const std::size_t n = labels.size();
  const std::size_t cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  Layout out;
  for (std::size_t i = 0; i < n; ++i) {
    const double x0 = static_cast<double>(i % cols) * size;
    const double y0 = static_cast<double>(i / cols) * size;
    out.rooms.push_back({labels[i], Rect{x0, y0, x0 + size, y0 + size}});
  }
  auto door = [&](std::size_t a, std::size_t b, bool vertical_wall) {
    const Rect& ra = out.rooms[a].rect;
    const double off = rng.uniform(1.5, size - 1.5);
    Segment gap;
    if (vertical_wall) {
      const double x = ra.x1;
      gap = {{x, ra.y0 + off - 0.5}, {x, ra.y0 + off + 0.5}};
    } else {
      const double y = ra.y1;
      gap = {{ra.x0 + off - 0.5, y}, {ra.x0 + off + 0.5, y}};
    }
    out.doors.push_back({RoomId{a}, RoomId{b}, gap});
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (i % cols != 0) door(i - 1, i, true);
    if (i >= cols) {
      if (i % cols == 0 || rng.bernoulli(0.5)) door(i - cols, i, false);
    }
  }
  return out;
}

}  // namespace detail

/// Household environment sampler.
///
/// Room types and their surfaces come from the dataset vocabulary (required
/// surfaces and their rooms first). The target is placed by its joint
/// placement distribution; every surface then receives `objects_per_surface`
/// further objects drawn in proportion to their aggregated probability for
/// that surface. Adversarial mode draws every placement uniformly. One
/// occluder per config slot is put beside the target's surface.
inline EnvironmentSpec sample_environment(const PlacementDataset& data, const SamplerConfig& cfg, Rng& rng) {
  if (cfg.num_rooms < 1 || cfg.num_surfaces < cfg.num_rooms)
    throw ConfigurationError("layout needs at least one surface per room");
  for (std::size_t attempt = 0; attempt < cfg.max_retries; ++attempt) {
    // Rooms: those hosting required surfaces, then random others.
    std::vector<std::string> room_labels;
    std::map<std::string, std::vector<std::string>> forced;
    bool bad = false;
    for (const auto& s : cfg.required_surfaces) {
      const auto r = data.room_of_surface(s);
      if (!r) throw GenerationError("required surface '" + s + "' has no unique room in the dataset");
      if (std::find(room_labels.begin(), room_labels.end(), *r) == room_labels.end()) room_labels.push_back(*r);
      forced[*r].push_back(s);
    }
    std::vector<std::string> pool = data.rooms();
    std::erase_if(pool, [&](const std::string& r) {
      return std::find(room_labels.begin(), room_labels.end(), r) != room_labels.end();
    });
    while (room_labels.size() < cfg.num_rooms) {
      if (pool.empty()) throw GenerationError("dataset has too few room types for the layout");
      const std::size_t k = rng.index(pool.size());
      room_labels.push_back(pool[k]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k));
    }
    if (room_labels.size() > cfg.num_rooms) throw GenerationError("required surfaces span more rooms than the layout");
    // Shuffle room order so the required room is not always first.
    for (std::size_t i = room_labels.size(); i > 1; --i) std::swap(room_labels[i - 1], room_labels[rng.index(i)]);

    // Surface counts per room.
    std::vector<std::size_t> counts(cfg.num_rooms, cfg.num_surfaces / cfg.num_rooms);
    for (std::size_t extra = cfg.num_surfaces % cfg.num_rooms; extra > 0; --extra) {
      std::size_t r = rng.index(cfg.num_rooms);
      while (counts[r] > cfg.num_surfaces / cfg.num_rooms) r = (r + 1) % cfg.num_rooms;
      ++counts[r];
    }

    auto layout = detail::grid_rooms(room_labels, cfg.room_size, rng);
    std::vector<Surface> surfaces;
    std::set<std::string> used;
    for (std::size_t r = 0; r < cfg.num_rooms && !bad; ++r) {
      std::vector<std::string> labels = forced[room_labels[r]];
      std::vector<std::string> vocab = data.surfaces_of(room_labels[r]);
      std::erase_if(vocab, [&](const std::string& s) {
        return used.count(s) || std::find(labels.begin(), labels.end(), s) != labels.end();
      });
      while (labels.size() < counts[r]) {
        if (vocab.empty()) {
          bad = true;
          break;
        }
        const std::size_t k = rng.index(vocab.size());
        labels.push_back(vocab[k]);
        vocab.erase(vocab.begin() + static_cast<std::ptrdiff_t>(k));
      }
      if (bad || labels.size() > 8) {
        bad = true;
        break;
      }
      // 3x3 cells inside the room, centre cell kept free for navigation.
      std::vector<std::size_t> cells{0, 1, 2, 3, 5, 6, 7, 8};
      const Rect& room = layout.rooms[r].rect;
      const double inset = 0.8;
      const double cell = (room.width() - 2.0 * inset) / 3.0;
      for (const auto& label : labels) {
        used.insert(label);
        const std::size_t k = rng.index(cells.size());
        const std::size_t c = cells[k];
        cells.erase(cells.begin() + static_cast<std::ptrdiff_t>(k));
        const double w = rng.uniform(0.6, 0.9);
        const double h = rng.uniform(0.45, 0.8);
        const double cx = room.x0 + inset + (static_cast<double>(c % 3) + 0.5) * cell + rng.uniform(-0.05, 0.05);
        const double cy = room.y0 + inset + (static_cast<double>(c / 3) + 0.5) * cell + rng.uniform(-0.05, 0.05);
        surfaces.push_back({label, RoomId{r}, Rect{cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2}, HeightClass::mid});
      }
    }
    if (bad) continue;

    // Surface ids follow room order; the environment build sorts nothing, so
    // placements below index `surfaces` directly.
    EnvironmentSpec shell(layout.rooms, surfaces, {}, {}, layout.doors);

    std::vector<ObjectPlacement> objects;
    std::set<std::string> placed;
    const std::vector<std::string> vocab = data.objects();
    if (std::find(vocab.begin(), vocab.end(), cfg.target) == vocab.end())
      throw GenerationError("target '" + cfg.target + "' is not in the dataset");
    const auto target_w = placement_distribution(data, shell, cfg.target, cfg.adversarial);
    const std::size_t ts = draw_categorical(target_w, rng);
    objects.push_back({cfg.target, SurfaceId{ts}, sample_object_pose(surfaces[ts].footprint, rng)});
    placed.insert(cfg.target);

    for (std::size_t s = 0; s < surfaces.size(); ++s) {
      for (std::size_t k = 0; k < cfg.objects_per_surface; ++k) {
        std::vector<std::string> cands;
        std::vector<double> w;
        for (const auto& o : vocab) {
          if (placed.count(o)) continue;
          cands.push_back(o);
          const auto& room = layout.rooms[surfaces[s].room.value].label;
          w.push_back(cfg.adversarial ? 1.0
                                      : data.room_affinity(o, room) * data.surface_probability(o, room, surfaces[s].label));
        }
        if (cands.empty()) break;
        if (std::all_of(w.begin(), w.end(), [](double x) { return x <= 0.0; })) std::fill(w.begin(), w.end(), 1.0);
        const std::size_t pick = draw_categorical(w, rng);
        objects.push_back({cands[pick], SurfaceId{s}, sample_object_pose(surfaces[s].footprint, rng)});
        placed.insert(cands[pick]);
      }
    }

    // Occluders beside a surface, on the side facing the room centre: the
    // target's surface gets `occluders`, every other one a box with
    // probability `occluder_rate`.
    std::vector<Occluder> occluders;
    auto occlude = [&](std::size_t s) {
      const Rect& tf = surfaces[s].footprint;
      const Rect& troom = layout.rooms[surfaces[s].room.value].rect;
      const Vec2 toward = troom.center() - tf.center();
      const double len = 0.5 * (std::abs(toward.x) > std::abs(toward.y) ? tf.height() : tf.width());
      const double t = 0.25;
      const double off = rng.uniform(0.0, 0.5) * len;
      Rect box;
      if (std::abs(toward.x) > std::abs(toward.y)) {
        const double x = toward.x > 0 ? tf.x1 + 0.05 : tf.x0 - 0.05 - t;
        box = {x, tf.y0 + off, x + t, tf.y0 + off + len};
      } else {
        const double y = toward.y > 0 ? tf.y1 + 0.05 : tf.y0 - 0.05 - t;
        box = {tf.x0 + off, y, tf.x0 + off + len, y + t};
      }
      occluders.push_back({"box" + std::to_string(occluders.size()), box});
    };
    for (std::size_t i = 0; i < cfg.occluders; ++i) occlude(ts);
    if (cfg.occluder_rate > 0.0)
      for (std::size_t s = 0; s < surfaces.size(); ++s)
        if (s != ts && rng.uniform() < cfg.occluder_rate) occlude(s);

    try {
      return EnvironmentSpec(layout.rooms, surfaces, occluders, objects, layout.doors);
    } catch (const ConfigurationError&) {
      continue;
    }
  }
  throw GenerationError("no feasible layout after " + std::to_string(cfg.max_retries) + " attempts");
}

/// Free point nearest the centre of room 0, used as the robot's start.
inline Pose2 default_start(const EnvironmentSpec& env) {
  const Rect& r = env.room(RoomId{0}).rect;
  const Vec2 c = r.center();
  for (double rad = 0.0; rad < r.width() / 2; rad += 0.1)
    for (int k = 0; k < 16; ++k) {
      const double a = k * std::numbers::pi / 8.0;
      const Vec2 p{c.x + rad * std::cos(a), c.y + rad * std::sin(a)};
      if (env.in_free_space(p, 0.3)) return {p.x, p.y, 0.0};
    }
  throw GenerationError("room 0 has no free start position");
}

}  // namespace beltamp::sim
