#pragma once

#include <beltamp/errors.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace beltamp::sim {

/// One annotator's ranking of the surfaces of a room for one object.
struct AnnotationEntry {
  std::string object;
  std::string room;
  std::vector<std::string> correct;      ///< most likely first
  std::vector<std::string> incorrect;    ///< least likely first
  std::vector<std::string> implausible;
  int annotator = 0;

  std::size_t num_surfaces() const { return correct.size() + incorrect.size() + implausible.size(); }
};

inline AnnotationEntry annotation_from_json(const nlohmann::json& j) {
  AnnotationEntry e;
  try {
    e.object = j.at("object").get<std::string>();
    e.room = j.at("room").get<std::string>();
    e.correct = j.value("correct", std::vector<std::string>{});
    e.incorrect = j.value("incorrect", std::vector<std::string>{});
    e.implausible = j.value("implausible", std::vector<std::string>{});
    e.annotator = j.value("annotator", 0);
  } catch (const nlohmann::json::exception& ex) {
    throw DatasetError(std::string("bad annotation row: ") + ex.what());
  }
  return e;
}

inline nlohmann::json to_json(const AnnotationEntry& e) {
  return {{"object", e.object},     {"room", e.room},
          {"correct", e.correct},   {"incorrect", e.incorrect},
          {"implausible", e.implausible}, {"annotator", e.annotator}};
}

/// Integer scores for one annotation: the ranked correct list counts down
/// from N, the incorrect list counts up from -N. Implausible surfaces get no
/// score here.
inline std::vector<std::pair<std::string, int>> score_annotation(const AnnotationEntry& e, int n) {
  std::set<std::string> seen;
  for (const auto* list : {&e.correct, &e.incorrect, &e.implausible})
    for (const auto& s : *list)
      if (!seen.insert(s).second) throw DatasetError("surface '" + s + "' appears twice in one annotation");
  if (static_cast<std::size_t>(n) < std::max(e.correct.size(), e.incorrect.size()))
    throw DatasetError("N is smaller than a ranked list");
  std::vector<std::pair<std::string, int>> out;
  for (std::size_t i = 0; i < e.correct.size(); ++i) out.emplace_back(e.correct[i], n - static_cast<int>(i));
  for (std::size_t i = 0; i < e.incorrect.size(); ++i) out.emplace_back(e.incorrect[i], -n + static_cast<int>(i));
  return out;
}

inline std::vector<std::pair<std::string, int>> score_annotation(const AnnotationEntry& e) {
  return score_annotation(e, static_cast<int>(e.num_surfaces()));
}

/// Aggregated placement distribution over a room's surfaces for one object.
struct PlacementDistribution {
  std::vector<std::string> surfaces;  ///< sorted labels that survived
  std::vector<double> normalized;     ///< min-max normalized summed scores
  std::vector<double> probability;    ///< normalized scores renormalized to sum 1
  double room_affinity = 0.0;         ///< share of "correct" labels among all labels

  std::optional<double> probability_of(const std::string& s) const {
    auto it = std::lower_bound(surfaces.begin(), surfaces.end(), s);
    if (it == surfaces.end() || *it != s) return std::nullopt;
    return probability[static_cast<std::size_t>(it - surfaces.begin())];
  }
  double normalized_of(const std::string& s) const {
    auto it = std::lower_bound(surfaces.begin(), surfaces.end(), s);
    if (it == surfaces.end() || *it != s) return 0.0;
    return normalized[static_cast<std::size_t>(it - surfaces.begin())];
  }
};

/// Sum scores over annotators, drop surfaces a strict majority called
/// implausible, min-max normalize and renormalize. A zero score range gives a
/// uniform result.
inline PlacementDistribution aggregate_annotations(const std::vector<AnnotationEntry>& entries) {
  if (entries.empty()) throw DatasetError("no annotations to aggregate");
  std::map<std::string, long> sum;
  std::map<std::string, std::size_t> implausible_votes;
  std::size_t correct_labels = 0;
  std::size_t all_labels = 0;
  for (const auto& e : entries) {
    if (e.object != entries.front().object || e.room != entries.front().room)
      throw DatasetError("aggregating annotations of different object/room pairs");
    for (const auto& [s, score] : score_annotation(e)) sum[s] += score;
    for (const auto& s : e.implausible) {
      sum.try_emplace(s, 0);
      ++implausible_votes[s];
    }
    correct_labels += e.correct.size();
    all_labels += e.num_surfaces();
  }
  PlacementDistribution out;
  std::vector<long> kept;
  for (const auto& [s, v] : sum) {
    if (2 * implausible_votes[s] > entries.size()) continue;
    out.surfaces.push_back(s);
    kept.push_back(v);
  }
  if (kept.empty())
    throw DatasetError("every surface was removed for " + entries.front().object + " in " + entries.front().room);
  const auto [lo, hi] = std::minmax_element(kept.begin(), kept.end());
  const double range = static_cast<double>(*hi - *lo);
  double total = 0.0;
  for (long v : kept) {
    const double n = range > 0.0 ? static_cast<double>(v - *lo) / range : 1.0;
    out.normalized.push_back(n);
    total += n;
  }
  for (double n : out.normalized) out.probability.push_back(n / total);
  out.room_affinity = all_labels == 0 ? 0.0 : static_cast<double>(correct_labels) / static_cast<double>(all_labels);
  return out;
}

/// Annotation rows plus their per (object, room) aggregation.
class PlacementDataset {
 public:
  PlacementDataset() = default;
  explicit PlacementDataset(std::vector<AnnotationEntry> entries) : entries_(std::move(entries)) {
    std::map<std::pair<std::string, std::string>, std::vector<AnnotationEntry>> groups;
    for (const auto& e : entries_) {
      groups[{e.object, e.room}].push_back(e);
      objects_.insert(e.object);
      auto& vocab = room_surfaces_[e.room];
      for (const auto* list : {&e.correct, &e.incorrect, &e.implausible}) vocab.insert(list->begin(), list->end());
    }
    for (auto& [key, rows] : groups) {
      try {
        dist_.emplace(key, aggregate_annotations(rows));
      } catch (const DatasetError&) {
        // Every surface implausible: the object simply has no placement in this room.
        excluded_.insert(key);
      }
    }
  }

  const std::vector<AnnotationEntry>& entries() const { return entries_; }
  std::vector<std::string> objects() const { return {objects_.begin(), objects_.end()}; }
  std::vector<std::string> rooms() const {
    std::vector<std::string> r;
    for (const auto& [k, v] : room_surfaces_) r.push_back(k);
    return r;
  }
  std::vector<std::string> surfaces_of(const std::string& room) const {
    auto it = room_surfaces_.find(room);
    if (it == room_surfaces_.end()) return {};
    return {it->second.begin(), it->second.end()};
  }
  bool has_room(const std::string& room) const { return room_surfaces_.count(room) > 0; }

  const PlacementDistribution* distribution(const std::string& object, const std::string& room) const {
    auto it = dist_.find({object, room});
    return it == dist_.end() ? nullptr : &it->second;
  }

  /// P(surface | object, room) from the aggregation; 0 when absent.
  double surface_probability(const std::string& object, const std::string& room, const std::string& surface) const {
    const auto* d = distribution(object, room);
    if (!d) return 0.0;
    return d->probability_of(surface).value_or(0.0);
  }

  double room_affinity(const std::string& object, const std::string& room) const {
    const auto* d = distribution(object, room);
    return d ? d->room_affinity : 0.0;
  }

  /// The room whose vocabulary contains `surface`, if unique.
  std::optional<std::string> room_of_surface(const std::string& surface) const {
    std::optional<std::string> found;
    for (const auto& [room, vocab] : room_surfaces_) {
      if (!vocab.count(surface)) continue;
      if (found) return std::nullopt;
      found = room;
    }
    return found;
  }

 private:
  std::vector<AnnotationEntry> entries_;
  std::set<std::string> objects_;
  std::map<std::string, std::set<std::string>> room_surfaces_;
  std::map<std::pair<std::string, std::string>, PlacementDistribution> dist_;
  std::set<std::pair<std::string, std::string>> excluded_;
};

/// JSON-lines loader; blank lines are skipped.
inline PlacementDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open dataset " + path);
  std::vector<AnnotationEntry> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& ex) {
      throw DatasetError(path + ":" + std::to_string(lineno) + ": " + ex.what());
    }
    rows.push_back(annotation_from_json(j));
  }
  return PlacementDataset(std::move(rows));
}

}  // namespace beltamp::sim
