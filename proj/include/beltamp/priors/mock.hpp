#pragma once

#include <beltamp/priors/llm_priors.hpp>
#include <beltamp/priors/provider.hpp>
#include <beltamp/sim/dataset.hpp>

#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace beltamp::priors {

/// First-token alternatives that put the given logprob on each option letter.
inline std::map<std::string, double> letter_logprobs(const std::vector<double>& per_option) {
  std::map<std::string, double> top;
  for (std::size_t i = 0; i < per_option.size(); ++i) top[std::string(1, McqaQuery::letter(i))] = per_option[i];
  return top;
}

inline ChatResponse mcqa_reply(const std::vector<double>& per_option) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < per_option.size(); ++i)
    if (per_option[i] > per_option[best]) best = i;
  return {std::string(1, McqaQuery::letter(best)), letter_logprobs(per_option)};
}

/// Programmable provider for tests; counts calls.
class MockProvider : public Provider {
 public:
  std::function<ChatResponse(const ChatRequest&)> on_chat;
  std::function<std::vector<double>(const std::string&)> on_embed;
  std::string name = "mock";
  std::atomic<int> chat_calls{0};
  std::atomic<int> embed_calls{0};

  ChatResponse chat(const ChatRequest& req) override {
    ++chat_calls;
    if (!on_chat) throw ProviderError("mock has no chat handler");
    return on_chat(req);
  }
  std::vector<double> embed(const std::string& text) override {
    ++embed_calls;
    if (!on_embed) throw ProviderError("mock has no embedding handler");
    return on_embed(text);
  }
  std::string id() const override { return name; }
};

// ---------------------------------------------------------------------------

/// Hashed bag of content words: lower-cased alphabetic tokens minus stop
/// words, FNV-1a into `dim` buckets.
inline std::vector<double> bag_of_words_embedding(const std::string& text, std::size_t dim = 4096) {
  static const std::set<std::string> stop{
      "a",    "an",     "the",   "and",   "or",    "of",    "to",    "in",    "on",     "for",   "with",
      "is",   "are",    "it",    "its",   "it's",  "be",    "as",    "at",    "by",     "from",  "that",
      "this", "these",  "they",  "them",  "their", "can",   "also",  "often", "usually", "many", "people",
      "use",  "used",   "uses",  "using", "common", "commonly", "typically", "some", "other", "into", "up",
      "out",  "such",   "like",  "when",  "while", "which", "who",   "you",   "your",   "most",  "more",
      "one",  "two",    "three", "very",  "well",  "just",  "so",    "do",    "does",   "make",  "makes",
      "help", "helps",  "keep",  "keeps", "household", "home", "item", "object", "additionally"};
  std::vector<double> v(dim, 0.0);
  std::string word;
  auto flush = [&] {
    if (!word.empty() && !stop.count(word)) {
      std::uint64_t h = 1469598103934665603ULL;
      for (unsigned char c : word) {
        h ^= c;
        h *= 1099511628211ULL;
      }
      v[h % dim] += 1.0;
    }
    word.clear();
  };
  for (unsigned char c : text) {
    if (std::isalpha(c) || c == '\'') {
      word.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return v;
}

/// What the commonsense mock knows about each object.
struct ObjectKnowledge {
  std::string category;
  std::string description;
  bool dispersed = false;
};

inline std::map<std::string, ObjectKnowledge> load_object_knowledge(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open object knowledge " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& ex) {
    throw DatasetError(path + ": " + ex.what());
  }
  std::map<std::string, ObjectKnowledge> out;
  for (const auto& [name, e] : j.items())
    out[name] = {e.value("category", ""), e.at("description").get<std::string>(), e.value("dispersed", false)};
  return out;
}

/// Deterministic stand-in for a language model, answering from the
/// placement dataset and an object knowledge table.
///
/// MCQA: room options score by the object's room affinity, surface options by
/// the aggregated P(surface | object, room); logprob = ln(score + floor).
/// Descriptions and toggles come from the knowledge table; embeddings are
/// hashed bags of words. LGBU replies re-derive the commonsense prior and
/// discount the inspected location by its visibility after a miss. It does not
/// read the current belief, so it forgets earlier misses.
class CommonsenseMock : public Provider {
 public:
  CommonsenseMock(std::shared_ptr<const sim::PlacementDataset> data, std::map<std::string, ObjectKnowledge> knowledge,
                  double floor = 0.02)
      : data_(std::move(data)), knowledge_(std::move(knowledge)), floor_(floor) {}

  ChatResponse chat(const ChatRequest& req) override {
    switch (req.kind) {
      case RequestKind::mcqa:
        return mcqa_reply(commonsense_logprobs(req.meta));
      case RequestKind::describe:
        return {description(req.meta.at("object").get<std::string>()), {}};
      case RequestKind::toggle: {
        auto it = knowledge_.find(req.meta.at("object").get<std::string>());
        return {it != knowledge_.end() && it->second.dispersed ? "True" : "False", {}};
      }
      case RequestKind::lgbu:
        return mcqa_reply(lgbu_logprobs(req.meta));
      case RequestKind::embed:
        break;
    }
    throw ProviderError("commonsense mock cannot answer this request");
  }

  std::vector<double> embed(const std::string& text) override { return bag_of_words_embedding(text); }

  std::string id() const override { return "mock-commonsense"; }

  /// Unnormalised commonsense score of each option in a query.
  std::vector<double> scores(const nlohmann::json& meta) const {
    const auto object = meta.at("object").get<std::string>();
    const auto labels = meta.at("labels").get<std::vector<std::string>>();
    const auto level = meta.at("level").get<Level>();
    std::vector<double> s;
    for (const auto& l : labels) {
      if (level == Level::room) {
        s.push_back(data_->room_affinity(object, l));
      } else {
        const auto room = meta.value("room", std::string{});
        s.push_back(data_->surface_probability(object, room, l));
      }
    }
    return s;
  }

 private:
  std::vector<double> commonsense_logprobs(const nlohmann::json& meta) const {
    std::vector<double> lp;
    for (double s : scores(meta)) lp.push_back(std::log(s + floor_));
    return lp;
  }

  std::vector<double> lgbu_logprobs(const nlohmann::json& meta) const {
    auto s = scores(meta);
    const auto labels = meta.at("labels").get<std::vector<std::string>>();
    const auto& obs = meta.at("observation");
    const auto where = obs.at("location").get<std::string>();
    const double v = obs.at("visibility").get<double>();
    const bool found = obs.at("found").get<bool>();
    std::vector<double> lp;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      double p = s[i] + floor_;
      if (labels[i] == where) p = found ? 1.0 : p * (1.0 - 0.9 * v);
      lp.push_back(std::log(p));
    }
    return lp;
  }

  std::string description(const std::string& object) const {
    auto it = knowledge_.find(object);
    if (it != knowledge_.end()) return it->second.description;
    return "A " + object + " is an ordinary object. Its purpose depends on the room it is in. It has no special "
           "storage place.";
  }

  std::shared_ptr<const sim::PlacementDataset> data_;
  std::map<std::string, ObjectKnowledge> knowledge_;
  double floor_;
};

}  // namespace beltamp::priors
