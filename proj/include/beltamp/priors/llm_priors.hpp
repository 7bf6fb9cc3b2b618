#pragma once

#include <beltamp/belief/observation.hpp>
#include <beltamp/errors.hpp>
#include <beltamp/log.hpp>
#include <beltamp/priors/provider.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace beltamp::priors {

enum class Level { room, surface };

NLOHMANN_JSON_SERIALIZE_ENUM(Level, {{Level::room, "room"}, {Level::surface, "surface"}})

/// Multiple-choice location question. Labels are printed verbatim; `room`
/// names the room a surface-level query is conditioned on.
struct McqaQuery {
  std::string object;
  std::vector<std::string> labels;
  Level level = Level::room;
  std::string room;

  static char letter(std::size_t i) { return static_cast<char>('A' + i); }

  void validate() const {
    if (labels.size() < 2 || labels.size() > 26) throw ContractViolation("MCQA needs between 2 and 26 options");
  }
};

inline nlohmann::json to_json(const McqaQuery& q) {
  return {{"object", q.object}, {"labels", q.labels}, {"level", q.level}, {"room", q.room}};
}

inline std::string build_mcqa_prompt(const McqaQuery& q) {
  q.validate();
  std::string s = "Predict the location of a " + q.object + ".\n";
  for (std::size_t i = 0; i < q.labels.size(); ++i) s += std::string("(") + McqaQuery::letter(i) + ") " + q.labels[i] + "\n";
  s += "Return the letter that represents the location:";
  return s;
}

/// Numerically stable softmax.
inline std::vector<double> logprobs_to_prior(const std::vector<double>& logprobs) {
  expects(logprobs.size() >= 2, "a prior needs at least two options");
  double hi = -std::numeric_limits<double>::infinity();
  for (double l : logprobs) {
    expects(!std::isnan(l) && l != std::numeric_limits<double>::infinity(), "logprob must be finite or -inf");
    hi = std::max(hi, l);
  }
  if (hi == -std::numeric_limits<double>::infinity()) throw ProviderError("every option logprob is -inf");
  std::vector<double> p(logprobs.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(logprobs[i] - hi);
    sum += p[i];
  }
  for (double& x : p) x /= sum;
  return p;
}

inline constexpr double kMissingLetterLogprob = -20.0;

/// Option logprobs from first-token alternatives: each letter matches the bare
/// token or its leading-space variant; absent letters get -20.
inline std::vector<double> option_logprobs(const std::map<std::string, double>& top, std::size_t n) {
  std::vector<double> out(n, kMissingLetterLogprob);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string l(1, McqaQuery::letter(i));
    bool found = false;
    double best = -std::numeric_limits<double>::infinity();
    for (const std::string& tok : {l, " " + l}) {
      auto it = top.find(tok);
      if (it != top.end()) {
        best = std::max(best, it->second);
        found = true;
      }
    }
    if (found) out[i] = best;
  }
  return out;
}

struct PriorRecord {
  McqaQuery query;
  std::vector<double> option_logprobs;
  std::vector<double> prior;
  std::string provider_id;
};

inline nlohmann::json to_json(const PriorRecord& r) {
  return {{"query", to_json(r.query)}, {"option_logprobs", r.option_logprobs}, {"prior", r.prior},
          {"provider_id", r.provider_id}};
}

inline PriorRecord run_mcqa(const McqaQuery& q, Provider& provider) {
  ChatRequest req;
  req.kind = RequestKind::mcqa;
  req.messages = {{"user", build_mcqa_prompt(q)}};
  req.want_logprobs = true;
  req.max_tokens = 1;
  req.meta = to_json(q);
  const ChatResponse resp = provider.chat(req);
  PriorRecord rec;
  rec.query = q;
  rec.option_logprobs = option_logprobs(resp.top_logprobs, q.labels.size());
  rec.prior = logprobs_to_prior(rec.option_logprobs);
  rec.provider_id = provider.id();
  return rec;
}

inline PriorRecord generate_room_prior(const std::string& object, const std::vector<std::string>& rooms,
                                       Provider& provider) {
  return run_mcqa({object, rooms, Level::room, ""}, provider);
}

/// Surface prior conditioned on one room; a single-surface room needs no query.
inline PriorRecord generate_surface_prior(const std::string& object, const std::vector<std::string>& surfaces,
                                          const std::string& room, Provider& provider) {
  if (surfaces.size() == 1) return {{object, surfaces, Level::surface, room}, {0.0}, {1.0}, provider.id()};
  return run_mcqa({object, surfaces, Level::surface, room}, provider);
}

// ---------------------------------------------------------------------------
// Object-use descriptions and similarity

inline std::string describe_prompt(const std::string& object) {
  return "Explain the common use of a " + object + " in three sentences.";
}

/// Collapse all whitespace runs to single spaces and trim.
inline std::string squash_whitespace(const std::string& s) {
  std::istringstream in(s);
  std::string word;
  std::string out;
  while (in >> word) {
    if (!out.empty()) out += ' ';
    out += word;
  }
  return out;
}

inline std::string describe_object_uses(const std::string& object, Provider& provider) {
  ChatRequest req;
  req.kind = RequestKind::describe;
  req.messages = {{"user", describe_prompt(object)}};
  req.meta = {{"object", object}};
  const ChatResponse resp = provider.chat(req);
  if (squash_whitespace(resp.text).empty()) throw ProviderError("empty description for " + object);
  return resp.text;
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ProviderError("embedding dimensions differ");
  double ab = 0.0;
  double aa = 0.0;
  double bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (!(aa > 0.0) || !(bb > 0.0)) throw ProviderError("zero-norm embedding");
  return std::clamp(ab / std::sqrt(aa * bb), -1.0, 1.0);
}

/// Embedding of an object's use description (sentences joined by single spaces).
inline std::vector<double> description_embedding(const std::string& object, Provider& provider) {
  return provider.embed(squash_whitespace(describe_object_uses(object, provider)));
}

inline double similarity(const std::string& j, const std::string& k, Provider& provider) {
  if (j == k) return 1.0;
  return cosine(description_embedding(j, provider), description_embedding(k, provider));
}

// ---------------------------------------------------------------------------
// Co-location toggler

inline constexpr const char* kToggleSystemPrompt =
    "You will be given an object that commonly appears in a typical household environment. Using common sense, "
    "determine if the object tends to be distributed throughout a typical household, such as doorknobs and light "
    "switches.";

/// True when co-location evidence from this object stays enabled. A reply of
/// "True" (the object is spread around the house) disables it; anything
/// unparseable keeps it enabled and logs a warning.
inline bool colocation_toggle(const std::string& object, Provider& provider) {
  ChatRequest req;
  req.kind = RequestKind::toggle;
  req.messages = {{"system", kToggleSystemPrompt}, {"user", "The following is the object: " + object}};
  req.max_tokens = 4;
  req.meta = {{"object", object}};
  std::string r = squash_whitespace(provider.chat(req).text);
  if (!r.empty() && r.back() == '.') r.pop_back();
  std::transform(r.begin(), r.end(), r.begin(), [](unsigned char c) { return std::tolower(c); });
  if (r == "true") return false;
  if (r == "false") return true;
  log_warning("co-location toggler reply for '" + object + "' is not True/False; keeping co-location enabled");
  return true;
}

/// Similarity matrix over `objects`, with toggles from the toggler.
inline belief::SimilarityMatrix build_similarity_matrix(const std::vector<std::string>& objects, Provider& provider,
                                                        bool with_toggle = true) {
  belief::SimilarityMatrix m(objects.size());
  std::vector<std::vector<double>> emb;
  for (const auto& o : objects) emb.push_back(description_embedding(o, provider));
  for (std::size_t j = 0; j < objects.size(); ++j) {
    for (std::size_t k = j + 1; k < objects.size(); ++k) {
      const double s = objects[j] == objects[k] ? 1.0 : cosine(emb[j], emb[k]);
      m.set(ObjectId{j}, ObjectId{k}, s);
    }
    if (with_toggle) m.set_enabled(ObjectId{j}, colocation_toggle(objects[j], provider));
  }
  m.check_invariants();
  return m;
}

// ---------------------------------------------------------------------------
// LLM-generated belief update

struct LgbuObservation {
  std::string location;  ///< label of the inspected room or surface
  double visibility = 0.0;
  bool found = false;
  std::vector<std::string> co_detected;
};

inline constexpr const char* kLgbuSystemPrompt =
    "You will receive:\n"
    "- Current belief about where an object might be located.\n"
    "- observation_location: the location that was just inspected.\n"
    "- visibility: how much of the location was visible. 0 means not visible at all, 1 means fully visible.\n"
    "- result: whether the object was found there.\n"
    "- co_detected: other objects found at the same location.\n"
    "Based on this information and common sense, predict where the object is most likely to be now. Choose the "
    "most likely location from the given options.";

inline std::string fixed2(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

inline std::string lgbu_user_prompt(const std::string& object, const std::vector<std::string>& options,
                                    const std::vector<double>& belief, const LgbuObservation& obs) {
  std::string belief_text;
  for (std::size_t i = 0; i < options.size(); ++i)
    belief_text += (i ? ", " : "") + options[i] + ": " + fixed2(belief[i]);
  std::string co;
  for (std::size_t i = 0; i < obs.co_detected.size(); ++i) co += (i ? ", " : "") + obs.co_detected[i];
  if (co.empty()) co = "none";
  std::string s;
  s += "- Current belief about " + object + ": " + belief_text + "\n";
  s += "- observation_location: " + obs.location + "\n";
  s += "- visibility: " + fixed2(obs.visibility) + "\n";
  s += std::string("- result: ") + (obs.found ? "found" : "not found") + "\n";
  s += "- co_detected: " + co + "\n";
  s += "Given this information, where is " + object + " most likely to be?";
  for (std::size_t i = 0; i < options.size(); ++i) s += std::string("\n(") + McqaQuery::letter(i) + ") " + options[i];
  return s;
}

/// Replacement categorical over `options` predicted by the model. This does
/// not multiply into the current belief; it replaces it.
inline std::vector<double> lgbu_update(const std::string& object, const std::vector<std::string>& options,
                                       const std::vector<double>& current, const LgbuObservation& obs,
                                       Provider& provider, Level level = Level::room, const std::string& room = "") {
  expects(options.size() == current.size(), "belief and options differ in length");
  if (options.size() == 1) return {1.0};
  McqaQuery q{object, options, level, room};
  q.validate();
  ChatRequest req;
  req.kind = RequestKind::lgbu;
  req.messages = {{"system", kLgbuSystemPrompt}, {"user", lgbu_user_prompt(object, options, current, obs)}};
  req.want_logprobs = true;
  req.max_tokens = 1;
  req.meta = to_json(q);
  req.meta["belief"] = current;
  req.meta["observation"] = {{"location", obs.location},
                             {"visibility", std::round(obs.visibility * 100.0) / 100.0},
                             {"found", obs.found},
                             {"co_detected", obs.co_detected}};
  const ChatResponse resp = provider.chat(req);
  return logprobs_to_prior(option_logprobs(resp.top_logprobs, options.size()));
}

}  // namespace beltamp::priors
