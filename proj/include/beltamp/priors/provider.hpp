#pragma once

#include <beltamp/errors.hpp>

#include <nlohmann/json.hpp>

#include <map>
#include <string>
#include <vector>

namespace beltamp::priors {

/// What a request is for; also the cache record kind.
enum class RequestKind { mcqa, describe, toggle, embed, lgbu };

NLOHMANN_JSON_SERIALIZE_ENUM(RequestKind, {{RequestKind::mcqa, "mcqa"},
                                           {RequestKind::describe, "describe"},
                                           {RequestKind::toggle, "toggle"},
                                           {RequestKind::embed, "embed"},
                                           {RequestKind::lgbu, "lgbu"}})

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  RequestKind kind = RequestKind::mcqa;
  std::vector<ChatMessage> messages;
  bool want_logprobs = false;  ///< top logprobs of the first generated token
  int max_tokens = 256;
  /// Structured description of the query. Never sent over the wire; mocks
  /// answer from it instead of parsing prompt text.
  nlohmann::json meta;

  /// Canonical text of the whole prompt, used for cache keys.
  std::string prompt_text() const {
    std::string s;
    for (const auto& m : messages) s += "[" + m.role + "]\n" + m.content + "\n";
    return s;
  }
};

struct ChatResponse {
  std::string text;
  std::map<std::string, double> top_logprobs;  ///< first-token alternatives
};

/// Language-model backend contract shared by live, cached, replay and mock
/// providers. Implementations must be safe to call from several threads.
class Provider {
 public:
  virtual ~Provider() = default;
  virtual ChatResponse chat(const ChatRequest& req) = 0;
  virtual std::vector<double> embed(const std::string& text) = 0;
  /// Model identity; part of every cache key.
  virtual std::string id() const = 0;
};

enum class ProviderMode { live, replay, mock };

NLOHMANN_JSON_SERIALIZE_ENUM(ProviderMode,
                             {{ProviderMode::live, "live"}, {ProviderMode::replay, "replay"}, {ProviderMode::mock, "mock"}})

inline ProviderMode parse_mode(const std::string& s) {
  if (s == "live") return ProviderMode::live;
  if (s == "replay") return ProviderMode::replay;
  if (s == "mock") return ProviderMode::mock;
  throw ConfigurationError("unknown provider mode '" + s + "'");
}

struct ProviderConfig {
  ProviderMode mode = ProviderMode::mock;
  std::string endpoint = "https://api.openai.com";
  std::string model = "gpt-4o";
  std::string embedding_model = "text-embedding-3-small";
  std::string api_key_env = "OPENAI_API_KEY";
  std::string cache_path;
  int timeout_s = 60;
  std::string replay_id;  ///< model identity replay looks records up under

  /// Identity a live provider records its cache entries with.
  std::string live_id() const { return model + "|" + embedding_model; }
};

inline ProviderConfig provider_config_from_json(const nlohmann::json& j) {
  ProviderConfig c;
  if (j.contains("mode")) c.mode = parse_mode(j.at("mode").get<std::string>());
  c.endpoint = j.value("endpoint", c.endpoint);
  c.model = j.value("model", c.model);
  c.embedding_model = j.value("embedding_model", c.embedding_model);
  c.api_key_env = j.value("api_key_env", c.api_key_env);
  c.cache_path = j.value("cache", c.cache_path);
  c.timeout_s = j.value("timeout_s", c.timeout_s);
  c.replay_id = j.value("replay_id", c.replay_id);
  return c;
}

}  // namespace beltamp::priors
