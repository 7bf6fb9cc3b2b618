#pragma once

#include <beltamp/errors.hpp>
#include <beltamp/priors/provider.hpp>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>

namespace beltamp::priors {

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw ProviderError("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

/// Content key of a request: kind, model identity and the full prompt.
inline std::string cache_key(RequestKind kind, const std::string& model, const std::string& prompt) {
  return sha256_hex(nlohmann::json(kind).get<std::string>() + "\n" + model + "\n" + prompt);
}

struct CacheRecord {
  std::string key_hash;
  RequestKind kind = RequestKind::mcqa;
  std::string model;
  std::string prompt;
  std::string response;
  std::optional<std::map<std::string, double>> logprobs;
  std::optional<std::vector<double>> embedding;
};

inline nlohmann::json to_json(const CacheRecord& r) {
  nlohmann::json j{{"key_hash", r.key_hash}, {"kind", r.kind},         {"model", r.model},
                   {"prompt", r.prompt},     {"response", r.response}};
  if (r.logprobs) j["logprobs"] = *r.logprobs;
  if (r.embedding) j["embedding"] = *r.embedding;
  return j;
}

inline CacheRecord cache_record_from_json(const nlohmann::json& j) {
  CacheRecord r;
  r.key_hash = j.at("key_hash").get<std::string>();
  r.kind = j.at("kind").get<RequestKind>();
  r.model = j.value("model", "");
  r.prompt = j.at("prompt").get<std::string>();
  r.response = j.value("response", "");
  if (j.contains("logprobs")) r.logprobs = j.at("logprobs").get<std::map<std::string, double>>();
  if (j.contains("embedding")) r.embedding = j.at("embedding").get<std::vector<double>>();
  return r;
}

/// Append-only JSON-lines store of provider responses. Readers share the
/// in-memory index; appends go through one lock so a single writer owns the
/// file at a time. A later record with the same key wins on reload.
class PromptCache {
 public:
  PromptCache() = default;
  explicit PromptCache(std::string path, bool writable = true) : path_(std::move(path)), writable_(writable) {
    std::ifstream in(path_);
    std::string line;
    std::size_t lineno = 0;
    while (in && std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        auto rec = cache_record_from_json(nlohmann::json::parse(line));
        index_[rec.key_hash] = std::move(rec);
      } catch (const std::exception& ex) {
        throw ProviderError(path_ + ":" + std::to_string(lineno) + ": bad cache record: " + ex.what());
      }
    }
  }

  const std::string& path() const { return path_; }

  std::optional<CacheRecord> find(const std::string& key) const {
    std::lock_guard lock(mu_);
    auto it = index_.find(key);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return index_.size();
  }

  /// Distinct model identities among the records.
  std::set<std::string> models() const {
    std::lock_guard lock(mu_);
    std::set<std::string> out;
    for (const auto& [k, r] : index_) out.insert(r.model);
    return out;
  }

  void put(const CacheRecord& rec) {
    std::lock_guard lock(mu_);
    index_[rec.key_hash] = rec;
    if (!writable_ || path_.empty()) return;
    std::ofstream out(path_, std::ios::app);
    if (!out) throw ProviderError("cannot append to cache " + path_);
    out << to_json(rec).dump() << '\n';
  }

 private:
  std::string path_;
  bool writable_ = true;
  mutable std::mutex mu_;
  std::map<std::string, CacheRecord> index_;
};

/// Read-through cache in front of another provider: hits are served from the
/// cache, misses go to the inner provider and are appended.
class CachingProvider : public Provider {
 public:
  CachingProvider(std::shared_ptr<Provider> inner, std::shared_ptr<PromptCache> cache)
      : inner_(std::move(inner)), cache_(std::move(cache)) {}

  ChatResponse chat(const ChatRequest& req) override {
    const std::string prompt = req.prompt_text();
    const std::string key = cache_key(req.kind, inner_->id(), prompt);
    if (auto hit = cache_->find(key)) return {hit->response, hit->logprobs.value_or(std::map<std::string, double>{})};
    ChatResponse resp = inner_->chat(req);
    CacheRecord rec{key, req.kind, inner_->id(), prompt, resp.text, std::nullopt, std::nullopt};
    if (req.want_logprobs) rec.logprobs = resp.top_logprobs;
    cache_->put(rec);
    return resp;
  }

  std::vector<double> embed(const std::string& text) override {
    const std::string key = cache_key(RequestKind::embed, inner_->id(), text);
    if (auto hit = cache_->find(key)) {
      if (!hit->embedding) throw ProviderError("cached embedding record has no vector");
      return *hit->embedding;
    }
    auto v = inner_->embed(text);
    cache_->put({key, RequestKind::embed, inner_->id(), text, "", std::nullopt, v});
    return v;
  }

  std::string id() const override { return inner_->id(); }

 private:
  std::shared_ptr<Provider> inner_;
  std::shared_ptr<PromptCache> cache_;
};

/// Cache-only provider: no network, a miss is a MissingPrior error naming the
/// request.
class ReplayProvider : public Provider {
 public:
  ReplayProvider(std::shared_ptr<PromptCache> cache, std::string model)
      : cache_(std::move(cache)), model_(std::move(model)) {}

  ChatResponse chat(const ChatRequest& req) override {
    const std::string prompt = req.prompt_text();
    const std::string key = cache_key(req.kind, model_, prompt);
    auto hit = cache_->find(key);
    if (!hit) throw MissingPrior(missing(req.kind, key, prompt));
    return {hit->response, hit->logprobs.value_or(std::map<std::string, double>{})};
  }

  std::vector<double> embed(const std::string& text) override {
    const std::string key = cache_key(RequestKind::embed, model_, text);
    auto hit = cache_->find(key);
    if (!hit || !hit->embedding) throw MissingPrior(missing(RequestKind::embed, key, text));
    return *hit->embedding;
  }

  std::string id() const override { return model_; }

 private:
  static std::string missing(RequestKind kind, const std::string& key, const std::string& prompt) {
    std::string head = prompt.substr(0, 120);
    for (char& c : head)
      if (c == '\n') c = ' ';
    return "no cached " + nlohmann::json(kind).get<std::string>() + " record " + key.substr(0, 16) + " for: " + head;
  }

  std::shared_ptr<PromptCache> cache_;
  std::string model_;
};

}  // namespace beltamp::priors
