#pragma once

#include <beltamp/log.hpp>
#include <beltamp/priors/provider.hpp>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <thread>

namespace beltamp::priors {

/// OpenAI-compatible chat-completions and embeddings client.
///
/// The endpoint is a base URL such as "https://api.openai.com/v1"; requests
/// go to {base}/chat/completions and {base}/embeddings. Temperature is fixed
/// at 0. Transport and 5xx/429 failures are retried three times in total with
/// exponential backoff.
class HttpProvider : public Provider {
 public:
  explicit HttpProvider(ProviderConfig cfg) : cfg_(std::move(cfg)) {
    const auto scheme_end = cfg_.endpoint.find("://");
    const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    const auto path_start = cfg_.endpoint.find('/', host_start);
    host_ = cfg_.endpoint.substr(0, path_start);
    prefix_ = path_start == std::string::npos ? "/v1" : cfg_.endpoint.substr(path_start);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  }

  ChatResponse chat(const ChatRequest& req) override {
    nlohmann::json body{{"model", cfg_.model}, {"temperature", 0}, {"max_tokens", req.max_tokens}};
    for (const auto& m : req.messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
    if (req.want_logprobs) {
      body["logprobs"] = true;
      body["top_logprobs"] = 20;
      body["max_tokens"] = 1;
    }
    const auto j = post(prefix_ + "/chat/completions", body);
    ChatResponse out;
    try {
      const auto& choice = j.at("choices").at(0);
      out.text = choice.at("message").value("content", "");
      if (req.want_logprobs) {
        const auto& first = choice.at("logprobs").at("content").at(0);
        for (const auto& alt : first.at("top_logprobs"))
          out.top_logprobs[alt.at("token").get<std::string>()] = alt.at("logprob").get<double>();
      }
    } catch (const nlohmann::json::exception& ex) {
      throw ProviderError(std::string("malformed chat response: ") + ex.what());
    }
    return out;
  }

  std::vector<double> embed(const std::string& text) override {
    const auto j = post(prefix_ + "/embeddings", {{"model", cfg_.embedding_model}, {"input", text}});
    try {
      return j.at("data").at(0).at("embedding").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& ex) {
      throw ProviderError(std::string("malformed embedding response: ") + ex.what());
    }
  }

  std::string id() const override { return cfg_.live_id(); }

 private:
  nlohmann::json post(const std::string& path, const nlohmann::json& body) {
    const char* key = std::getenv(cfg_.api_key_env.c_str());
    if (!key || !*key) throw ProviderError("API key variable " + cfg_.api_key_env + " is not set");
    httplib::Client cli(host_);
    cli.set_connection_timeout(cfg_.timeout_s, 0);
    cli.set_read_timeout(cfg_.timeout_s, 0);
    const httplib::Headers headers{{"Authorization", std::string("Bearer ") + key}};
    std::string last_error;
    for (int attempt = 0; attempt < 3; ++attempt) {
      if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(500 << attempt));
      auto res = cli.Post(path, headers, body.dump(), "application/json");
      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 401 || res->status == 403) throw ProviderError("authentication rejected by " + host_);
      if (res->status == 429 || res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200) throw ProviderError("HTTP " + std::to_string(res->status) + ": " + res->body);
      try {
        return nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::parse_error& ex) {
        throw ProviderError(std::string("response is not JSON: ") + ex.what());
      }
    }
    throw ProviderError("giving up after 3 attempts: " + last_error);
  }

  ProviderConfig cfg_;
  std::string host_;
  std::string prefix_;
};

}  // namespace beltamp::priors
