#pragma once

#include <beltamp/priors/cache.hpp>
#include <beltamp/priors/http_provider.hpp>
#include <beltamp/priors/mock.hpp>

#include <memory>

namespace beltamp::priors {

/// Inputs the commonsense mock answers from.
struct MockSources {
  std::shared_ptr<const sim::PlacementDataset> dataset;
  std::map<std::string, ObjectKnowledge> knowledge;
};

/// Build the provider stack for a mode: live and mock go through a
/// read-through cache when a cache path is set; replay reads the cache only.
inline std::shared_ptr<Provider> make_provider(const ProviderConfig& cfg, const MockSources& mock = {}) {
  switch (cfg.mode) {
    case ProviderMode::replay: {
      if (cfg.cache_path.empty()) throw ConfigurationError("replay mode needs a cache file");
      auto cache = std::make_shared<PromptCache>(cfg.cache_path, false);
      // Without an explicit identity, a cache recorded by one provider
      // replays under that provider's identity.
      std::string id = cfg.replay_id;
      if (id.empty()) {
        const auto models = cache->models();
        id = models.size() == 1 ? *models.begin() : cfg.live_id();
      }
      return std::make_shared<ReplayProvider>(cache, id);
    }
    case ProviderMode::live: {
      auto http = std::make_shared<HttpProvider>(cfg);
      if (cfg.cache_path.empty()) return http;
      return std::make_shared<CachingProvider>(http, std::make_shared<PromptCache>(cfg.cache_path));
    }
    case ProviderMode::mock: {
      if (!mock.dataset) throw ConfigurationError("mock mode needs the placement dataset");
      auto m = std::make_shared<CommonsenseMock>(mock.dataset, mock.knowledge);
      if (cfg.cache_path.empty()) return m;
      return std::make_shared<CachingProvider>(m, std::make_shared<PromptCache>(cfg.cache_path));
    }
  }
  throw ConfigurationError("unknown provider mode");
}

}  // namespace beltamp::priors
