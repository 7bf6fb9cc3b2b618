#pragma once

#include <stdexcept>
#include <string>

namespace beltamp {

/// Invalid environment, noise or run configuration.
struct ConfigurationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition.
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

/// Every hypothesis received zero likelihood; the caller re-seeds the level.
struct DegenerateUpdate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Language-model backend failure (network, auth, malformed or empty reply).
struct ProviderError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Replay mode found no cached record for a request.
struct MissingPrior : ProviderError {
  using ProviderError::ProviderError;
};

struct DatasetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A stream sampler produced no binding.
struct StreamFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void expects(bool cond, const std::string& what) {
  if (!cond) throw ContractViolation(what);
}

}  // namespace beltamp
