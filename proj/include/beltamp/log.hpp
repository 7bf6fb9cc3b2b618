#pragma once

#include <functional>
#include <iostream>
#include <mutex>
#include <string>

namespace beltamp {

/// Process-wide warning sink. Defaults to stderr; tests swap it to capture.
inline std::function<void(const std::string&)>& warning_sink() {
  static std::function<void(const std::string&)> sink = [](const std::string& m) {
    std::cerr << "warning: " << m << '\n';
  };
  return sink;
}

inline void log_warning(const std::string& msg) {
  static std::mutex mu;
  std::lock_guard lock(mu);
  if (warning_sink()) warning_sink()(msg);
}

}  // namespace beltamp
