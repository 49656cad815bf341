#pragma once

#include <functional>
#include <iostream>
#include <string>
#include <utility>

namespace poselsa::log {

enum class Level { Info, Warn };

using Sink = std::function<void(Level, const std::string&)>;

namespace detail {
inline Sink& sink() {
  static Sink s = [](Level level, const std::string& msg) {
    std::clog << (level == Level::Warn ? "[warn] " : "[info] ") << msg << '\n';
  };
  return s;
}
}  // namespace detail

/// Replaces the process-wide sink and returns the previous one.
inline Sink set_sink(Sink s) { return std::exchange(detail::sink(), std::move(s)); }

inline void info(const std::string& msg) {
  if (detail::sink()) detail::sink()(Level::Info, msg);
}

inline void warn(const std::string& msg) {
  if (detail::sink()) detail::sink()(Level::Warn, msg);
}

/// Installs a sink for the lifetime of the guard.
class ScopedSink {
 public:
  explicit ScopedSink(Sink s) : prev_(set_sink(std::move(s))) {}
  ~ScopedSink() { set_sink(std::move(prev_)); }
  ScopedSink(const ScopedSink&) = delete;
  ScopedSink& operator=(const ScopedSink&) = delete;

 private:
  Sink prev_;
};

}  // namespace poselsa::log
