// Exception types shared across the library. The CLI maps them to exit codes:
// ConfigError -> 2, DivergenceError -> 3, IoError -> 4.
#pragma once

#include <stdexcept>
#include <string>

namespace fracpf {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(long step, double time, const std::string& what)
      : std::runtime_error(what), step(step), time(time) {}
  long step;
  double time;
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

class SoeBuildError : public std::runtime_error {
 public:
  explicit SoeBuildError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fracpf
