#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gbsc {

// Invalid model or experiment parameters (k out of range, zero counts, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A context vector whose length does not match the model.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Unreadable or malformed dataset input. line() is 1-based, 0 when the
// error is not tied to a line (missing file, empty file).
class DataError : public std::runtime_error {
 public:
  DataError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace gbsc
