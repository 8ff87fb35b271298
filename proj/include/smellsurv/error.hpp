#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace smellsurv {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid ruleset, thresholds or option values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input document. `offset` is a byte offset into the document
/// when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  explicit ParseError(const std::string& what) : Error(what) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_ = 0;
};

/// Manifest problems. `line` is the 1-based line of the offending row in the
/// manifest, 0 when the problem is not tied to a row.
class ManifestError : public Error {
 public:
  ManifestError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "manifest line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Statistical procedure cannot be carried out on the given data.
class StatsError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace smellsurv
