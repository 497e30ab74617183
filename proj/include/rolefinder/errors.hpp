#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rolefinder {

// Input violates a documented contract (bad record, bad config, missing labels...).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed ingest record. Line numbers are 1-based.
class ParseError : public ValidationError {
 public:
  ParseError(std::size_t line, const std::string& message)
      : ValidationError("line " + std::to_string(line) + ": " + message),
        line_(line),
        reason_(message) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Internal invariant broken; always a bug.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace rolefinder
