#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace speechlabel {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. line() is 1-based, 0 when not line oriented.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, std::size_t line = 0);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input that violates a contract. Carries machine-readable reasons.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::string reason);
  explicit ValidationError(std::vector<std::string> reasons);
  const std::vector<std::string>& reasons() const noexcept { return reasons_; }

 private:
  std::vector<std::string> reasons_;
};

// Time or sample range outside a recording, or inverted.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Retryable failure talking to a speech recognition backend.
class TransportError : public Error {
 public:
  using Error::Error;
};

// Non-retryable rejection of a configuration (bad credentials, bad language tag, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace speechlabel
