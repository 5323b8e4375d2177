#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace passconn {

// Base for every error raised by the library. The CLI maps ArgumentError to
// exit code 2 and everything else to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid caller input: bad parameter values, missing files, absent labels.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed file in a variant this library does not read.
class UnsupportedFormat : public Error {
 public:
  using Error::Error;
};

// Inconsistent geometry or volume configuration (e.g. a singular affine).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Seeding gave up before producing the requested number of streamlines.
class AttemptCapExceeded : public Error {
 public:
  AttemptCapExceeded(const std::string& what, std::int64_t generated)
      : Error(what), generated_(generated) {}
  std::int64_t generated() const { return generated_; }

 private:
  std::int64_t generated_;
};

}  // namespace passconn
