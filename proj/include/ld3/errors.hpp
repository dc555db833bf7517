#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ld3 {

// Every recoverable failure in the library derives from Error so callers
// can catch once at the CLI boundary.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoLaneFound : public Error {
 public:
  explicit NoLaneFound(double distance)
      : Error("no lane within query distance (nearest " + std::to_string(distance) + " m)"),
        distance_(distance) {}
  double distance() const noexcept { return distance_; }

 private:
  double distance_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class InvalidLaneWidth : public Error { using Error::Error; };
class DegenerateTrace : public Error { using Error::Error; };
class SingularInnovation : public Error { using Error::Error; };
class OneClassOnly : public Error { using Error::Error; };
class DegenerateCloud : public Error { using Error::Error; };
class ZeroVariance : public Error { using Error::Error; };
class LengthMismatch : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };
class IoError : public Error { using Error::Error; };

}  // namespace ld3
