#pragma once

#include <stdexcept>
#include <string>

namespace sl2lab {

enum class ErrorKind {
  numeric_overflow,
  domain,
  range,
  no_hyperbolicity,
  not_same_unstable_leaf,
  resolution,
  depth,
  convergence,
  config,
  internal,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base of every error the library throws. The kind drives CLI exit codes.
class LabError : public std::runtime_error {
 public:
  LabError(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by natural-extension queries whose itinerary is too shallow for
/// the requested tolerance; carries the depth that would have sufficed.
class DepthError : public LabError {
 public:
  DepthError(const std::string& what, int required_depth)
      : LabError(ErrorKind::depth, what), required_depth_(required_depth) {}
  int required_depth() const noexcept { return required_depth_; }

 private:
  int required_depth_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw LabError(kind, what); }

}  // namespace sl2lab
