#pragma once

#include <stdexcept>
#include <string>

namespace shipopt {

/// Malformed input file (JSON syntax, CSV layout, MPS sections).
class ParseError : public std::runtime_error {
public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// A scenario or profile violates an invariant. Carries the path of the
/// offending field, e.g. "dgs[0].min_up_time".
class ValidationError : public std::runtime_error {
public:
  ValidationError(std::string field_path, const std::string& reason)
      : std::runtime_error(field_path + ": " + reason),
        field_path_(std::move(field_path)) {}

  const std::string& field_path() const noexcept { return field_path_; }

private:
  std::string field_path_;
};

/// Inputs are mutually inconsistent or the optimization model cannot be
/// formed (e.g. fewer than two generating units with security active).
class ModelError : public std::runtime_error {
public:
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure inside the LP/MILP engine.
class SolveError : public std::runtime_error {
public:
  explicit SolveError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem failure (unreadable input, unwritable output).
class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace shipopt
