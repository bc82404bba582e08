#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ventsim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or argument. `field()` carries a dotted path such as
/// `masses[2].thickness_m` when the error comes from a document.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
  explicit ValidationError(const std::string& message) : Error(message) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Malformed or unreadable input file. Line numbers are 1-based, 0 if unknown.
class InputError : public Error {
 public:
  InputError(std::string path, std::size_t line, const std::string& message)
      : Error(format(path, line, message)), path_(std::move(path)), line_(line) {}

  const std::string& path() const noexcept { return path_; }
  std::size_t line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& path, std::size_t line, const std::string& message) {
    std::string out = path;
    if (line > 0) out += ":" + std::to_string(line);
    return out.empty() ? message : out + ": " + message;
  }

  std::string path_;
  std::size_t line_ = 0;
};

/// Numerical failure: non-convergence or a state leaving the plausible band.
class SolverError : public Error {
 public:
  SolverError(double time_s, const std::string& message)
      : Error("t=" + std::to_string(time_s) + " s: " + message), time_(time_s) {}

  double time() const noexcept { return time_; }

 private:
  double time_ = 0.0;
};

}  // namespace ventsim
