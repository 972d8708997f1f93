#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace nystrom {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A mesh or model violates one of its invariants; the message names it.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class DegeneratePatch : public ValidationError {
 public:
  DegeneratePatch(int patch, double jacobian)
      : ValidationError("degenerate patch " + std::to_string(patch) +
                        " (jacobian " + std::to_string(jacobian) + ")"),
        patch_(patch) {}
  int patch() const noexcept { return patch_; }

 private:
  int patch_;
};

class UnsupportedRule : public Error {
 public:
  using Error::Error;
};

class SingularAnchorSet : public Error {
 public:
  using Error::Error;
};

class NotImplementedSingularity : public Error {
 public:
  using Error::Error;
};

/// sigma_{j+1} == sigma_j where a formulation divides by the jump.
class ConductivityJumpZero : public Error {
 public:
  explicit ConductivityJumpZero(int interface)
      : Error("zero conductivity jump across interface S_" + std::to_string(interface)),
        interface_(interface) {}
  int interface_index() const noexcept { return interface_; }

 private:
  int interface_;
};

class SingularMatrix : public Error {
 public:
  explicit SingularMatrix(std::ptrdiff_t pivot)
      : Error("singular matrix at pivot " + std::to_string(pivot)), pivot_(pivot) {}
  std::ptrdiff_t pivot() const noexcept { return pivot_; }

 private:
  std::ptrdiff_t pivot_;
};

class SeriesNotConverged : public Error {
 public:
  SeriesNotConverged(int degree, double tail)
      : Error("multipole series not converged at degree " + std::to_string(degree) +
              " (relative tail " + std::to_string(tail) + ")"),
        tail_(tail) {}
  double tail() const noexcept { return tail_; }

 private:
  double tail_;
};

class DegenerateReference : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment configuration. `path()` is the offending field, e.g. "sweep.values".
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& message)
      : Error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace nystrom
