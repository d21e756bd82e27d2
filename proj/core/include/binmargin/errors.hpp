#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace binmargin {

/// Error families. The numeric values are the CLI exit codes.
enum class ErrorKind : int {
  kUsage = 1,
  kInfeasible = 2,
  kNotConverged = 3,
  kStateSpace = 4,
  kAssertionFailed = 5,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorKind::kUsage, what) {}
};

class Infeasible : public Error {
 public:
  explicit Infeasible(const std::string& what) : Error(ErrorKind::kInfeasible, what) {}
};

// A margin forces cells to 0 or 1 and the caller disabled the reduction pass.
class NoInterior : public Error {
 public:
  explicit NoInterior(const std::string& what) : Error(ErrorKind::kInfeasible, what) {}
};

class NotConverged : public Error {
 public:
  NotConverged(const std::string& what, double residual, std::int64_t iterations)
      : Error(ErrorKind::kNotConverged, what), residual_(residual), iterations_(iterations) {}
  double residual() const noexcept { return residual_; }
  std::int64_t iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  std::int64_t iterations_;
};

class StateSpaceExceeded : public Error {
 public:
  StateSpaceExceeded(const std::string& what, std::size_t states)
      : Error(ErrorKind::kStateSpace, what), states_(states) {}
  std::size_t states() const noexcept { return states_; }

 private:
  std::size_t states_;
};

class CapExceeded : public Error {
 public:
  explicit CapExceeded(const std::string& what) : Error(ErrorKind::kStateSpace, what) {}
};

class AssertionFailed : public Error {
 public:
  explicit AssertionFailed(const std::string& what) : Error(ErrorKind::kAssertionFailed, what) {}
};

// Experiment preconditions taken from the theorem hypotheses.
class WindowViolated : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class MixedBlocks : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class HypothesisViolated : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class DegenerateFit : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

}  // namespace binmargin
