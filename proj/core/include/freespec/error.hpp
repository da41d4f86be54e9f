#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace freespec {

enum class ErrorCode {
  SizeLimit,
  Dimension,
  Order,
  PartitionClass,
  Kind,
  HalfPlane,
  BranchPoint,
  Divergence,
  Convergence,
  Domain,
  InconsistentTransform,
  Model,
  Input,
  Numerical,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base of every error raised by the library. The code lets callers
/// (notably the CLI) branch without a dynamic_cast ladder.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the iterative solvers when max_iter is exhausted. Carries the
/// last residual and the residual history so callers can judge how close
/// the iteration got.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual,
                   std::vector<double> trace = {})
      : Error(ErrorCode::Convergence, what),
        last_residual_(last_residual),
        trace_(std::move(trace)) {}

  double last_residual() const noexcept { return last_residual_; }
  const std::vector<double>& residual_trace() const noexcept { return trace_; }

 private:
  double last_residual_;
  std::vector<double> trace_;
};

}  // namespace freespec
