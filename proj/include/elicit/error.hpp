#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace elicit {

// Closed set of machine-readable error codes. The HTTP layer maps these onto
// status codes and the CLI onto exit codes, so adding one means touching both.
enum class ErrorCode {
  validation,
  quantile_order,
  domain,
  configuration,
  fitting,
  integration,
  empty_pool,
  no_calibrated_expert,
  undefined_correlation,
  coverage,
  csv,
  not_found,
  version_conflict,
  stage,
  unauthorized,
  internal,
};

std::string_view to_string(ErrorCode code);
std::vector<ErrorCode> all_error_codes();

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Least-squares fit that ran out of evaluations. Carries the best iterate so
/// callers can still show something to the expert.
class FitError : public Error {
 public:
  FitError(const std::string& message, std::vector<double> best_params, double best_sse)
      : Error(ErrorCode::fitting, message),
        best_params_(std::move(best_params)),
        best_sse_(best_sse) {}

  const std::vector<double>& best_params() const noexcept { return best_params_; }
  double best_sse() const noexcept { return best_sse_; }

 private:
  std::vector<double> best_params_;
  double best_sse_;
};

class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& message, double estimate, double error_bound)
      : Error(ErrorCode::integration, message),
        estimate_(estimate),
        error_bound_(error_bound) {}

  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

/// Validation failure aggregating several row-level problems (CSV ingest).
class ValidationErrors : public Error {
 public:
  ValidationErrors(ErrorCode code, const std::string& message, std::vector<std::string> problems)
      : Error(code, message), problems_(std::move(problems)) {}

  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace elicit
