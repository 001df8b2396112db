#include "elicit/error.hpp"

namespace elicit {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::validation: return "validation";
    case ErrorCode::quantile_order: return "quantile_order";
    case ErrorCode::domain: return "domain";
    case ErrorCode::configuration: return "configuration";
    case ErrorCode::fitting: return "fitting";
    case ErrorCode::integration: return "integration";
    case ErrorCode::empty_pool: return "empty_pool";
    case ErrorCode::no_calibrated_expert: return "no_calibrated_expert";
    case ErrorCode::undefined_correlation: return "undefined_correlation";
    case ErrorCode::coverage: return "coverage";
    case ErrorCode::csv: return "csv";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::version_conflict: return "version_conflict";
    case ErrorCode::stage: return "stage";
    case ErrorCode::unauthorized: return "unauthorized";
    case ErrorCode::internal: return "internal";
  }
  return "internal";
}

std::vector<ErrorCode> all_error_codes() {
  return {ErrorCode::validation,   ErrorCode::quantile_order,
          ErrorCode::domain,       ErrorCode::configuration,
          ErrorCode::fitting,      ErrorCode::integration,
          ErrorCode::empty_pool,   ErrorCode::no_calibrated_expert,
          ErrorCode::undefined_correlation, ErrorCode::coverage,
          ErrorCode::csv,          ErrorCode::not_found,
          ErrorCode::version_conflict, ErrorCode::stage,
          ErrorCode::unauthorized, ErrorCode::internal};
}

}  // namespace elicit
