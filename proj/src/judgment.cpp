#include "elicit/judgment.hpp"

#include <cmath>
#include <string>

#include "elicit/error.hpp"

namespace elicit {

std::string_view to_string(Scale scale) { return scale == Scale::log ? "log" : "linear"; }

Scale scale_from_string(std::string_view name) {
  if (name == "linear") return Scale::linear;
  if (name == "log") return Scale::log;
  fail(ErrorCode::validation, "unknown scale '" + std::string(name) + "' (expected linear|log)");
}

void validate(const ElicitedJudgment& j) {
  static constexpr const char* kNames[] = {"min", "q25", "median", "q75", "max"};
  const auto v = j.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      fail(ErrorCode::validation, std::string(kNames[i]) + " must be a finite number");
    }
  }
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if (!(v[i] < v[i + 1])) {
      fail(ErrorCode::quantile_order, std::string("judgment must satisfy ") + kNames[i] + " < " +
                                          kNames[i + 1] + " (got " + std::to_string(v[i]) +
                                          " and " + std::to_string(v[i + 1]) + ")");
    }
  }
  if (!(j.support.lo < j.support.hi)) {
    fail(ErrorCode::validation, "support lower bound must be below its upper bound");
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!j.support.contains(v[i])) {
      fail(ErrorCode::validation, std::string(kNames[i]) + " lies outside the quantity's support");
    }
  }
}

}  // namespace elicit
