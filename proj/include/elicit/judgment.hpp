#pragma once

#include <array>
#include <string>
#include <string_view>

#include "elicit/distribution.hpp"

namespace elicit {

enum class Scale { linear, log };

std::string_view to_string(Scale scale);
Scale scale_from_string(std::string_view name);

/// One expert's five-point judgment for one quantity, entered in the order
/// minimum, maximum, median, quartiles; stored in ascending order.
struct ElicitedJudgment {
  std::string quantity_id;
  std::string expert_id;
  double minimum = 0.0;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
  double maximum = 0.0;
  Support support;

  std::array<double, 5> values() const { return {minimum, q25, median, q75, maximum}; }
  friend bool operator==(const ElicitedJudgment&, const ElicitedJudgment&) = default;
};

/// Throws ErrorCode::quantile_order when the five values are not strictly
/// increasing (equal adjacent values included) and ErrorCode::validation when
/// a value is non-finite or falls outside the support.
void validate(const ElicitedJudgment& judgment);

}  // namespace elicit
