#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include "elicit/distribution.hpp"

// Diagnostic-trial model: eta = P(RT positive at entry), psi = P(RT positive
// at six months | negative at entry), theta_k = P(ET positive | RT group k).
namespace elicit::trial {

using Parameter = std::variant<double, Distribution>;

struct TrialParameters {
  Parameter eta = 0.0;
  Parameter psi = 0.0;
  Parameter theta1 = 0.0;
  Parameter theta2 = 0.0;
  Parameter theta3 = 0.0;
};

struct PointParameters {
  double eta = 0.0;
  double psi = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  double theta3 = 0.0;
};

/// Point values in [0, 1]; distributions supported inside [0, 1].
void validate(const Parameter& p);
void validate(const TrialParameters& p);
void validate(const PointParameters& p);

/// Median of each parameter (point values pass through).
PointParameters medians(const TrialParameters& p);

enum class RtGroup { positive_at_start, positive_at_six_months, never_positive };
inline constexpr int kGroups = 3;
std::string_view to_string(RtGroup group);

struct CellProbabilities {
  // eta, (1 - eta) psi, (1 - eta)(1 - psi); the three sum to exactly 1.
  std::array<double, kGroups> group{};
  // eta theta1, (1 - eta) psi theta2, (1 - eta)(1 - psi) theta3.
  std::array<double, kGroups> et_positive{};
};

CellProbabilities cell_probabilities(const PointParameters& p);

/// eta / (eta + (1 - eta) psi). ErrorCode::domain when eta = psi = 0.
double rt_sensitivity(double eta, double psi);

/// (eta theta1 + (1 - eta) psi theta2) / (eta + (1 - eta) psi).
double et_sensitivity(double eta, double psi, double theta1, double theta2);

struct IntervalEstimate {
  double estimate;  // Monte Carlo median
  double lower;
  double upper;
  double level;
  int draws;
};

inline constexpr double kDefaultLevel = 0.90;
inline constexpr std::uint64_t kDefaultSeed = 20190321;

/// Monte Carlo distribution of (1 - eta) psi with eta and psi independent.
/// Every uniform pair is used in both factor orders, so the result is
/// unchanged when the roles of (1 - eta) and psi are exchanged.
/// Requires n_draws >= 1000 and 0 < level < 1.
IntervalEstimate delayed_positive_check(const Parameter& eta, const Parameter& psi, int n_draws,
                                        double level, std::uint64_t seed = kDefaultSeed);

struct Patient {
  RtGroup group;
  bool et_positive;
};

struct PatientSample {
  int total = 0;
  std::array<int, kGroups> group{};
  std::array<int, kGroups> et_positive{};
  std::vector<Patient> patients;
};

/// Largest-remainder rounding of the group masses, then of each group's ET
/// split; ties go to the earliest cell.
PatientSample patient_sample(const PointParameters& p, int total);

/// Integer counts summing to `total` with ties to the earliest index.
std::vector<int> largest_remainder(const std::vector<double>& masses, int total);

}  // namespace elicit::trial
