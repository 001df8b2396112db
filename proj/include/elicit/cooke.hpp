#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "elicit/distribution.hpp"
#include "elicit/fitting.hpp"
#include "elicit/judgment.hpp"
#include "elicit/pooling.hpp"

namespace elicit::cooke {

/// Interquantile ranges: below q25, [q25, median), [median, q75), >= q75.
inline constexpr int kRanges = 4;
inline constexpr std::array<double, kRanges> kTheoreticalProportions = {0.25, 0.25, 0.25, 0.25};

// Masses of the six segments cut by the intrinsic range ends and the five
// elicited values, with min/max read as the 1% and 99% quantiles.
inline constexpr std::array<double, 6> kSegmentMasses = {0.01, 0.24, 0.25, 0.25, 0.24, 0.01};

inline constexpr double kDefaultAlpha = 0.05;
inline constexpr double kDefaultOvershoot = 0.10;

struct SeedQuestion {
  std::string question_id;
  std::string text;
  std::vector<ElicitedJudgment> judgments;
  double truth = 0.0;
  Scale scale = Scale::linear;

  const ElicitedJudgment* judgment_of(const std::string& expert_id) const;
};

/// Truth finite, at least one judgment, every judgment valid and unique per
/// expert, strictly positive values on log scale.
void validate(const SeedQuestion& question);

using HitCounts = std::array<int, kRanges>;

/// Ties place the truth in the upper range.
int interquantile_range(const ElicitedJudgment& judgment, double truth);

HitCounts interquantile_hits(std::span<const ElicitedJudgment> judgments,
                             std::span<const double> truths);

/// Sum of s_j ln(s_j / p_j) with 0 ln 0 = 0. ErrorCode::domain if any p_j <= 0
/// or the lengths differ.
double relative_entropy_statistic(std::span<const double> s, std::span<const double> p);

/// Upper-tail chi-squared probability of 2 q relent on r - 1 degrees of freedom.
double calibration_score(double relent, int q, int r = kRanges);

struct Interval {
  double lo;
  double hi;
};

/// Smallest interval holding every elicited value and the truth, widened by
/// `overshoot` times its span on each side (in log space for log scale).
Interval intrinsic_range(const SeedQuestion& question, double overshoot = kDefaultOvershoot);

/// Relative information of the judgment's segment masses against the uniform
/// (log-uniform) background on the intrinsic range.
double information_score(const ElicitedJudgment& judgment, Interval intrinsic, Scale scale);

struct CalibrationResult {
  std::string expert_id;
  HitCounts hit_counts{};
  std::array<double, kRanges> s{};
  std::array<double, kRanges> p = kTheoreticalProportions;
  double relent = 0.0;
  double calibration = 0.0;
  double information = 0.0;
  int q = 0;
};

/// Calibration and mean information of one expert over the given seeds.
CalibrationResult assess_expert(const std::string& expert_id, std::span<const SeedQuestion> seeds,
                                double overshoot = kDefaultOvershoot);

/// w_i* = C_i I_i [C_i >= alpha], normalized. ErrorCode::no_calibrated_expert
/// when every raw weight is zero.
WeightVector cm_weights(std::span<const CalibrationResult> results, double alpha);

/// Experts in first-appearance order across the seeds.
std::vector<std::string> expert_ids(std::span<const SeedQuestion> seeds);

struct CvOptions {
  double alpha = kDefaultAlpha;
  // Search the cutoff maximizing the pooled decision maker's C x I on the
  // training seeds instead of using `alpha` directly.
  bool optimize_alpha = false;
  double overshoot = kDefaultOvershoot;
  std::vector<Family> families = {Family::normal, Family::lognormal};
  FitOptions fit;
};

/// Chooses alpha among {0} and the experts' calibration scores so that the
/// linear pool of the experts' fitted distributions scores best on the seeds.
WeightVector optimized_cm_weights(std::span<const SeedQuestion> seeds, const CvOptions& options);

/// CM weights on the seeds according to `options` (fixed or optimized alpha).
WeightVector classical_weights(std::span<const SeedQuestion> seeds, const CvOptions& options);

struct ExpertFit {
  std::string expert_id;
  FitResult fit;
};

struct Fold {
  std::string question_id;
  WeightVector weights;
  std::vector<CalibrationResult> calibration;
  std::vector<ExpertFit> expert_fits;
  Distribution pooled;
  Distribution equal_pool;
};

/// One fold per seed: weights from the other seeds, the held-out seed's
/// judgments fitted and pooled. Errors are rethrown with the fold's question id.
std::vector<Fold> leave_one_out_cv(std::span<const SeedQuestion> seeds,
                                   const CvOptions& options = {});

/// Fitting families for a judgment, restricted to those admissible for its support.
std::vector<Family> admissible_families(const ElicitedJudgment& judgment,
                                        std::span<const Family> requested);

}  // namespace elicit::cooke
