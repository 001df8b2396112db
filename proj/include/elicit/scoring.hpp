#pragma once

#include <span>
#include <string>
#include <vector>

#include "elicit/distribution.hpp"
#include "elicit/judgment.hpp"

namespace elicit::scoring {

struct LogarithmicScore {
  double value;  // +inf when the density vanishes at the truth
  bool infinite;
};

/// -ln f(truth).
LogarithmicScore logarithmic_score(const Distribution& d, double truth);

/// (median - truth)^2.
double brier_score(double median, double truth);

/// Integral of f^2 over the support.
double squared_density_integral(const Distribution& d);

/// 2 f(truth) - integral of f^2.
double quadratic_score(const Distribution& d, double truth);

// Scores on the log scale of a positive quantity: the density of ln X is
// f(x) x, and the integral of its square is the integral of f(x)^2 x dx.
LogarithmicScore logarithmic_score_log_scale(const Distribution& d, double truth);
double quadratic_score_log_scale(const Distribution& d, double truth);

enum class Aggregation { sum, mean };
enum class BrierScale { raw, declared };

struct ScoreOptions {
  Aggregation brier = Aggregation::sum;
  Aggregation logarithmic = Aggregation::sum;
  Aggregation quadratic = Aggregation::mean;
  BrierScale brier_scale = BrierScale::raw;
};

struct QuestionTruth {
  std::string question_id;
  double truth;
  Scale scale = Scale::linear;
};

struct Evaluand {
  std::string id;
  // Aligned with the truths passed to score_table.
  std::vector<Distribution> per_question;
};

struct ScoreRow {
  std::string id;
  double brier = 0.0;
  double logarithmic = 0.0;
  double quadratic = 0.0;
  int infinite_logarithmic = 0;  // questions where the density vanished at the truth
};

struct ScoreTable {
  std::vector<ScoreRow> rows;
  int question_count = 0;
};

/// ErrorCode::coverage when an evaluand does not cover every question.
ScoreTable score_table(std::span<const Evaluand> evaluands, std::span<const QuestionTruth> truths,
                       const ScoreOptions& options = {});

struct ErrorCorrelationMatrix {
  std::vector<std::string> ids;
  std::vector<std::vector<double>> matrix;
};

struct MedianSeries {
  std::string id;
  std::vector<double> medians;
};

/// Pearson correlations of (median - truth). Needs >= 3 questions; a
/// zero-variance error vector raises ErrorCode::undefined_correlation.
ErrorCorrelationMatrix median_error_correlations(std::span<const MedianSeries> evaluands,
                                                 std::span<const double> truths);

}  // namespace elicit::scoring
