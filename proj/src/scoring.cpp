#include "elicit/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "elicit/error.hpp"
#include "elicit/quadrature.hpp"

namespace elicit::scoring {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) fail(ErrorCode::domain, std::string(what) + " must be finite");
}

LogarithmicScore from_density(double f) {
  if (!(f > 0.0)) return {kInf, true};
  return {-std::log(f), false};
}

double aggregate(double sum, int n, Aggregation how) {
  return how == Aggregation::sum ? sum : sum / static_cast<double>(n);
}

}  // namespace

LogarithmicScore logarithmic_score(const Distribution& d, double truth) {
  require_finite(truth, "truth");
  return from_density(d.pdf(truth));
}

double brier_score(double median, double truth) {
  require_finite(median, "median");
  require_finite(truth, "truth");
  const double e = median - truth;
  return e * e;
}

double squared_density_integral(const Distribution& d) {
  return integrate_over(d, [&](double x) {
    const double f = d.pdf(x);
    return f * f;
  });
}

double quadratic_score(const Distribution& d, double truth) {
  require_finite(truth, "truth");
  return 2.0 * d.pdf(truth) - squared_density_integral(d);
}

LogarithmicScore logarithmic_score_log_scale(const Distribution& d, double truth) {
  require_finite(truth, "truth");
  if (!(truth > 0.0)) fail(ErrorCode::domain, "log-scale scoring needs a positive truth");
  return from_density(d.pdf(truth) * truth);
}

double quadratic_score_log_scale(const Distribution& d, double truth) {
  require_finite(truth, "truth");
  if (!(truth > 0.0)) fail(ErrorCode::domain, "log-scale scoring needs a positive truth");
  const Support s = d.support();
  if (s.lo < 0.0) fail(ErrorCode::domain, "log-scale scoring needs a distribution on (0, inf)");
  const double integral = integrate_over(d, [&](double x) {
    const double f = d.pdf(x);
    return f * f * x;
  });
  return 2.0 * d.pdf(truth) * truth - integral;
}

ScoreTable score_table(std::span<const Evaluand> evaluands, std::span<const QuestionTruth> truths,
                       const ScoreOptions& options) {
  if (evaluands.empty()) fail(ErrorCode::validation, "score table needs at least one evaluand");
  if (truths.empty()) fail(ErrorCode::validation, "score table needs at least one question");
  ScoreTable table;
  table.question_count = static_cast<int>(truths.size());
  for (const Evaluand& e : evaluands) {
    if (e.per_question.size() != truths.size()) {
      fail(ErrorCode::coverage, "evaluand '" + e.id + "' covers " +
                                    std::to_string(e.per_question.size()) + " of " +
                                    std::to_string(truths.size()) + " questions");
    }
    ScoreRow row;
    row.id = e.id;
    double brier = 0.0;
    double log_total = 0.0;
    double quad = 0.0;
    for (std::size_t k = 0; k < truths.size(); ++k) {
      const Distribution& d = e.per_question[k];
      const QuestionTruth& t = truths[k];
      const bool log_scale = t.scale == Scale::log;
      const double median = d.median();
      if (log_scale && options.brier_scale == BrierScale::declared) {
        if (!(median > 0.0)) fail(ErrorCode::domain, "log-scale Brier score needs a positive median");
        brier += brier_score(std::log(median), std::log(t.truth));
      } else {
        brier += brier_score(median, t.truth);
      }
      const LogarithmicScore ls =
          log_scale ? logarithmic_score_log_scale(d, t.truth) : logarithmic_score(d, t.truth);
      if (ls.infinite) ++row.infinite_logarithmic;
      log_total += ls.value;
      quad += log_scale ? quadratic_score_log_scale(d, t.truth) : quadratic_score(d, t.truth);
    }
    const int n = table.question_count;
    row.brier = aggregate(brier, n, options.brier);
    row.logarithmic = aggregate(log_total, n, options.logarithmic);
    row.quadratic = aggregate(quad, n, options.quadratic);
    table.rows.push_back(std::move(row));
  }
  return table;
}

ErrorCorrelationMatrix median_error_correlations(std::span<const MedianSeries> evaluands,
                                                 std::span<const double> truths) {
  if (truths.size() < 3) fail(ErrorCode::validation, "median error correlations need >= 3 questions");
  if (evaluands.empty()) fail(ErrorCode::validation, "median error correlations need an evaluand");
  const std::size_t n = truths.size();
  std::vector<std::vector<double>> centered;
  std::vector<double> norms;
  std::vector<std::string> degenerate;
  for (const auto& e : evaluands) {
    if (e.medians.size() != n) {
      fail(ErrorCode::coverage, "evaluand '" + e.id + "' does not cover every question");
    }
    std::vector<double> err(n);
    double mean = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      err[k] = e.medians[k] - truths[k];
      if (!std::isfinite(err[k])) fail(ErrorCode::domain, "median errors must be finite");
      mean += err[k];
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double& x : err) {
      x -= mean;
      ss += x * x;
    }
    if (!(ss > 0.0)) degenerate.push_back(e.id);
    centered.push_back(std::move(err));
    norms.push_back(std::sqrt(ss));
  }
  if (!degenerate.empty()) {
    std::string ids;
    for (const auto& id : degenerate) ids += (ids.empty() ? "" : ", ") + id;
    fail(ErrorCode::undefined_correlation,
         "median errors have zero variance for: " + ids + "; correlations involving them are undefined");
  }

  ErrorCorrelationMatrix out;
  const std::size_t m = evaluands.size();
  out.matrix.assign(m, std::vector<double>(m, 1.0));
  for (const auto& e : evaluands) out.ids.push_back(e.id);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < n; ++k) dot += centered[i][k] * centered[j][k];
      const double r = std::clamp(dot / (norms[i] * norms[j]), -1.0, 1.0);
      out.matrix[i][j] = r;
      out.matrix[j][i] = r;
    }
  }
  return out;
}

}  // namespace elicit::scoring
