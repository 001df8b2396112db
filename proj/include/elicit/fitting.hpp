#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "elicit/distribution.hpp"
#include "elicit/judgment.hpp"

namespace elicit {

struct FitOptions {
  // Probability assigned to the elicited minimum (and 1 - eps to the maximum).
  double bound_eps = 0.01;
  int restarts = 3;
  int max_evaluations = 2000;  // per restart
};

struct FamilyCandidate {
  Family family;
  double sse;
  Distribution distribution;
};

struct FitResult {
  Distribution distribution;
  double sse;
  std::vector<FamilyCandidate> family_candidates;

  Family family() const { return distribution.family(); }
};

/// Families whose support covers every value a quantity with support `s` can
/// take: normal always; lognormal and gamma need s.lo >= 0; beta needs s within [0, 1].
bool family_admissible(Family family, const Support& s);

/// Least-squares fit of each requested family to the judgment on the
/// probability scale, using the pairs (eps, min), (0.25, q25), (0.5, median),
/// (0.75, q75), (1 - eps, max). Returns the family with the smallest SSE.
/// Inadmissible families are skipped; if none remain, ErrorCode::configuration.
FitResult fit_least_squares(const ElicitedJudgment& judgment, std::span<const Family> families,
                            const FitOptions& options = {});

/// Fit a single family; throws ErrorCode::configuration if inadmissible.
FamilyCandidate fit_family(const ElicitedJudgment& judgment, Family family,
                           const FitOptions& options = {});

// Derivative-free minimizer used by the fitter; exposed for testing.
struct SimplexOptions {
  int max_evaluations = 2000;
  double f_tol = 1e-15;
  double x_tol = 1e-9;
  double initial_step = 0.25;
};

struct SimplexResult {
  std::vector<double> x;
  double value;
  int evaluations;
  bool converged;
};

SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                          std::vector<double> start, const SimplexOptions& options = {});

/// Same, from an explicit initial simplex of n + 1 points.
SimplexResult nelder_mead_simplex(const std::function<double(std::span<const double>)>& f,
                                  std::vector<std::vector<double>> simplex,
                                  const SimplexOptions& options = {});

}  // namespace elicit
