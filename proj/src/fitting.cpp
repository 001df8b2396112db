#include "elicit/fitting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "elicit/error.hpp"

namespace elicit {
namespace {

// Quartile spread of a standard normal: IQR = 1.349 sd.
constexpr double kIqrPerSd = 1.349;
constexpr double kPenalty = 1e6;
constexpr double kMaxLogParam = 30.0;

struct Parameterization {
  // Unconstrained coordinates; log-transformed where the parameter must be positive.
  std::vector<double> start;
  std::vector<double> step;
};

Distribution make(Family family, std::span<const double> t) {
  switch (family) {
    case Family::normal: return Distribution::normal(t[0], std::exp(t[1]));
    case Family::lognormal: return Distribution::lognormal(t[0], std::exp(t[1]));
    case Family::beta: return Distribution::beta(std::exp(t[0]), std::exp(t[1]));
    case Family::gamma: return Distribution::gamma(std::exp(t[0]), std::exp(t[1]));
    default: break;
  }
  fail(ErrorCode::configuration, "family '" + std::string(to_string(family)) + "' is not fittable");
}

bool in_range(Family family, std::span<const double> t) {
  const std::size_t first_log = family == Family::normal || family == Family::lognormal ? 1 : 0;
  for (std::size_t i = first_log; i < t.size(); ++i) {
    if (!(std::abs(t[i]) < kMaxLogParam)) return false;
  }
  return std::isfinite(t[0]);
}

Parameterization moment_start(Family family, const ElicitedJudgment& j) {
  const double m = j.median;
  const double sd = (j.q75 - j.q25) / kIqrPerSd;
  switch (family) {
    case Family::normal: return {{m, std::log(sd)}, {0.5 * sd, 0.3}};
    case Family::lognormal: {
      const double lsd = (std::log(j.q75) - std::log(j.q25)) / kIqrPerSd;
      return {{std::log(m), std::log(lsd)}, {0.5 * lsd, 0.3}};
    }
    case Family::beta: {
      const double mean = std::clamp(m, 1e-3, 1 - 1e-3);
      const double var = std::min(sd * sd, 0.9 * mean * (1 - mean));
      const double common = mean * (1 - mean) / var - 1.0;
      return {{std::log(mean * common), std::log((1 - mean) * common)}, {0.3, 0.3}};
    }
    case Family::gamma: {
      const double var = sd * sd;
      return {{std::log(m * m / var), std::log(var / m)}, {0.3, 0.3}};
    }
    default: break;
  }
  fail(ErrorCode::configuration, "family '" + std::string(to_string(family)) + "' is not fittable");
}

}  // namespace

SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                          std::vector<double> start, const SimplexOptions& options) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> simplex(n + 1, start);
  for (std::size_t i = 0; i < n; ++i) {
    const double step = options.initial_step * (start[i] != 0.0 ? std::max(1.0, std::abs(start[i])) : 1.0);
    simplex[i + 1][i] += step;
  }
  return nelder_mead_simplex(f, std::move(simplex), options);
}

SimplexResult nelder_mead_simplex(const std::function<double(std::span<const double>)>& f,
                                  std::vector<std::vector<double>> simplex,
                                  const SimplexOptions& options) {
  const std::size_t n = simplex.front().size();
  std::vector<double> values(n + 1);
  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::max();
  };
  for (std::size_t i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  bool converged = false;
  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];

    double spread = values[worst] - values[best];
    double size = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        size = std::max(size, std::abs(simplex[i][k] - simplex[best][k]));
      }
    }
    if (spread <= options.f_tol && size <= options.x_tol) {
      converged = true;
      break;
    }
    if (evals >= options.max_evaluations) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / static_cast<double>(n);
    }
    for (std::size_t k = 0; k < n; ++k) trial[k] = centroid[k] + (centroid[k] - simplex[worst][k]);
    const double fr = eval(trial);
    if (fr < values[best]) {
      for (std::size_t k = 0; k < n; ++k) trial2[k] = centroid[k] + 2.0 * (centroid[k] - simplex[worst][k]);
      const double fe = eval(trial2);
      if (fe < fr) {
        simplex[worst] = trial2;
        values[worst] = fe;
      } else {
        simplex[worst] = trial;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = trial;
      values[worst] = fr;
      continue;
    }
    // Contraction, outside when the reflection improved on the worst point.
    const bool outside = fr < values[worst];
    for (std::size_t k = 0; k < n; ++k) {
      const double target = outside ? trial[k] : simplex[worst][k];
      trial2[k] = centroid[k] + 0.5 * (target - centroid[k]);
    }
    const double fc = eval(trial2);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = trial2;
      values[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < n; ++k) {
        simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
      }
      values[i] = eval(simplex[i]);
    }
  }
  const auto best_it = std::min_element(values.begin(), values.end());
  const auto best = static_cast<std::size_t>(best_it - values.begin());
  return {simplex[best], values[best], evals, converged};
}

bool family_admissible(Family family, const Support& s) {
  switch (family) {
    case Family::normal: return true;
    case Family::lognormal:
    case Family::gamma: return s.lo >= 0.0;
    case Family::beta: return s.lo >= 0.0 && s.hi <= 1.0;
    default: return false;
  }
}

FamilyCandidate fit_family(const ElicitedJudgment& judgment, Family family,
                           const FitOptions& options) {
  validate(judgment);
  if (!family_admissible(family, judgment.support)) {
    fail(ErrorCode::configuration, "family '" + std::string(to_string(family)) +
                                       "' is not admissible for the quantity's support");
  }
  if (!(options.bound_eps > 0.0 && options.bound_eps < 0.25)) {
    fail(ErrorCode::configuration, "bound probability must lie in (0, 0.25)");
  }
  const std::array<double, 5> xs = judgment.values();
  const std::array<double, 5> ps = {options.bound_eps, 0.25, 0.5, 0.75, 1.0 - options.bound_eps};

  auto objective = [&](std::span<const double> t) {
    if (!in_range(family, t)) return kPenalty;
    try {
      const Distribution d = make(family, t);
      double sse = 0.0;
      for (std::size_t k = 0; k < xs.size(); ++k) {
        const double r = d.cdf(xs[k]) - ps[k];
        sse += r * r;
      }
      return sse;
    } catch (const std::exception&) {
      return kPenalty;
    }
  };

  const Parameterization init = moment_start(family, judgment);
  SimplexOptions simplex_options;
  simplex_options.max_evaluations = options.max_evaluations;

  std::vector<double> best = init.start;
  double best_value = objective(best);
  bool converged = false;
  for (int r = 0; r < std::max(1, options.restarts); ++r) {
    std::vector<std::vector<double>> simplex(best.size() + 1, best);
    for (std::size_t i = 0; i < best.size(); ++i) simplex[i + 1][i] += init.step[i];
    const SimplexResult res = nelder_mead_simplex(objective, std::move(simplex), simplex_options);
    converged = res.converged;
    if (res.value <= best_value) {
      best = res.x;
      best_value = res.value;
    }
  }
  if (!converged) {
    throw FitError("least-squares fit of " + std::string(to_string(family)) +
                       " did not converge within " + std::to_string(options.max_evaluations) +
                       " evaluations",
                   best, best_value);
  }
  return {family, best_value, make(family, best)};
}

FitResult fit_least_squares(const ElicitedJudgment& judgment, std::span<const Family> families,
                            const FitOptions& options) {
  validate(judgment);
  if (families.empty()) fail(ErrorCode::configuration, "no distribution families requested");
  std::vector<FamilyCandidate> candidates;
  for (Family f : families) {
    if (std::find_if(candidates.begin(), candidates.end(),
                     [&](const FamilyCandidate& c) { return c.family == f; }) != candidates.end()) {
      continue;
    }
    if (!family_admissible(f, judgment.support)) continue;
    candidates.push_back(fit_family(judgment, f, options));
  }
  if (candidates.empty()) {
    fail(ErrorCode::configuration, "none of the requested families is admissible for support [" +
                                       std::to_string(judgment.support.lo) + ", " +
                                       std::to_string(judgment.support.hi) + "]");
  }
  const auto best = std::min_element(
      candidates.begin(), candidates.end(),
      [](const FamilyCandidate& a, const FamilyCandidate& b) { return a.sse < b.sse; });
  FitResult result{best->distribution, best->sse, {}};
  result.family_candidates = std::move(candidates);
  return result;
}

}  // namespace elicit
