#include "elicit/cooke.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "elicit/error.hpp"

namespace elicit::cooke {
namespace {

double to_working_scale(double v, Scale scale) {
  if (scale == Scale::linear) return v;
  if (!(v > 0.0)) fail(ErrorCode::domain, "log-scale values must be strictly positive");
  return std::log(v);
}

double from_working_scale(double v, Scale scale) {
  return scale == Scale::linear ? v : std::exp(v);
}

ElicitedJudgment judgment_from_distribution(const Distribution& d, const ElicitedJudgment& like,
                                            double bound_eps) {
  ElicitedJudgment j = like;
  j.minimum = d.quantile(bound_eps);
  j.q25 = d.quantile(0.25);
  j.median = d.quantile(0.5);
  j.q75 = d.quantile(0.75);
  j.maximum = d.quantile(1.0 - bound_eps);
  return j;
}

// Pull a synthetic judgment strictly inside the intrinsic range so its
// outer segments keep positive width.
ElicitedJudgment clamp_into(ElicitedJudgment j, Interval range, Scale scale) {
  const double lo = to_working_scale(range.lo, scale);
  const double hi = to_working_scale(range.hi, scale);
  const double margin = 1e-6 * (hi - lo);
  auto clamp = [&](double v) {
    return from_working_scale(std::clamp(to_working_scale(v, scale), lo + margin, hi - margin), scale);
  };
  j.minimum = clamp(j.minimum);
  j.maximum = clamp(j.maximum);
  return j;
}

std::string fold_message(const std::string& question_id, const std::exception& e) {
  return "fold '" + question_id + "': " + e.what();
}

}  // namespace

const ElicitedJudgment* SeedQuestion::judgment_of(const std::string& expert_id) const {
  for (const auto& j : judgments) {
    if (j.expert_id == expert_id) return &j;
  }
  return nullptr;
}

void validate(const SeedQuestion& q) {
  if (!std::isfinite(q.truth)) fail(ErrorCode::validation, "seed '" + q.question_id + "' truth must be finite");
  if (q.judgments.empty()) fail(ErrorCode::validation, "seed '" + q.question_id + "' has no judgments");
  if (q.scale == Scale::log && !(q.truth > 0.0)) {
    fail(ErrorCode::validation, "log-scale seed '" + q.question_id + "' needs a positive truth");
  }
  std::set<std::string> experts;
  for (const auto& j : q.judgments) {
    validate(j);
    if (!experts.insert(j.expert_id).second) {
      fail(ErrorCode::validation, "expert '" + j.expert_id + "' answered seed '" + q.question_id + "' twice");
    }
    if (q.scale == Scale::log && !(j.minimum > 0.0)) {
      fail(ErrorCode::validation, "log-scale seed '" + q.question_id + "' needs positive judgments");
    }
  }
}

int interquantile_range(const ElicitedJudgment& j, double truth) {
  if (truth < j.q25) return 0;
  if (truth < j.median) return 1;
  if (truth < j.q75) return 2;
  return 3;
}

HitCounts interquantile_hits(std::span<const ElicitedJudgment> judgments,
                             std::span<const double> truths) {
  if (judgments.empty() || judgments.size() != truths.size()) {
    fail(ErrorCode::domain, "hit counting needs aligned, nonempty judgments and truths");
  }
  HitCounts counts{};
  for (std::size_t i = 0; i < judgments.size(); ++i) {
    ++counts[static_cast<std::size_t>(interquantile_range(judgments[i], truths[i]))];
  }
  return counts;
}

double relative_entropy_statistic(std::span<const double> s, std::span<const double> p) {
  if (s.size() != p.size() || s.empty()) {
    fail(ErrorCode::domain, "relative entropy needs proportion vectors of equal length");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (!(p[j] > 0.0)) fail(ErrorCode::domain, "theoretical proportions must be strictly positive");
    if (s[j] < 0.0) fail(ErrorCode::domain, "empirical proportions must be nonnegative");
    if (s[j] > 0.0) total += s[j] * std::log(s[j] / p[j]);
  }
  return std::max(0.0, total);
}

double calibration_score(double relent, int q, int r) {
  if (q < 1) fail(ErrorCode::domain, "calibration needs at least one seed question");
  if (r < 2) fail(ErrorCode::domain, "calibration needs at least two ranges");
  if (!(relent >= 0.0)) fail(ErrorCode::domain, "relative entropy statistic must be nonnegative");
  // P(chi2_{r-1} > 2 q relent) = Q((r - 1)/2, q relent).
  return boost::math::gamma_q(0.5 * (r - 1), static_cast<double>(q) * relent);
}

Interval intrinsic_range(const SeedQuestion& question, double overshoot) {
  if (!(overshoot >= 0.0)) fail(ErrorCode::domain, "overshoot must be nonnegative");
  double lo = to_working_scale(question.truth, question.scale);
  double hi = lo;
  for (const auto& j : question.judgments) {
    for (double v : j.values()) {
      const double t = to_working_scale(v, question.scale);
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
  }
  const double span = hi - lo;
  return {from_working_scale(lo - overshoot * span, question.scale),
          from_working_scale(hi + overshoot * span, question.scale)};
}

double information_score(const ElicitedJudgment& judgment, Interval intrinsic, Scale scale) {
  const double lo = to_working_scale(intrinsic.lo, scale);
  const double hi = to_working_scale(intrinsic.hi, scale);
  if (!(hi > lo)) fail(ErrorCode::domain, "intrinsic range has zero width");
  const auto v = judgment.values();
  std::array<double, 7> cuts{};
  cuts[0] = lo;
  for (std::size_t i = 0; i < v.size(); ++i) cuts[i + 1] = to_working_scale(v[i], scale);
  cuts[6] = hi;
  double total = 0.0;
  for (std::size_t j = 0; j < kSegmentMasses.size(); ++j) {
    const double width = cuts[j + 1] - cuts[j];
    if (!(width > 0.0)) {
      fail(ErrorCode::domain, "judgment must lie strictly inside the intrinsic range");
    }
    const double u = width / (hi - lo);
    total += kSegmentMasses[j] * std::log(kSegmentMasses[j] / u);
  }
  return std::max(0.0, total);
}

CalibrationResult assess_expert(const std::string& expert_id, std::span<const SeedQuestion> seeds,
                                double overshoot) {
  if (seeds.empty()) fail(ErrorCode::domain, "expert assessment needs at least one seed question");
  CalibrationResult r;
  r.expert_id = expert_id;
  r.q = static_cast<int>(seeds.size());
  double information = 0.0;
  for (const auto& seed : seeds) {
    const ElicitedJudgment* j = seed.judgment_of(expert_id);
    if (j == nullptr) {
      fail(ErrorCode::coverage, "expert '" + expert_id + "' did not answer seed '" + seed.question_id + "'");
    }
    ++r.hit_counts[static_cast<std::size_t>(interquantile_range(*j, seed.truth))];
    information += information_score(*j, intrinsic_range(seed, overshoot), seed.scale);
  }
  for (std::size_t k = 0; k < r.s.size(); ++k) {
    r.s[k] = static_cast<double>(r.hit_counts[k]) / static_cast<double>(r.q);
  }
  r.relent = relative_entropy_statistic(r.s, r.p);
  r.calibration = calibration_score(r.relent, r.q, kRanges);
  r.information = information / static_cast<double>(r.q);
  return r;
}

WeightVector cm_weights(std::span<const CalibrationResult> results, double alpha) {
  if (results.empty()) fail(ErrorCode::domain, "classical-method weights need at least one expert");
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail(ErrorCode::domain, "cutoff alpha must lie in [0, 1]");
  WeightVector w;
  w.provenance = Provenance::classical_method;
  w.alpha = alpha;
  double total = 0.0;
  for (const auto& r : results) {
    const bool passed = r.calibration >= alpha;
    const double raw = passed ? r.calibration * r.information : 0.0;
    w.expert_ids.push_back(r.expert_id);
    w.weights.push_back(raw);
    w.cm.push_back({r.calibration, r.information, passed});
    total += raw;
  }
  if (!(total > 0.0)) {
    fail(ErrorCode::no_calibrated_expert,
         "every expert was cut off or has zero information at alpha = " + std::to_string(alpha));
  }
  for (double& x : w.weights) x /= total;
  validate(w);
  return w;
}

std::vector<std::string> expert_ids(std::span<const SeedQuestion> seeds) {
  std::vector<std::string> ids;
  for (const auto& s : seeds) {
    for (const auto& j : s.judgments) {
      if (std::find(ids.begin(), ids.end(), j.expert_id) == ids.end()) ids.push_back(j.expert_id);
    }
  }
  return ids;
}

std::vector<Family> admissible_families(const ElicitedJudgment& judgment,
                                        std::span<const Family> requested) {
  std::vector<Family> out;
  for (Family f : requested) {
    if (family_admissible(f, judgment.support)) out.push_back(f);
  }
  return out;
}

namespace {

std::vector<CalibrationResult> assess_all(std::span<const SeedQuestion> seeds, double overshoot) {
  std::vector<CalibrationResult> results;
  for (const auto& id : expert_ids(seeds)) results.push_back(assess_expert(id, seeds, overshoot));
  return results;
}

FitResult fit_judgment(const ElicitedJudgment& j, const CvOptions& options) {
  return fit_least_squares(j, admissible_families(j, options.families), options.fit);
}

}  // namespace

WeightVector optimized_cm_weights(std::span<const SeedQuestion> seeds, const CvOptions& options) {
  const auto results = assess_all(seeds, options.overshoot);
  const auto ids = expert_ids(seeds);

  // Fitted distributions per seed, experts in `ids` order.
  std::vector<std::vector<Distribution>> fits;
  for (const auto& seed : seeds) {
    std::vector<Distribution> row;
    for (const auto& id : ids) row.push_back(fit_judgment(*seed.judgment_of(id), options).distribution);
    fits.push_back(std::move(row));
  }

  std::vector<double> candidates = {0.0};
  for (const auto& r : results) candidates.push_back(r.calibration);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  std::optional<WeightVector> best;
  double best_score = -1.0;
  for (double alpha : candidates) {
    WeightVector w;
    try {
      w = cm_weights(results, alpha);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::no_calibrated_expert) continue;
      throw;
    }
    HitCounts hits{};
    double information = 0.0;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      const Distribution pool = linear_pool(fits[k], w);
      const Interval range = intrinsic_range(seeds[k], options.overshoot);
      ElicitedJudgment dm = judgment_from_distribution(pool, seeds[k].judgments.front(),
                                                       options.fit.bound_eps);
      dm = clamp_into(dm, range, seeds[k].scale);
      ++hits[static_cast<std::size_t>(interquantile_range(dm, seeds[k].truth))];
      information += information_score(dm, range, seeds[k].scale);
    }
    std::array<double, kRanges> s{};
    const auto q = static_cast<double>(seeds.size());
    for (std::size_t j = 0; j < s.size(); ++j) s[j] = hits[j] / q;
    const double relent = relative_entropy_statistic(s, kTheoreticalProportions);
    const double score =
        calibration_score(relent, static_cast<int>(seeds.size()), kRanges) * information / q;
    if (score > best_score) {
      best_score = score;
      best = std::move(w);
    }
  }
  if (!best) fail(ErrorCode::no_calibrated_expert, "no cutoff leaves a calibrated expert");
  return *best;
}

WeightVector classical_weights(std::span<const SeedQuestion> seeds, const CvOptions& options) {
  if (options.optimize_alpha) return optimized_cm_weights(seeds, options);
  const auto results = assess_all(seeds, options.overshoot);
  return cm_weights(results, options.alpha);
}

std::vector<Fold> leave_one_out_cv(std::span<const SeedQuestion> seeds, const CvOptions& options) {
  if (seeds.size() < 2) fail(ErrorCode::domain, "cross-validation needs at least two seed questions");
  const auto ids = expert_ids(seeds);
  for (const auto& seed : seeds) {
    validate(seed);
    for (const auto& id : ids) {
      if (seed.judgment_of(id) == nullptr) {
        fail(ErrorCode::coverage, "expert '" + id + "' did not answer seed '" + seed.question_id + "'");
      }
    }
  }

  std::vector<Fold> folds;
  folds.reserve(seeds.size());
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    const SeedQuestion& held_out = seeds[k];
    try {
      std::vector<SeedQuestion> training;
      training.reserve(seeds.size() - 1);
      for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (i != k) training.push_back(seeds[i]);
      }
      auto calibration = assess_all(training, options.overshoot);
      WeightVector weights = options.optimize_alpha ? optimized_cm_weights(training, options)
                                                    : cm_weights(calibration, options.alpha);

      std::vector<ExpertFit> fits;
      std::vector<Distribution> dists;
      for (const auto& id : ids) {
        FitResult fit = fit_judgment(*held_out.judgment_of(id), options);
        dists.push_back(fit.distribution);
        fits.push_back({id, std::move(fit)});
      }
      Distribution pooled = linear_pool(dists, weights);
      Distribution equal_pool = linear_pool(dists, equal_weights(ids));
      folds.push_back({held_out.question_id, std::move(weights), std::move(calibration),
                       std::move(fits), std::move(pooled), std::move(equal_pool)});
    } catch (const FitError& e) {
      throw FitError(fold_message(held_out.question_id, e), e.best_params(), e.best_sse());
    } catch (const Error& e) {
      throw Error(e.code(), fold_message(held_out.question_id, e));
    }
  }
  return folds;
}

}  // namespace elicit::cooke
