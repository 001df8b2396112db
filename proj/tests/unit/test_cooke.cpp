#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "elicit/cooke.hpp"
#include "elicit/error.hpp"

using namespace elicit;
using namespace elicit::cooke;
using doctest::Approx;

namespace {

ElicitedJudgment judgment(std::string expert, double lo, double a, double m, double b, double hi) {
  return {"q", std::move(expert), lo, a, m, b, hi, {}};
}

// Second implementation of the statistic, written as a difference of
// cross-entropy and entropy.
double relent_by_entropies(const std::vector<double>& s, const std::vector<double>& p) {
  double cross = 0.0;
  double self = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (s[j] == 0.0) continue;
    cross -= s[j] * std::log(p[j]);
    self -= s[j] * std::log(s[j]);
  }
  return cross - self;
}

CalibrationResult result(std::string id, double c, double info) {
  CalibrationResult r;
  r.expert_id = std::move(id);
  r.calibration = c;
  r.information = info;
  return r;
}

SeedQuestion seed(std::string id, double truth, std::vector<ElicitedJudgment> js) {
  for (auto& j : js) j.quantity_id = id;
  return {id, "", std::move(js), truth, Scale::linear};
}

}  // namespace

TEST_CASE("interquantile hits") {
  const auto j = judgment("a", 0, 1, 2, 3, 4);
  std::vector<ElicitedJudgment> js(10, j);
  std::vector<double> med(10, 2.0);
  CHECK(interquantile_hits(js, med) == HitCounts{0, 0, 10, 0});
  std::vector<double> low(10, 0.5);
  CHECK(interquantile_hits(js, low) == HitCounts{10, 0, 0, 0});
  const std::vector<double> mixed = {0.5, 0.1, 0.9, 1.5, 1.0, 2.5, 2.1, 2.9, 3.5, 3.0};
  CHECK(interquantile_hits(js, mixed) == HitCounts{3, 2, 3, 2});
  CHECK(interquantile_range(j, 1.0) == 1);
  CHECK(interquantile_range(j, 3.0) == 3);
  CHECK_THROWS_AS(interquantile_hits(js, std::vector<double>{1.0}), Error);
}

TEST_CASE("relative entropy statistic") {
  const std::vector<double> p(4, 0.25);
  CHECK(relative_entropy_statistic(p, p) == 0.0);
  const std::vector<double> s = {0.3, 0.2, 0.3, 0.2};
  const double oracle = relent_by_entropies(s, p);
  CHECK(oracle == Approx(0.020135513550688863).epsilon(1e-12));
  CHECK(relative_entropy_statistic(s, p) == Approx(oracle).epsilon(1e-12));
  CHECK(relative_entropy_statistic(std::vector<double>{1, 0, 0, 0}, p) ==
        Approx(std::log(4.0)).epsilon(1e-14));
  CHECK_THROWS_AS(relative_entropy_statistic(s, std::vector<double>{0.5, 0.5, 0.0, 0.0}), Error);
}

TEST_CASE("calibration score") {
  CHECK(calibration_score(0.0, 10) == 1.0);
  CHECK(calibration_score(0.020135513550688863, 10) == Approx(0.9396820489355059).epsilon(1e-10));
  CHECK(calibration_score(std::log(4.0), 10) == Approx(4.14644317669798e-06).epsilon(1e-8));
  CHECK_THROWS_AS(calibration_score(0.1, 0), Error);
}

TEST_CASE("information score") {
  const Interval range{0.0, 100.0};
  // Segment widths equal to the masses: nothing gained over the background.
  const auto matched = judgment("a", 1, 25, 50, 75, 99);
  CHECK(information_score(matched, range, Scale::linear) == Approx(0.0).epsilon(1e-12));

  const auto wide = judgment("a", 10, 30, 50, 70, 90);
  const auto narrow = judgment("a", 30, 40, 50, 60, 70);
  CHECK(information_score(narrow, range, Scale::linear) > information_score(wide, range, Scale::linear));

  const auto tight_bounds = judgment("a", 44, 45, 50, 55, 56);
  const auto loose_bounds = judgment("a", 35, 45, 50, 55, 65);
  CHECK(information_score(tight_bounds, range, Scale::linear) >
        information_score(loose_bounds, range, Scale::linear));

  // Log scale: the matched judgment in log space.
  const Interval log_range{1.0, std::exp(100.0)};
  const auto log_matched = judgment("a", std::exp(1.0), std::exp(25.0), std::exp(50.0), std::exp(75.0),
                                    std::exp(99.0));
  CHECK(information_score(log_matched, log_range, Scale::log) == Approx(0.0).epsilon(1e-9));

  CHECK_THROWS_AS(information_score(matched, Interval{5, 5}, Scale::linear), Error);
  CHECK_THROWS_AS(information_score(matched, Interval{2, 90}, Scale::linear), Error);
}

TEST_CASE("intrinsic range") {
  const auto q = seed("s", 12.0, {judgment("a", 0, 1, 2, 3, 4), judgment("b", 2, 3, 4, 5, 6)});
  const Interval r = intrinsic_range(q);
  CHECK(r.lo == Approx(-1.2));
  CHECK(r.hi == Approx(13.2));
}

TEST_CASE("cm weights") {
  const std::vector<CalibrationResult> same = {result("a", 0.5, 2), result("b", 0.5, 2)};
  const auto w = cm_weights(same, 0.0);
  CHECK(w.weights == std::vector<double>{0.5, 0.5});
  CHECK(w.provenance == Provenance::classical_method);

  const std::vector<CalibrationResult> cut = {result("a", 0.9, 1), result("b", 0.01, 5)};
  const auto w2 = cm_weights(cut, 0.05);
  CHECK(w2.weights == std::vector<double>{1.0, 0.0});
  CHECK(w2.cm[1].cutoff_passed == false);

  const std::vector<CalibrationResult> three = {result("e1", 0.001, 3.0), result("e2", 0.4, 1.3),
                                                result("e3", 0.3, 1.6)};
  const auto w3 = cm_weights(three, 0.05);
  CHECK(w3.weights[0] == 0.0);
  CHECK(w3.weights[1] + w3.weights[2] == Approx(1.0).epsilon(1e-15));
  CHECK(w3.weights[1] == Approx(0.52).epsilon(1e-12));
  CHECK(w3.weights[2] == Approx(0.48).epsilon(1e-12));

  try {
    cm_weights(cut, 0.95);
    FAIL("expected no_calibrated_expert");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::no_calibrated_expert);
  }
}

TEST_CASE("leave-one-out cross-validation") {
  const std::vector<SeedQuestion> seeds = {
      seed("s1", 2.1, {judgment("a", 0, 1, 2, 3, 4), judgment("b", 5, 6, 7, 8, 9)}),
      seed("s2", 1.2, {judgment("a", 0, 1, 2, 3, 4), judgment("b", 5, 6, 7, 8, 9)}),
      seed("s3", 2.9, {judgment("a", 0, 1, 2, 3, 4), judgment("b", 5, 6, 7, 8, 9)}),
  };
  const auto folds = leave_one_out_cv(seeds, {});
  REQUIRE(folds.size() == 3);
  for (std::size_t k = 0; k < folds.size(); ++k) {
    CHECK(folds[k].question_id == seeds[k].question_id);
    CHECK(folds[k].calibration.size() == 2);
    CHECK(folds[k].calibration[0].q == 2);
    CHECK(folds[k].weights.weights[0] + folds[k].weights.weights[1] == Approx(1.0));
    CHECK(folds[k].expert_fits.size() == 2);
  }

  CHECK_THROWS_AS(leave_one_out_cv(std::vector<SeedQuestion>{seeds[0]}, {}), Error);
  auto missing = seeds;
  missing[1].judgments.pop_back();
  try {
    leave_one_out_cv(missing, {});
    FAIL("expected coverage error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::coverage);
  }
}

TEST_CASE("leave-one-out: an expert that never contains the truth gets zero weight") {
  std::vector<SeedQuestion> seeds;
  // The good expert's truths cycle through the four ranges.
  const double offsets[] = {1.5, 0.5, -0.5, -1.5};
  for (int k = 0; k < 10; ++k) {
    const double truth = 10.0 + 3.0 * k;
    const double centre = truth + offsets[k % 4];
    seeds.push_back(seed("s" + std::to_string(k), truth,
                         {judgment("good", centre - 4, centre - 1, centre, centre + 1, centre + 4),
                          judgment("bad", truth + 5, truth + 6, truth + 7, truth + 8, truth + 9)}));
  }
  const auto folds = leave_one_out_cv(seeds, {});
  REQUIRE(folds.size() == 10);
  for (const auto& f : folds) {
    CHECK(f.weights.weight_of("bad") == 0.0);
    CHECK(f.weights.weight_of("good") == 1.0);
    CHECK(f.calibration[1].calibration < 0.05);
  }
}

TEST_CASE("leave-one-out: identical experts share the weight and the pool") {
  std::vector<SeedQuestion> seeds;
  for (int k = 0; k < 4; ++k) {
    const double m = 5.0 + k;
    const auto j = judgment("a", m - 3, m - 1, m, m + 1, m + 3);
    auto j2 = j;
    j2.expert_id = "b";
    seeds.push_back(seed("s" + std::to_string(k), m + 0.3 * (k - 1.5), {j, j2}));
  }
  const auto folds = leave_one_out_cv(seeds, {0.0});
  for (const auto& f : folds) {
    CHECK(f.weights.weights[0] == Approx(0.5).epsilon(1e-15));
    CHECK(f.weights.weights[1] == Approx(0.5).epsilon(1e-15));
    const Distribution& shared = f.expert_fits[0].fit.distribution;
    for (double x : {2.0, 5.0, 7.5, 10.0}) CHECK(f.pooled.pdf(x) == Approx(shared.pdf(x)).epsilon(1e-12));
  }
}

TEST_CASE("optimized alpha keeps weights on the simplex") {
  std::vector<SeedQuestion> seeds;
  for (int k = 0; k < 6; ++k) {
    const double t = 20.0 + 2.0 * k;
    seeds.push_back(seed("s" + std::to_string(k), t,
                         {judgment("a", t - 5, t - 1.5, t + 0.2, t + 1.4, t + 5),
                          judgment("b", t - 9, t - 4, t - 2, t, t + 3),
                          judgment("c", t - 2, t - 0.5, t + 0.1, t + 0.4, t + 1)}));
  }
  CvOptions opts;
  opts.optimize_alpha = true;
  const auto w = classical_weights(seeds, opts);
  CHECK(std::accumulate(w.weights.begin(), w.weights.end(), 0.0) == Approx(1.0).epsilon(1e-12));
  for (double x : w.weights) CHECK(x >= 0.0);
  const auto folds = leave_one_out_cv(seeds, opts);
  CHECK(folds.size() == 6);
}

TEST_CASE("property: relative entropy is nonnegative and zero only at p") {
  std::mt19937_64 rng(17);
  std::gamma_distribution<double> g(1.0, 1.0);
  const std::vector<double> p(4, 0.25);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> s(4);
    double total = 0.0;
    for (double& x : s) total += (x = g(rng));
    for (double& x : s) x /= total;
    const double r = relative_entropy_statistic(s, p);
    CHECK(r >= 0.0);
    CHECK(r == Approx(relent_by_entropies(s, p)).epsilon(1e-10));
    CHECK(r > 0.0);
  }
}

TEST_CASE("property: calibration is non-increasing in relent") {
  for (int q : {1, 5, 10, 30}) {
    double previous = 1.0;
    for (double r = 0.0; r < 2.0; r += 0.01) {
      const double c = calibration_score(r, q);
      CHECK(c <= previous);
      CHECK(c >= 0.0);
      previous = c;
    }
  }
}

TEST_CASE("property: cm weights are invariant to scaling the information scores") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<CalibrationResult> rs;
    std::vector<CalibrationResult> scaled;
    const double factor = 0.1 + 10.0 * u(rng);
    for (int i = 0; i < 4; ++i) {
      const double c = u(rng);
      const double info = 0.1 + 3.0 * u(rng);
      rs.push_back(result("e" + std::to_string(i), c, info));
      scaled.push_back(result("e" + std::to_string(i), c, info * factor));
    }
    rs[0].calibration = scaled[0].calibration = 0.9;
    const auto a = cm_weights(rs, 0.05);
    const auto b = cm_weights(scaled, 0.05);
    for (std::size_t i = 0; i < 4; ++i) CHECK(a.weights[i] == Approx(b.weights[i]).epsilon(1e-12));
  }
}
