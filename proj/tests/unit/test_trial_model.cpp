#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "elicit/error.hpp"
#include "elicit/trial_model.hpp"

using namespace elicit;
using namespace elicit::trial;
using doctest::Approx;

TEST_CASE("cell probabilities") {
  const auto all = cell_probabilities({1.0, 0.3, 0.7, 0.2, 0.1});
  CHECK(all.group == std::array<double, 3>{1, 0, 0});
  CHECK(all.et_positive == std::array<double, 3>{0.7, 0, 0});

  const auto half = cell_probabilities({0.5, 0.5, 0.2, 0.4, 0.6});
  CHECK(half.group == std::array<double, 3>{0.5, 0.25, 0.25});

  const auto perfect = cell_probabilities({0.37, 0.61, 1, 1, 1});
  CHECK(perfect.et_positive == perfect.group);
  CHECK_THROWS_AS(cell_probabilities({1.2, 0.5, 0, 0, 0}), Error);
}

TEST_CASE("sensitivities") {
  CHECK(rt_sensitivity(0.6, 0.5) == Approx(0.75).epsilon(1e-15));
  CHECK(rt_sensitivity(0.4, 0.0) == 1.0);
  CHECK(rt_sensitivity(0.5, 0.5) == Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(et_sensitivity(0.6, 0.5, 0.9, 0.5) == Approx(0.8).epsilon(1e-15));
  CHECK(et_sensitivity(0.3, 0.8, 0.0, 0.0) == 0.0);
  CHECK(et_sensitivity(0.3, 0.8, 0.45, 0.45) == Approx(0.45).epsilon(1e-15));
  try {
    rt_sensitivity(0.0, 0.0);
    FAIL("expected domain error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::domain);
  }
  CHECK_THROWS_AS(et_sensitivity(0.0, 0.0, 0.5, 0.5), Error);
}

TEST_CASE("delayed-positive check") {
  const auto point = delayed_positive_check(0.6, 0.5, 1000, 0.9);
  CHECK(point.estimate == Approx(0.2).epsilon(1e-15));
  CHECK(point.lower == point.upper);
  CHECK(point.draws == 1000);

  // 1 - eta with eta uniform is uniform: quantiles 0.05, 0.5, 0.95.
  const auto uniform = delayed_positive_check(Distribution::beta(1, 1), 1.0, 20000, 0.9);
  CHECK(std::abs(uniform.estimate - 0.5) < 0.01);
  CHECK(std::abs(uniform.lower - 0.05) < 0.01);
  CHECK(std::abs(uniform.upper - 0.95) < 0.01);

  const auto again = delayed_positive_check(Distribution::beta(1, 1), 1.0, 20000, 0.9);
  CHECK(again.estimate == uniform.estimate);
  CHECK(again.lower == uniform.lower);

  CHECK_THROWS_AS(delayed_positive_check(0.5, 0.5, 999, 0.9), Error);
  CHECK_THROWS_AS(delayed_positive_check(0.5, 0.5, 1000, 1.0), Error);
  CHECK_THROWS_AS(delayed_positive_check(Distribution::normal(0.5, 1), 0.5, 1000, 0.9), Error);
}

TEST_CASE("delayed-positive check is unchanged by swapping the factors") {
  // eta' = 1 - psi and psi' = 1 - eta; for betas 1 - X ~ Beta(b, a).
  const auto a = delayed_positive_check(Distribution::beta(2, 3), Distribution::beta(4, 2), 4000, 0.9);
  const auto b = delayed_positive_check(Distribution::beta(2, 4), Distribution::beta(3, 2), 4000, 0.9);
  CHECK(std::abs(a.estimate - b.estimate) < 1e-9);
  CHECK(std::abs(a.lower - b.lower) < 1e-9);
  CHECK(std::abs(a.upper - b.upper) < 1e-9);
}

TEST_CASE("delayed-positive check converges when the draws double") {
  const auto eta = Distribution::beta(6, 4);
  const auto psi = Distribution::beta(3, 5);
  const auto coarse = delayed_positive_check(eta, psi, 20000, 0.9);
  const auto fine = delayed_positive_check(eta, psi, 40000, 0.9);
  CHECK(std::abs(coarse.lower - fine.lower) < 0.01);
  CHECK(std::abs(coarse.upper - fine.upper) < 0.01);
}

TEST_CASE("patient sample") {
  const auto s = patient_sample({0.5, 0.5, 0.2, 0.4, 0.6}, 100);
  CHECK(s.group == std::array<int, 3>{50, 25, 25});
  CHECK(s.patients.size() == 100);

  const auto one = patient_sample({0.2, 0.5, 0.2, 0.4, 0.6}, 1);
  CHECK(one.group == std::array<int, 3>{0, 1, 0});
  // Masses (0.25, 0.375, 0.375): the tie goes to the earlier group.
  const auto tie = patient_sample({0.25, 0.5, 0.0, 0.0, 0.0}, 1);
  CHECK(tie.group == std::array<int, 3>{0, 1, 0});

  const auto et = patient_sample({0.5, 0.5, 1.0, 0.0, 0.0}, 100);
  CHECK(et.et_positive == std::array<int, 3>{50, 0, 0});
  for (const auto& p : et.patients) CHECK(p.et_positive == (p.group == RtGroup::positive_at_start));
  CHECK(to_string(RtGroup::positive_at_six_months) == "rt_positive_at_six_months");
  CHECK_THROWS_AS(patient_sample({0.5, 0.5, 1, 0, 0}, 0), Error);
}

TEST_CASE("medians of distribution parameters") {
  TrialParameters p;
  p.eta = Distribution::beta(2, 2);
  p.psi = 0.3;
  const auto m = medians(p);
  CHECK(m.eta == Approx(0.5).epsilon(1e-12));
  CHECK(m.psi == 0.3);
}

TEST_CASE("property: identities over random parameters") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> n(1, 500);
  for (int trial = 0; trial < 1000; ++trial) {
    const PointParameters p{u(rng), u(rng), u(rng), u(rng), u(rng)};
    const auto c = cell_probabilities(p);
    CHECK(c.group[0] + c.group[1] + c.group[2] == 1.0);
    for (int g = 0; g < 3; ++g) {
      CHECK(c.et_positive[g] >= 0.0);
      CHECK(c.et_positive[g] <= c.group[g]);
    }
    CHECK(std::abs(et_sensitivity(p.eta, p.psi, p.theta1, p.theta1) - p.theta1) < 1e-12);
    CHECK(et_sensitivity(p.eta, p.psi, p.theta1, p.theta2) <=
          et_sensitivity(p.eta, p.psi, std::min(1.0, p.theta1 + 0.1), p.theta2) + 1e-15);
    if (p.eta > 0 && p.eta < 1 && p.psi < 0.9) {
      CHECK(rt_sensitivity(p.eta, p.psi + 0.1) < rt_sensitivity(p.eta, p.psi));
    }
    const int total = n(rng);
    const auto s = patient_sample(p, total);
    CHECK(s.group[0] + s.group[1] + s.group[2] == total);
    CHECK(static_cast<int>(s.patients.size()) == total);
    for (int g = 0; g < 3; ++g) CHECK(s.et_positive[g] <= s.group[g]);
  }
}

TEST_CASE("largest remainder") {
  CHECK(largest_remainder({0.5, 0.5}, 3) == std::vector<int>{2, 1});
  CHECK(largest_remainder({1.0 / 3, 1.0 / 3, 1.0 / 3}, 100) == std::vector<int>{34, 33, 33});
  CHECK(largest_remainder({0.0, 0.0, 1.0}, 7) == std::vector<int>{0, 0, 7});
}
