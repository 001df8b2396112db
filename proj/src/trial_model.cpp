#include "elicit/trial_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "elicit/error.hpp"

namespace elicit::trial {
namespace {

void check_probability(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    fail(ErrorCode::domain, std::string(what) + " must be a probability in [0, 1]");
  }
}

double median_of(const Parameter& p) {
  if (const double* v = std::get_if<double>(&p)) return *v;
  return std::get<Distribution>(p).median();
}

// Quantile function of a parameter; point values are degenerate.
double draw(const Parameter& p, double u) {
  if (const double* v = std::get_if<double>(&p)) return *v;
  return std::get<Distribution>(p).quantile(u);
}

double uniform_open(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double empirical_quantile(const std::vector<double>& sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::string_view to_string(RtGroup group) {
  switch (group) {
    case RtGroup::positive_at_start: return "rt_positive_at_start";
    case RtGroup::positive_at_six_months: return "rt_positive_at_six_months";
    case RtGroup::never_positive: return "rt_never_positive";
  }
  return "rt_never_positive";
}

void validate(const Parameter& p) {
  if (const double* v = std::get_if<double>(&p)) {
    check_probability(*v, "trial parameter");
    return;
  }
  const Support s = std::get<Distribution>(p).support();
  if (s.lo < 0.0 || s.hi > 1.0) {
    fail(ErrorCode::domain, "trial parameter distributions must be supported inside [0, 1]");
  }
}

void validate(const TrialParameters& p) {
  for (const Parameter* q : {&p.eta, &p.psi, &p.theta1, &p.theta2, &p.theta3}) validate(*q);
}

void validate(const PointParameters& p) {
  check_probability(p.eta, "eta");
  check_probability(p.psi, "psi");
  check_probability(p.theta1, "theta1");
  check_probability(p.theta2, "theta2");
  check_probability(p.theta3, "theta3");
}

PointParameters medians(const TrialParameters& p) {
  validate(p);
  return {median_of(p.eta), median_of(p.psi), median_of(p.theta1), median_of(p.theta2),
          median_of(p.theta3)};
}

CellProbabilities cell_probabilities(const PointParameters& p) {
  validate(p);
  CellProbabilities c;
  c.group[0] = p.eta;
  c.group[1] = (1.0 - p.eta) * p.psi;
  // Written as the complement so the three masses sum to exactly 1.
  c.group[2] = 1.0 - (c.group[0] + c.group[1]);
  c.et_positive[0] = c.group[0] * p.theta1;
  c.et_positive[1] = c.group[1] * p.theta2;
  c.et_positive[2] = c.group[2] * p.theta3;
  return c;
}

double rt_sensitivity(double eta, double psi) {
  check_probability(eta, "eta");
  check_probability(psi, "psi");
  const double denom = eta + (1.0 - eta) * psi;
  if (!(denom > 0.0)) fail(ErrorCode::domain, "sensitivity is undefined when eta = psi = 0");
  return eta / denom;
}

double et_sensitivity(double eta, double psi, double theta1, double theta2) {
  check_probability(eta, "eta");
  check_probability(psi, "psi");
  check_probability(theta1, "theta1");
  check_probability(theta2, "theta2");
  const double delayed = (1.0 - eta) * psi;
  const double denom = eta + delayed;
  if (!(denom > 0.0)) fail(ErrorCode::domain, "sensitivity is undefined when eta = psi = 0");
  return (eta * theta1 + delayed * theta2) / denom;
}

IntervalEstimate delayed_positive_check(const Parameter& eta, const Parameter& psi, int n_draws,
                                        double level, std::uint64_t seed) {
  validate(eta);
  validate(psi);
  if (n_draws < 1000) fail(ErrorCode::domain, "the delayed-positive check needs >= 1000 draws");
  if (!(level > 0.0 && level < 1.0)) fail(ErrorCode::domain, "interval level must lie in (0, 1)");

  // (1 - eta) has quantile function u -> 1 - Q_eta(1 - u).
  auto not_eta = [&](double u) { return 1.0 - draw(eta, 1.0 - u); };
  auto delayed = [&](double u) { return draw(psi, u); };

  const int pairs = (n_draws + 1) / 2;
  std::mt19937_64 rng(seed);
  std::vector<double> products;
  products.reserve(static_cast<std::size_t>(2 * pairs));
  for (int i = 0; i < pairs; ++i) {
    const double u = uniform_open(rng);
    const double v = uniform_open(rng);
    products.push_back(not_eta(u) * delayed(v));
    products.push_back(not_eta(v) * delayed(u));
  }
  std::sort(products.begin(), products.end());
  const double tail = 0.5 * (1.0 - level);
  return {empirical_quantile(products, 0.5), empirical_quantile(products, tail),
          empirical_quantile(products, 1.0 - tail), level, static_cast<int>(products.size())};
}

std::vector<int> largest_remainder(const std::vector<double>& masses, int total) {
  if (total < 0) fail(ErrorCode::domain, "total must be nonnegative");
  std::vector<int> counts(masses.size(), 0);
  if (masses.empty()) return counts;
  std::vector<double> remainders(masses.size());
  int assigned = 0;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    const double exact = masses[i] * total;
    counts[i] = static_cast<int>(std::floor(exact));
    remainders[i] = exact - counts[i];
    assigned += counts[i];
  }
  std::vector<std::size_t> order(masses.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
  for (std::size_t k = 0; assigned < total; k = (k + 1) % order.size()) {
    ++counts[order[k]];
    ++assigned;
  }
  // Floating error in the masses can overshoot by a patient; take it back
  // from the smallest remainders.
  for (std::size_t k = order.size(); assigned > total && k-- > 0;) {
    if (counts[order[k]] > 0) {
      --counts[order[k]];
      --assigned;
    }
  }
  return counts;
}

PatientSample patient_sample(const PointParameters& p, int total) {
  if (total < 1) fail(ErrorCode::domain, "patient sample needs at least one patient");
  const CellProbabilities cells = cell_probabilities(p);
  const std::array<double, kGroups> theta = {p.theta1, p.theta2, p.theta3};
  PatientSample out;
  out.total = total;
  const auto groups = largest_remainder({cells.group.begin(), cells.group.end()}, total);
  for (int g = 0; g < kGroups; ++g) {
    const auto gi = static_cast<std::size_t>(g);
    out.group[gi] = groups[gi];
    const auto split = largest_remainder({theta[gi], 1.0 - theta[gi]}, groups[gi]);
    out.et_positive[gi] = split[0];
    for (int k = 0; k < split[0]; ++k) out.patients.push_back({static_cast<RtGroup>(g), true});
    for (int k = 0; k < split[1]; ++k) out.patients.push_back({static_cast<RtGroup>(g), false});
  }
  return out;
}

}  // namespace elicit::trial
