#include "elicit/pooling.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "elicit/error.hpp"

namespace elicit {

std::string_view to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::equal: return "equal";
    case Provenance::classical_method: return "classical_method";
    case Provenance::custom: return "custom";
  }
  return "custom";
}

Provenance provenance_from_string(std::string_view name) {
  for (Provenance p : {Provenance::equal, Provenance::classical_method, Provenance::custom}) {
    if (to_string(p) == name) return p;
  }
  fail(ErrorCode::validation, "unknown weight provenance '" + std::string(name) + "'");
}

double WeightVector::weight_of(std::string_view expert_id) const {
  for (std::size_t i = 0; i < expert_ids.size(); ++i) {
    if (expert_ids[i] == expert_id) return weights[i];
  }
  fail(ErrorCode::not_found, "no weight for expert '" + std::string(expert_id) + "'");
}

void validate(const WeightVector& w) {
  if (w.weights.empty()) fail(ErrorCode::validation, "weight vector is empty");
  if (w.expert_ids.size() != w.weights.size()) {
    fail(ErrorCode::validation, "weight vector ids and weights differ in length");
  }
  std::set<std::string> seen;
  for (const auto& id : w.expert_ids) {
    if (!seen.insert(id).second) fail(ErrorCode::validation, "duplicate expert id '" + id + "'");
  }
  double total = 0.0;
  for (double x : w.weights) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      fail(ErrorCode::validation, "weights must be finite and nonnegative");
    }
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    fail(ErrorCode::validation, "weights must sum to 1 within 1e-12");
  }
  if (w.provenance == Provenance::equal) {
    const double expected = 1.0 / static_cast<double>(w.weights.size());
    for (double x : w.weights) {
      if (x != expected) fail(ErrorCode::validation, "equal weights must all be exactly 1/n");
    }
  }
  if (w.provenance == Provenance::classical_method && w.cm.size() != w.weights.size()) {
    fail(ErrorCode::validation, "classical-method weights need per-expert calibration records");
  }
}

WeightVector equal_weights(std::span<const std::string> expert_ids) {
  if (expert_ids.empty()) fail(ErrorCode::domain, "equal weights need at least one expert");
  WeightVector w;
  w.expert_ids.assign(expert_ids.begin(), expert_ids.end());
  w.weights.assign(expert_ids.size(), 1.0 / static_cast<double>(expert_ids.size()));
  w.provenance = Provenance::equal;
  validate(w);
  return w;
}

WeightVector custom_weights(std::vector<std::string> expert_ids, std::vector<double> weights) {
  WeightVector w;
  w.expert_ids = std::move(expert_ids);
  w.weights = std::move(weights);
  w.provenance = Provenance::custom;
  validate(w);
  return w;
}

Distribution linear_pool(std::span<const Distribution> dists, const WeightVector& w) {
  validate(w);
  if (dists.size() != w.size()) {
    fail(ErrorCode::domain, "linear pool needs one weight per distribution");
  }
  std::vector<std::pair<double, Distribution>> components;
  components.reserve(dists.size());
  for (std::size_t i = 0; i < dists.size(); ++i) components.emplace_back(w.weights[i], dists[i]);
  return Distribution::mixture(std::move(components));
}

Distribution log_linear_pool(std::span<const Distribution> dists, const WeightVector& w,
                             const LogPoolOptions& options) {
  validate(w);
  if (dists.size() != w.size()) {
    fail(ErrorCode::domain, "log-linear pool needs one weight per distribution");
  }
  if (options.grid_points < 16) fail(ErrorCode::configuration, "log pool grid is too coarse");

  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < dists.size(); ++i) {
    if (w.weights[i] > 0.0) active.push_back(i);
  }

  // The pooled density vanishes wherever any expert's does, so the grid
  // lives on the intersection of supports, trimmed to the experts' bulk.
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  double bulk_lo = std::numeric_limits<double>::infinity();
  double bulk_hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i : active) {
    const Support s = dists[i].support();
    lo = std::max(lo, s.lo);
    hi = std::min(hi, s.hi);
    bulk_lo = std::min(bulk_lo, dists[i].quantile(0.5 * options.tail_mass));
    bulk_hi = std::max(bulk_hi, dists[i].quantile(1.0 - 0.5 * options.tail_mass));
  }
  const double a = std::max(lo, bulk_lo);
  const double b = std::min(hi, bulk_hi);
  if (!(a < b)) {
    fail(ErrorCode::empty_pool, "expert supports do not overlap; the log-linear pool has no density");
  }

  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(options.grid_points));
  const int uniform = options.grid_points / 2;
  for (int k = 0; k < uniform; ++k) {
    grid.push_back(a + (b - a) * static_cast<double>(k) / static_cast<double>(uniform - 1));
  }
  const int per_expert = (options.grid_points - uniform) / static_cast<int>(active.size());
  for (std::size_t i : active) {
    for (int k = 0; k < per_expert; ++k) {
      const double q = dists[i].quantile((k + 0.5) / per_expert);
      if (q > a && q < b) grid.push_back(q);
    }
  }
  std::sort(grid.begin(), grid.end());
  const double min_gap = 1e-12 * (b - a);
  std::vector<double> xs;
  xs.reserve(grid.size());
  for (double x : grid) {
    if (xs.empty() || x - xs.back() > min_gap) xs.push_back(x);
  }
  if (xs.back() != b) xs.back() = b;

  auto log_density = [&](double x) {
    double total = 0.0;
    for (std::size_t i : active) {
      const double f = dists[i].pdf(x);
      if (!(f > 0.0)) return -std::numeric_limits<double>::infinity();
      total += w.weights[i] * std::log(f);
    }
    return total;
  };

  std::vector<double> g(xs.size());
  const double nudge = 1e-9 * (b - a);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    double v = std::exp(log_density(xs[k]));
    if (!std::isfinite(v)) {
      // Singular endpoint density (e.g. beta with shape < 1); step inside.
      const double inward = k == 0 ? xs[k] + nudge : xs[k] - nudge;
      v = std::exp(log_density(inward));
      if (!std::isfinite(v)) v = 0.0;
    }
    g[k] = v;
  }

  double mass = 0.0;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) mass += 0.5 * (xs[k + 1] - xs[k]) * (g[k] + g[k + 1]);
  if (!(mass >= options.min_mass)) {
    fail(ErrorCode::empty_pool, "log-linear pool has total mass " + std::to_string(mass) +
                                    "; the experts are effectively disjoint");
  }
  return Distribution::tabulated(std::move(xs), std::move(g));
}

}  // namespace elicit
