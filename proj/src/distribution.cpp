#include "elicit/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/lognormal.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/tools/roots.hpp>

#include "elicit/error.hpp"

namespace elicit {
namespace {

namespace bm = boost::math;
using Policy = bm::policies::policy<bm::policies::overflow_error<bm::policies::ignore_error>>;

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    fail(ErrorCode::domain, std::string(what) + " must be finite and strictly positive");
  }
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) fail(ErrorCode::domain, std::string(what) + " must be finite");
}

double tabulated_pdf(const TabulatedParams& t, double x) {
  if (!(x >= t.x.front() && x <= t.x.back())) return 0.0;
  auto it = std::upper_bound(t.x.begin(), t.x.end(), x);
  if (it == t.x.end()) return t.pdf.back();
  const auto i = static_cast<std::size_t>(it - t.x.begin()) - 1;
  const double h = t.x[i + 1] - t.x[i];
  const double frac = (x - t.x[i]) / h;
  return t.pdf[i] + (t.pdf[i + 1] - t.pdf[i]) * frac;
}

double tabulated_cdf(const TabulatedParams& t, double x) {
  if (x <= t.x.front()) return 0.0;
  if (x >= t.x.back()) return 1.0;
  auto it = std::upper_bound(t.x.begin(), t.x.end(), x);
  const auto i = static_cast<std::size_t>(it - t.x.begin()) - 1;
  const double h = t.x[i + 1] - t.x[i];
  const double dx = x - t.x[i];
  const double slope = (t.pdf[i + 1] - t.pdf[i]) / h;
  return std::min(1.0, t.cdf[i] + t.pdf[i] * dx + 0.5 * slope * dx * dx);
}

double tabulated_quantile(const TabulatedParams& t, double p) {
  // First segment whose right cdf reaches p.
  auto it = std::lower_bound(t.cdf.begin() + 1, t.cdf.end(), p);
  if (it == t.cdf.end()) return t.x.back();
  const auto i = static_cast<std::size_t>(it - t.cdf.begin()) - 1;
  const double h = t.x[i + 1] - t.x[i];
  const double target = p - t.cdf[i];
  const double f0 = t.pdf[i];
  const double a = 0.5 * (t.pdf[i + 1] - f0) / h;
  double dx;
  if (std::abs(a) * h < 1e-14 * std::max(f0, 1e-300)) {
    dx = f0 > 0.0 ? target / f0 : 0.0;
  } else {
    const double disc = std::max(0.0, f0 * f0 + 4.0 * a * target);
    const double denom = f0 + std::sqrt(disc);
    dx = denom > 0.0 ? 2.0 * target / denom : 0.0;
  }
  return t.x[i] + std::clamp(dx, 0.0, h);
}

// Exact moments of the piecewise-linear density.
std::pair<double, double> tabulated_moments(const TabulatedParams& t) {
  double m1 = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i + 1 < t.x.size(); ++i) {
    const double x0 = t.x[i];
    const double x1 = t.x[i + 1];
    const double f0 = t.pdf[i];
    const double f1 = t.pdf[i + 1];
    const double h = x1 - x0;
    m1 += h * (f0 * (2 * x0 + x1) + f1 * (x0 + 2 * x1)) / 6.0;
    const double xm = 0.5 * (x0 + x1);
    const double fm = 0.5 * (f0 + f1);
    m2 += h * (x0 * x0 * f0 + 4 * xm * xm * fm + x1 * x1 * f1) / 6.0;
  }
  return {m1, m2 - m1 * m1};
}

double mixture_quantile(const MixtureParams& m, const Distribution& self, double p) {
  double lo = kInf;
  double hi = -kInf;
  for (const auto& c : m.components) {
    if (c.weight <= 0.0) continue;
    const double q = c.dist->quantile(p);
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  if (!(hi > lo)) return lo;
  auto f = [&](double x) { return self.cdf(x) - p; };
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo >= 0.0) return lo;
  if (fhi <= 0.0) return hi;
  std::uintmax_t iters = 200;
  auto r = bm::tools::toms748_solve(f, lo, hi, flo, fhi, bm::tools::eps_tolerance<double>(52),
                                    iters);
  return 0.5 * (r.first + r.second);
}

void append_quantile_breakpoints(const Distribution& d, std::vector<double>& out) {
  static constexpr double kProbs[] = {1e-6, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 1 - 1e-6};
  for (double p : kProbs) out.push_back(d.quantile(p));
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::normal: return "normal";
    case Family::lognormal: return "lognormal";
    case Family::beta: return "beta";
    case Family::gamma: return "gamma";
    case Family::mixture: return "mixture";
    case Family::tabulated: return "tabulated";
  }
  return "normal";
}

Family family_from_string(std::string_view name) {
  for (Family f : {Family::normal, Family::lognormal, Family::beta, Family::gamma, Family::mixture,
                   Family::tabulated}) {
    if (to_string(f) == name) return f;
  }
  fail(ErrorCode::validation, "unknown distribution family '" + std::string(name) + "'");
}

Distribution Distribution::normal(double mean, double sd) {
  require_finite(mean, "normal mean");
  require_positive(sd, "normal sd");
  return Distribution(NormalParams{mean, sd});
}

Distribution Distribution::lognormal(double mu, double sigma) {
  require_finite(mu, "lognormal mu");
  require_positive(sigma, "lognormal sigma");
  return Distribution(LogNormalParams{mu, sigma});
}

Distribution Distribution::beta(double alpha, double beta) {
  require_positive(alpha, "beta alpha");
  require_positive(beta, "beta beta");
  return Distribution(BetaParams{alpha, beta});
}

Distribution Distribution::gamma(double shape, double scale) {
  require_positive(shape, "gamma shape");
  require_positive(scale, "gamma scale");
  return Distribution(GammaParams{shape, scale});
}

Distribution Distribution::mixture(std::vector<std::pair<double, Distribution>> components) {
  if (components.empty()) fail(ErrorCode::domain, "mixture needs at least one component");
  MixtureParams m;
  double total = 0.0;
  for (auto& [w, d] : components) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      fail(ErrorCode::domain, "mixture weights must be finite and nonnegative");
    }
    total += w;
    m.components.push_back({w, std::make_shared<const Distribution>(std::move(d))});
  }
  if (std::abs(total - 1.0) > 1e-12) {
    fail(ErrorCode::domain, "mixture weights must sum to 1 (got " + std::to_string(total) + ")");
  }
  return Distribution(std::move(m));
}

Distribution Distribution::tabulated(std::vector<double> x, std::vector<double> pdf) {
  if (x.size() < 2 || x.size() != pdf.size()) {
    fail(ErrorCode::domain, "tabulated density needs matching x/pdf arrays with >= 2 points");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    require_finite(x[i], "tabulated x");
    if (!(pdf[i] >= 0.0) || !std::isfinite(pdf[i])) {
      fail(ErrorCode::domain, "tabulated pdf values must be finite and nonnegative");
    }
    if (i > 0 && !(x[i] > x[i - 1])) {
      fail(ErrorCode::domain, "tabulated x grid must be strictly increasing");
    }
  }
  double mass = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) mass += 0.5 * (x[i + 1] - x[i]) * (pdf[i] + pdf[i + 1]);
  if (!(mass > 0.0)) fail(ErrorCode::domain, "tabulated density has zero mass");
  if (std::abs(mass - 1.0) > 1e-14) {
    for (double& f : pdf) f /= mass;
  }
  std::vector<double> cdf(x.size(), 0.0);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    cdf[i + 1] = cdf[i] + 0.5 * (x[i + 1] - x[i]) * (pdf[i] + pdf[i + 1]);
  }
  // Absorb the rounding residue so the last cdf value is exactly 1.
  const double end = cdf.back();
  for (double& c : cdf) c /= end;
  return Distribution(TabulatedParams{std::move(x), std::move(pdf), std::move(cdf)});
}

Family Distribution::family() const {
  return std::visit(Overloaded{
                        [](const NormalParams&) { return Family::normal; },
                        [](const LogNormalParams&) { return Family::lognormal; },
                        [](const BetaParams&) { return Family::beta; },
                        [](const GammaParams&) { return Family::gamma; },
                        [](const MixtureParams&) { return Family::mixture; },
                        [](const TabulatedParams&) { return Family::tabulated; },
                    },
                    rep_);
}

double Distribution::pdf(double x) const {
  if (std::isnan(x)) return 0.0;
  return std::visit(
      Overloaded{
          [&](const NormalParams& p) {
            const double z = (x - p.mean) / p.sd;
            return std::exp(-0.5 * z * z) / (p.sd * std::sqrt(2.0 * std::numbers::pi));
          },
          [&](const LogNormalParams& p) {
            if (!(x > 0.0) || std::isinf(x)) return 0.0;
            return bm::pdf(bm::lognormal_distribution<double, Policy>(p.mu, p.sigma), x);
          },
          [&](const BetaParams& p) {
            if (!(x >= 0.0 && x <= 1.0)) return 0.0;
            return bm::pdf(bm::beta_distribution<double, Policy>(p.alpha, p.beta), x);
          },
          [&](const GammaParams& p) {
            if (!(x >= 0.0) || std::isinf(x)) return 0.0;
            return bm::pdf(bm::gamma_distribution<double, Policy>(p.shape, p.scale), x);
          },
          [&](const MixtureParams& m) {
            double total = 0.0;
            for (const auto& c : m.components) {
              if (c.weight > 0.0) total += c.weight * c.dist->pdf(x);
            }
            return total;
          },
          [&](const TabulatedParams& t) { return tabulated_pdf(t, x); },
      },
      rep_);
}

double Distribution::cdf(double x) const {
  if (std::isnan(x)) fail(ErrorCode::domain, "cdf argument is NaN");
  return std::visit(
      Overloaded{
          [&](const NormalParams& p) {
            if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
            return bm::cdf(bm::normal_distribution<double, Policy>(p.mean, p.sd), x);
          },
          [&](const LogNormalParams& p) {
            if (x <= 0.0) return 0.0;
            if (std::isinf(x)) return 1.0;
            return bm::cdf(bm::lognormal_distribution<double, Policy>(p.mu, p.sigma), x);
          },
          [&](const BetaParams& p) {
            if (x <= 0.0) return 0.0;
            if (x >= 1.0) return 1.0;
            return bm::cdf(bm::beta_distribution<double, Policy>(p.alpha, p.beta), x);
          },
          [&](const GammaParams& p) {
            if (x <= 0.0) return 0.0;
            if (std::isinf(x)) return 1.0;
            return bm::cdf(bm::gamma_distribution<double, Policy>(p.shape, p.scale), x);
          },
          [&](const MixtureParams& m) {
            double total = 0.0;
            for (const auto& c : m.components) {
              if (c.weight > 0.0) total += c.weight * c.dist->cdf(x);
            }
            return std::min(total, 1.0);
          },
          [&](const TabulatedParams& t) { return tabulated_cdf(t, x); },
      },
      rep_);
}

double Distribution::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) {
    fail(ErrorCode::domain, "quantile probability must lie in (0, 1)");
  }
  return std::visit(
      Overloaded{
          [&](const NormalParams& d) {
            return bm::quantile(bm::normal_distribution<double, Policy>(d.mean, d.sd), p);
          },
          [&](const LogNormalParams& d) {
            return bm::quantile(bm::lognormal_distribution<double, Policy>(d.mu, d.sigma), p);
          },
          [&](const BetaParams& d) {
            return bm::quantile(bm::beta_distribution<double, Policy>(d.alpha, d.beta), p);
          },
          [&](const GammaParams& d) {
            return bm::quantile(bm::gamma_distribution<double, Policy>(d.shape, d.scale), p);
          },
          [&](const MixtureParams& m) { return mixture_quantile(m, *this, p); },
          [&](const TabulatedParams& t) { return tabulated_quantile(t, p); },
      },
      rep_);
}

double Distribution::mean() const {
  return std::visit(Overloaded{
                        [](const NormalParams& p) { return p.mean; },
                        [](const LogNormalParams& p) {
                          return std::exp(p.mu + 0.5 * p.sigma * p.sigma);
                        },
                        [](const BetaParams& p) { return p.alpha / (p.alpha + p.beta); },
                        [](const GammaParams& p) { return p.shape * p.scale; },
                        [](const MixtureParams& m) {
                          double total = 0.0;
                          for (const auto& c : m.components) {
                            if (c.weight > 0.0) total += c.weight * c.dist->mean();
                          }
                          return total;
                        },
                        [](const TabulatedParams& t) { return tabulated_moments(t).first; },
                    },
                    rep_);
}

double Distribution::variance() const {
  return std::visit(
      Overloaded{
          [](const NormalParams& p) { return p.sd * p.sd; },
          [](const LogNormalParams& p) {
            const double s2 = p.sigma * p.sigma;
            return std::expm1(s2) * std::exp(2.0 * p.mu + s2);
          },
          [](const BetaParams& p) {
            const double s = p.alpha + p.beta;
            return p.alpha * p.beta / (s * s * (s + 1.0));
          },
          [](const GammaParams& p) { return p.shape * p.scale * p.scale; },
          [](const MixtureParams& m) {
            double mean = 0.0;
            double second = 0.0;
            for (const auto& c : m.components) {
              if (c.weight <= 0.0) continue;
              const double mu = c.dist->mean();
              mean += c.weight * mu;
              second += c.weight * (c.dist->variance() + mu * mu);
            }
            return std::max(0.0, second - mean * mean);
          },
          [](const TabulatedParams& t) { return tabulated_moments(t).second; },
      },
      rep_);
}

Support Distribution::support() const {
  return std::visit(Overloaded{
                        [](const NormalParams&) { return Support{-kInf, kInf}; },
                        [](const LogNormalParams&) { return Support{0.0, kInf}; },
                        [](const BetaParams&) { return Support{0.0, 1.0}; },
                        [](const GammaParams&) { return Support{0.0, kInf}; },
                        [](const MixtureParams& m) {
                          Support s{kInf, -kInf};
                          for (const auto& c : m.components) {
                            if (c.weight <= 0.0) continue;
                            const Support cs = c.dist->support();
                            s.lo = std::min(s.lo, cs.lo);
                            s.hi = std::max(s.hi, cs.hi);
                          }
                          return s;
                        },
                        [](const TabulatedParams& t) { return Support{t.x.front(), t.x.back()}; },
                    },
                    rep_);
}

std::vector<double> Distribution::breakpoints() const {
  std::vector<double> out;
  std::visit(Overloaded{
                 [&](const MixtureParams& m) {
                   for (const auto& c : m.components) {
                     if (c.weight <= 0.0) continue;
                     auto inner = c.dist->breakpoints();
                     out.insert(out.end(), inner.begin(), inner.end());
                   }
                 },
                 [&](const TabulatedParams& t) { out = t.x; },
                 [&](const auto&) { append_quantile_breakpoints(*this, out); },
             },
             rep_);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool operator==(const Distribution& a, const Distribution& b) {
  if (a.rep_.index() != b.rep_.index()) return false;
  return std::visit(
      Overloaded{
          [&](const NormalParams& p) {
            const auto& q = std::get<NormalParams>(b.rep_);
            return p.mean == q.mean && p.sd == q.sd;
          },
          [&](const LogNormalParams& p) {
            const auto& q = std::get<LogNormalParams>(b.rep_);
            return p.mu == q.mu && p.sigma == q.sigma;
          },
          [&](const BetaParams& p) {
            const auto& q = std::get<BetaParams>(b.rep_);
            return p.alpha == q.alpha && p.beta == q.beta;
          },
          [&](const GammaParams& p) {
            const auto& q = std::get<GammaParams>(b.rep_);
            return p.shape == q.shape && p.scale == q.scale;
          },
          [&](const MixtureParams& m) {
            const auto& n = std::get<MixtureParams>(b.rep_);
            if (m.components.size() != n.components.size()) return false;
            for (std::size_t i = 0; i < m.components.size(); ++i) {
              if (m.components[i].weight != n.components[i].weight) return false;
              if (!(*m.components[i].dist == *n.components[i].dist)) return false;
            }
            return true;
          },
          [&](const TabulatedParams& t) {
            const auto& u = std::get<TabulatedParams>(b.rep_);
            return t.x == u.x && t.pdf == u.pdf;
          },
      },
      a.rep_);
}

}  // namespace elicit
