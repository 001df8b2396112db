#pragma once

#include <limits>
#include <memory>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace elicit {

enum class Family { normal, lognormal, beta, gamma, mixture, tabulated };

std::string_view to_string(Family family);
Family family_from_string(std::string_view name);

/// The parametric families a judgment can be fitted to.
inline constexpr Family kFittableFamilies[] = {Family::normal, Family::lognormal, Family::beta,
                                              Family::gamma};

struct Support {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double x) const { return x >= lo && x <= hi; }
  bool bounded_below() const { return lo > -std::numeric_limits<double>::infinity(); }
  bool bounded_above() const { return hi < std::numeric_limits<double>::infinity(); }
  friend bool operator==(const Support&, const Support&) = default;
};

struct NormalParams {
  double mean;
  double sd;
};

struct LogNormalParams {
  double mu;
  double sigma;
};

/// Beta on [0, 1].
struct BetaParams {
  double alpha;
  double beta;
};

struct GammaParams {
  double shape;
  double scale;
};

class Distribution;

struct MixtureComponent {
  double weight;
  std::shared_ptr<const Distribution> dist;
};

struct MixtureParams {
  std::vector<MixtureComponent> components;
};

// Piecewise-linear density on a sorted grid; the cdf is its exact integral.
struct TabulatedParams {
  std::vector<double> x;
  std::vector<double> pdf;
  std::vector<double> cdf;
};

/// Immutable value type over the supported families. Copies are cheap for
/// mixtures (components are shared) and safe to hand between threads.
class Distribution {
 public:
  static Distribution normal(double mean, double sd);
  static Distribution lognormal(double mu, double sigma);
  static Distribution beta(double alpha, double beta);
  static Distribution gamma(double shape, double scale);
  /// Weights must be nonnegative and sum to 1 within 1e-12.
  static Distribution mixture(std::vector<std::pair<double, Distribution>> components);
  /// Normalizes the supplied density so the piecewise-linear interpolant
  /// integrates to 1. Grid must be strictly increasing with >= 2 points.
  static Distribution tabulated(std::vector<double> x, std::vector<double> pdf);

  Family family() const;

  double pdf(double x) const;
  double cdf(double x) const;
  /// Throws ErrorCode::domain unless 0 < p < 1.
  double quantile(double p) const;
  double median() const { return quantile(0.5); }
  double mean() const;
  double variance() const;
  Support support() const;

  /// Points where the density changes character (component bulk, kinks of a
  /// tabulated density). Quadrature splits the support at these.
  std::vector<double> breakpoints() const;

  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&rep_);
  }

  friend bool operator==(const Distribution& a, const Distribution& b);

 private:
  using Rep = std::variant<NormalParams, LogNormalParams, BetaParams, GammaParams, MixtureParams,
                           TabulatedParams>;
  explicit Distribution(Rep rep) : rep_(std::move(rep)) {}

  Rep rep_;
};

}  // namespace elicit
