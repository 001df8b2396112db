#pragma once

#include <functional>
#include <span>

#include "elicit/distribution.hpp"

namespace elicit {

struct QuadratureOptions {
  double abs_tol = 1e-8;
  // Upper bound on the number of live subintervals before giving up.
  int max_intervals = 8192;
};

struct QuadratureResult {
  double value;
  double error_bound;
  int intervals;
};

/// Globally adaptive Gauss-Kronrod (7/15) quadrature. Infinite endpoints are
/// handled by mapping each tail onto [0, 1). `breakpoints` (any order, values
/// outside (lo, hi) ignored) seed the initial partition. Throws
/// IntegrationError carrying the best estimate when the tolerance cannot be met.
QuadratureResult integrate_with_error(const std::function<double(double)>& g, double lo, double hi,
                                      std::span<const double> breakpoints = {},
                                      const QuadratureOptions& options = {});

double integrate(const std::function<double(double)>& g, double lo, double hi,
                 std::span<const double> breakpoints = {}, const QuadratureOptions& options = {});

/// Integral of g over the support of d, split at d's breakpoints.
double integrate_over(const Distribution& d, const std::function<double(double)>& g,
                      const QuadratureOptions& options = {});

}  // namespace elicit
