#pragma once

#include <random>

#include "elicit/distribution.hpp"

namespace elicit::testing {

// Random parametric distribution with its bulk roughly inside (0, 1) so
// that sets of them overlap enough for log pooling.
inline Distribution random_overlapping(std::mt19937_64& rng, int family) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  switch (family % 4) {
    case 0: return Distribution::normal(0.3 + 0.4 * u(rng), 0.1 + 0.2 * u(rng));
    case 1: return Distribution::lognormal(std::log(0.3 + 0.4 * u(rng)), 0.2 + 0.4 * u(rng));
    case 2: return Distribution::beta(1.5 + 6.0 * u(rng), 1.5 + 6.0 * u(rng));
    default: {
      const double shape = 2.0 + 8.0 * u(rng);
      const double mean = 0.3 + 0.4 * u(rng);
      return Distribution::gamma(shape, mean / shape);
    }
  }
}

inline Distribution random_parametric(std::mt19937_64& rng, int family) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  switch (family % 4) {
    case 0: return Distribution::normal(-5.0 + 10.0 * u(rng), 0.2 + 3.0 * u(rng));
    case 1: return Distribution::lognormal(-1.0 + 2.0 * u(rng), 0.2 + 0.8 * u(rng));
    case 2: return Distribution::beta(0.8 + 8.0 * u(rng), 0.8 + 8.0 * u(rng));
    default: return Distribution::gamma(0.8 + 8.0 * u(rng), 0.2 + 2.0 * u(rng));
  }
}

}  // namespace elicit::testing
