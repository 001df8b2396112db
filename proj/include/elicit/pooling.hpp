#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "elicit/distribution.hpp"

namespace elicit {

enum class Provenance { equal, classical_method, custom };

std::string_view to_string(Provenance provenance);
Provenance provenance_from_string(std::string_view name);

/// Per-expert Classical Method bookkeeping kept next to the weights.
struct CmExpertInfo {
  double calibration = 0.0;
  double information = 0.0;
  bool cutoff_passed = false;
  friend bool operator==(const CmExpertInfo&, const CmExpertInfo&) = default;
};

struct WeightVector {
  std::vector<std::string> expert_ids;
  std::vector<double> weights;
  Provenance provenance = Provenance::custom;
  // Populated for classical_method provenance only; aligned with expert_ids.
  std::vector<CmExpertInfo> cm;
  double alpha = 0.0;

  std::size_t size() const { return weights.size(); }
  double weight_of(std::string_view expert_id) const;
  friend bool operator==(const WeightVector&, const WeightVector&) = default;
};

/// Nonnegative, summing to 1 within 1e-12, ids distinct, equal provenance
/// means exactly 1/n. Throws ErrorCode::validation.
void validate(const WeightVector& w);

WeightVector equal_weights(std::span<const std::string> expert_ids);
WeightVector custom_weights(std::vector<std::string> expert_ids, std::vector<double> weights);

/// Weighted arithmetic mean of densities, returned as a mixture.
Distribution linear_pool(std::span<const Distribution> dists, const WeightVector& w);

struct LogPoolOptions {
  int grid_points = 2048;
  // Total tail probability trimmed from each expert when bounding the grid.
  double tail_mass = 1e-6;
  double min_mass = 1e-12;
};

/// Weighted geometric mean of densities renormalized to a tabulated density.
/// Experts with zero weight do not constrain the support. Throws
/// ErrorCode::empty_pool when the unnormalized mass is below `min_mass`.
Distribution log_linear_pool(std::span<const Distribution> dists, const WeightVector& w,
                             const LogPoolOptions& options = {});

}  // namespace elicit
