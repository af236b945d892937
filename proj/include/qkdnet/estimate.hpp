#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace qkdnet {

/// Monte-Carlo mean with its standard error, computed from i.i.d. batch values.
struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t batches = 0;

  /// (value - reference) / std_error.
  double z_score(double reference) const { return (estimate - reference) / std_error; }
  double relative_error() const { return std_error / std::abs(estimate); }
};

McEstimate summarize(std::span<const double> batch_values);

}  // namespace qkdnet
