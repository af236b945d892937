#include "qkdnet/estimate.hpp"

#include <limits>

namespace qkdnet {

McEstimate summarize(std::span<const double> batch_values) {
  McEstimate out;
  out.batches = batch_values.size();
  if (batch_values.empty()) return out;
  double mean = 0.0;
  for (const double v : batch_values) mean += v;
  mean /= static_cast<double>(batch_values.size());
  out.estimate = mean;
  if (batch_values.size() < 2) {
    out.std_error = std::numeric_limits<double>::infinity();
    return out;
  }
  double ss = 0.0;
  for (const double v : batch_values) ss += (v - mean) * (v - mean);
  const double n = static_cast<double>(batch_values.size());
  out.std_error = std::sqrt(ss / (n - 1.0) / n);
  return out;
}

}  // namespace qkdnet
