#pragma once

#include <span>
#include <vector>

namespace awr {

/// Quantile by linear interpolation between order statistics (type 7):
/// position p (n - 1) in the sorted sample.
double quantile_sorted(std::span<const double> sorted, double p);

double median(std::span<const double> values);

struct FiveNumber
{
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double variance = 0.0; ///< unbiased; 0 for a single value
  std::size_t count = 0;
};

/// Boxplot statistics; throws on an empty sample.
FiveNumber summarize(std::span<const double> values);

} // namespace awr
