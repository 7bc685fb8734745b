#include "awr/stats.hpp"

#include "awr/errors.hpp"

#include <algorithm>
#include <cmath>

namespace awr {

double
quantile_sorted(std::span<const double> sorted, double p)
{
  if (sorted.empty())
    throw input_error("empty-sample", "quantile of an empty sample");
  double pos = p * static_cast<double>(sorted.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(pos));
  auto hi = std::min(lo + 1, sorted.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double
median(std::span<const double> values)
{
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  return quantile_sorted(v, 0.5);
}

FiveNumber
summarize(std::span<const double> values)
{
  if (values.empty())
    throw input_error("empty-sample", "cannot summarize an empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  FiveNumber s;
  s.count = v.size();
  s.min = v.front();
  s.max = v.back();
  s.q1 = quantile_sorted(v, 0.25);
  s.median = quantile_sorted(v, 0.5);
  s.q3 = quantile_sorted(v, 0.75);
  double sum = 0.0;
  for (double x : values)
    sum += x;
  s.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : values)
      ss += (x - s.mean) * (x - s.mean);
    s.variance = ss / static_cast<double>(v.size() - 1);
  }
  return s;
}

} // namespace awr
