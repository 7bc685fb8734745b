#pragma once

#include <cstdint>

namespace awr {

/// SplitMix64 finalizer.
constexpr std::uint64_t
mix64(std::uint64_t z)
{
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: the k-th draw of stream s under seed is a pure
/// function of (seed, s, k), so replications can run in any order or on any
/// number of threads without changing their numbers.
class CounterRng
{
public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(mix64(seed) ^ mix64(stream + 0x9E3779B97F4A7C15ULL)))
  {}

  std::uint64_t next_u64()
  {
    ++counter_;
    return mix64(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
  }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform()
  {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal by inverse-CDF transform of uniform().
  double normal();

  std::uint64_t counter() const { return counter_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Standard normal quantile function.
double normal_quantile(double p);

} // namespace awr
