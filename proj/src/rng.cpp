#include "awr/rng.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <numbers>

namespace awr {

double
normal_quantile(double p)
{
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double
CounterRng::normal()
{
  return normal_quantile(uniform());
}

} // namespace awr
