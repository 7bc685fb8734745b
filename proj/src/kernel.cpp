#include "awr/kernel.hpp"

#include "awr/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace awr {

double
unit_ball_volume(int q)
{
  if (q < 1)
    throw input_error("domain", "kernel dimension must be at least 1");
  double half = 0.5 * q;
  return std::exp(half * std::log(std::numbers::pi) - std::lgamma(half + 1.0));
}

double
kernel_norm_const(int q)
{
  if (q == 1)
    return 0.75;
  return (q + 2.0) / (2.0 * unit_ball_volume(q));
}

KernelSpec::KernelSpec(int dimension)
  : dim_(dimension)
  , c_(kernel_norm_const(dimension))
{}

double
KernelSpec::operator()(const Eigen::Ref<const Eigen::VectorXd>& u) const
{
  if (u.size() != dim_) {
    throw input_error("dimension-mismatch",
                      "kernel of dimension " + std::to_string(dim_) +
                        " evaluated at a vector of dimension " + std::to_string(u.size()));
  }
  return from_squared_norm(u.squaredNorm());
}

double
kernel_eval(const KernelSpec& kernel, const Eigen::Ref<const Eigen::VectorXd>& u)
{
  return kernel(u);
}

} // namespace awr
