#pragma once

#include <Eigen/Dense>

namespace awr {

/// Volume of the unit ball in R^q.
double unit_ball_volume(int q);

/// Normalizing constant of the Epanechnikov kernel in R^q, (q + 2) / (2 V_q).
double kernel_norm_const(int q);

/// Multivariate Epanechnikov kernel K(u) = c_q (1 - |u|^2)_+.
class KernelSpec
{
public:
  explicit KernelSpec(int dimension);

  int dimension() const { return dim_; }
  double norm_const() const { return c_; }

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& u) const;

  /// Kernel value from a precomputed squared norm |u|^2.
  double from_squared_norm(double sq) const { return sq < 1.0 ? c_ * (1.0 - sq) : 0.0; }

private:
  int dim_;
  double c_;
};

double kernel_eval(const KernelSpec& kernel, const Eigen::Ref<const Eigen::VectorXd>& u);

} // namespace awr
