#pragma once

#include "awr/estimator.hpp"
#include "awr/kernel.hpp"
#include "awr/weights.hpp"

#include <optional>
#include <vector>

namespace awr {

/// Candidates whose leave-one-out estimate exists for fewer than this
/// fraction of observations are disqualified.
inline constexpr double kMinValidFraction = 0.8;

struct CvResult
{
  double h_cv = 0.0;
  std::vector<double> grid;
  /// Mean squared leave-one-out error over evaluable terms; +inf when none.
  std::vector<double> scores;
  std::vector<double> valid_fraction;
};

/// Leave-one-out Nadaraya-Watson smooth of squared residuals at point i.
/// Empty when no other observation falls inside the kernel window.
std::optional<double> loo_sigma2(const SmoothingGeometry& geometry,
                                 const Eigen::VectorXd& sq_residuals,
                                 const KernelSpec& kernel,
                                 double h,
                                 Eigen::Index i);

std::optional<double> loo_sigma2(const Dataset& data,
                                 const FirstStepFit& fs,
                                 const KernelSpec& kernel,
                                 double h,
                                 SmoothingMode mode,
                                 Eigen::Index i,
                                 double epsilon = 0.0);

/// 20 geometric points over [h0 / 4, 4 h0] with the pilot
/// h0 = s n^{-1/(d+4)}, s the pooled coordinate standard deviation.
std::vector<double> default_grid(const SmoothingGeometry& geometry, int count = 20);

/// Geometric grid from lo to hi inclusive.
std::vector<double> geometric_grid(double lo, double hi, int count);

/// Leave-one-out cross-validation of the bandwidth for smoothing squared
/// first-step residuals in the given geometry.
CvResult cv_bandwidth(const SmoothingGeometry& geometry,
                      const Eigen::VectorXd& sq_residuals,
                      const KernelSpec& kernel,
                      const std::vector<double>& grid);

CvResult cv_bandwidth(const Dataset& data,
                      const FirstStepFit& fs,
                      const KernelSpec& kernel,
                      SmoothingMode mode,
                      const std::vector<double>& grid,
                      double epsilon = 0.0);

} // namespace awr
