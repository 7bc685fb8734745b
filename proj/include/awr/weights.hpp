#pragma once

#include "awr/estimator.hpp"
#include "awr/kernel.hpp"
#include "awr/losses.hpp"

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <optional>

namespace awr {

/// Constant-weight fit used to plug into every weight formula.
struct FirstStepFit
{
  Eigen::VectorXd beta0_hat;
  Eigen::VectorXd residuals;

  Eigen::VectorXd slope() const { return beta0_hat.tail(beta0_hat.size() - 1); }
};

/// Residuals are zeroed when every one of them is below this multiple of the
/// largest |y| + |fitted terms| in the sample.
inline constexpr double kExactFitTolerance = 1e3 * std::numeric_limits<double>::epsilon();

FirstStepFit first_step(const Dataset& data, const LossFunction& loss);

/// Per-observation weights plus how many entries hit a floor or clamp.
struct Weights
{
  Eigen::VectorXd values;
  int clamp_count = 0;
};

/// Space in which residual transforms are smoothed.
enum class SmoothingMode {
  Nonparametric,           ///< raw covariates X_i
  SemiparametricProjected, ///< A X_i with A = P + eps I
  SemiparametricIndex,     ///< scalar index slope' X_i
};

const char* to_string(SmoothingMode mode);

/// Smoothing coordinates z_i, one row per observation. Kernel arguments are
/// (z_i - z_j) / h in a space of dimension coords.cols().
struct SmoothingGeometry
{
  SmoothingMode mode;
  Eigen::MatrixXd coords;
  double epsilon = 0.0; ///< only meaningful for SemiparametricProjected

  int dim() const { return static_cast<int>(coords.cols()); }
  Eigen::Index size() const { return coords.rows(); }
};

/// Squared Euclidean distance between two contiguous d-vectors.
double squared_distance(const double* a, const double* b, int d);

SmoothingGeometry make_geometry(const Dataset& data,
                                const FirstStepFit& fs,
                                SmoothingMode mode,
                                double epsilon = 0.0);

/// Nadaraya-Watson ratio N/D evaluated at every sample point, where
/// N(z) = n^{-1} sum_i num_i K_h(z_i - z) and likewise D with den_i. The
/// self-term is included. N and D are floored at 1e-8 times their maximum
/// over the sample.
Weights nadaraya_watson_ratio(const SmoothingGeometry& geometry,
                              const KernelSpec& kernel,
                              double h,
                              const Eigen::VectorXd& numerator,
                              const Eigen::VectorXd& denominator);

/// N(z) / D(z) at an arbitrary point z of the smoothing space, without
/// floors. Empty when D(z) = 0.
std::optional<double> nadaraya_watson_ratio_at(const SmoothingGeometry& geometry,
                                               const KernelSpec& kernel,
                                               double h,
                                               const Eigen::VectorXd& numerator,
                                               const Eigen::VectorXd& denominator,
                                               const Eigen::VectorXd& z);

/// Nonparametric weight estimate at an arbitrary covariate value x.
std::optional<double> np_weight_at(const Dataset& data,
                                   const LossFunction& loss,
                                   const FirstStepFit& fs,
                                   const KernelSpec& kernel,
                                   double h,
                                   const Eigen::VectorXd& x);

/// w(x) = N(x) / D(x) with N smoothing g2 and D smoothing g1 of the
/// first-step residuals over the raw covariates.
Weights np_weights(const Dataset& data,
                   const LossFunction& loss,
                   const FirstStepFit& fs,
                   const KernelSpec& kernel,
                   double h);

/// Same ratio smoothed over the scalar index t_i = slope' X_i.
Weights sp_index_weights(const Dataset& data,
                         const LossFunction& loss,
                         const FirstStepFit& fs,
                         const KernelSpec& kernel,
                         double h);

/// Same ratio with kernel argument A (X_i - x) / h, A = P + eps I.
Weights sp_projected_weights(const Dataset& data,
                             const LossFunction& loss,
                             const FirstStepFit& fs,
                             const KernelSpec& kernel,
                             double h,
                             double eps);

/// Orthogonal projector onto span(beta2).
Eigen::MatrixXd projector(const Eigen::VectorXd& beta2);

/// Which coefficient norm enters the epsilon denominator.
enum class EpsilonNorm { Slope, Full };

/// Diagonal perturbation for the projected smoother:
/// sqrt(2 s2 sum_k lambda_k^2 / (n q |b|^2)), lambda_k the eigenvalues of
/// (I - P) S (I - P), S the slope block of the inverse design moment matrix
/// and s2 the mean squared first-step residual.
double epsilon_perturbation(const Dataset& data,
                            const FirstStepFit& fs,
                            EpsilonNorm norm = EpsilonNorm::Slope);

/// Relative clamp applied to parametric and oracle weights.
inline constexpr double kClampLow = 1e-6;
inline constexpr double kClampHigh = 1e6;

using ParametricFamily =
  std::function<double(const Eigen::VectorXd& x, const Eigen::VectorXd& beta)>;
using OracleFamily = std::function<double(const Eigen::VectorXd& x)>;

/// w_i = family(X_i, first-step beta), clamped to [1e-6, 1e6] * median.
/// +inf clamps high; NaN or negative values are errors.
Weights parametric_weights(const ParametricFamily& family,
                           const FirstStepFit& fs,
                           const Dataset& data);

Weights oracle_weights(const OracleFamily& w0, const Dataset& data);

/// Clamp raw weights to [low, high] * median(raw).
Weights clamp_to_median(const Eigen::VectorXd& raw,
                        double low = kClampLow,
                        double high = kClampHigh);

} // namespace awr
