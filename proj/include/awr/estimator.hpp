#pragma once

#include "awr/losses.hpp"

#include <Eigen/Dense>

#include <optional>

namespace awr {

/// Responses y (length n) and covariates X (n x q). The intercept is implicit.
struct Dataset
{
  Eigen::VectorXd y;
  Eigen::MatrixXd X;

  Eigen::Index n() const { return y.size(); }
  Eigen::Index q() const { return X.cols(); }

  /// Throws an input error unless shapes agree, entries are finite and
  /// n >= q + 2.
  void validate() const;

  /// Design row (1, X_i^T).
  Eigen::VectorXd augmented_row(Eigen::Index i) const;
  /// n x (1 + q) design with a leading column of ones.
  Eigen::MatrixXd augmented() const;
};

struct FitResult
{
  Eigen::VectorXd beta; ///< intercept first
  Eigen::VectorXd weights;
  int iterations = 0;
  bool converged = true;
  double gradient_norm = 0.0;
  std::optional<Eigen::MatrixXd> covariance;
};

struct SolverOptions
{
  double tol = 1e-10;
  int max_iter = 100;
  std::optional<Eigen::VectorXd> init;
};

/// Reciprocal condition number below which a normal matrix is degenerate.
inline constexpr double kSingularRcond = 1e-12;

/// Weighted least squares via the weighted normal equations.
FitResult fit_wls(const Dataset& data, const Eigen::VectorXd& weights);

/// Minimizer of sum_i w_i rho(|y_i - x~_i' beta|) by damped Newton on the
/// estimating equation, with an IRLS step whenever the Newton system is
/// singular.
FitResult fit_weighted_m(const Dataset& data,
                         const LossFunction& loss,
                         const Eigen::VectorXd& weights,
                         const SolverOptions& options = {});

/// Residuals y - X~ beta.
Eigen::VectorXd residuals(const Dataset& data, const Eigen::VectorXd& beta);

/// n^{-1} sum_i w_i rho'(|e_i|) sign(e_i) x~_i, the estimating-equation map.
Eigen::VectorXd estimating_equation(const Dataset& data,
                                    const LossFunction& loss,
                                    const Eigen::VectorXd& weights,
                                    const Eigen::VectorXd& beta);

/// Plug-in estimate C^{-1} M C^{-1} / n of the covariance of beta, with
/// C = n^{-1} sum w g2(e) x~x~', M = n^{-1} sum w^2 g1(e) x~x~'.
Eigen::MatrixXd sandwich_covariance(const Dataset& data,
                                    const LossFunction& loss,
                                    const Eigen::VectorXd& weights,
                                    const Eigen::VectorXd& beta);

/// Reciprocal condition number (smallest over largest eigenvalue) of a
/// symmetric positive semi-definite matrix.
double reciprocal_condition(const Eigen::MatrixXd& symmetric);

} // namespace awr
