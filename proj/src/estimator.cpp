#include "awr/estimator.hpp"

#include "awr/errors.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace awr {

namespace {

void
check_weights(const Dataset& data, const Eigen::VectorXd& weights)
{
  if (weights.size() != data.n()) {
    throw input_error("bad-weights",
                      "weight vector has length " + std::to_string(weights.size()) +
                        ", expected " + std::to_string(data.n()));
  }
  bool any_positive = false;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (!std::isfinite(weights[i]) || weights[i] < 0.0)
      throw input_error("bad-weights",
                        "weight " + std::to_string(i) + " is negative or not finite");
    any_positive = any_positive || weights[i] > 0.0;
  }
  if (!any_positive)
    throw input_error("bad-weights", "all weights are zero");
}

// n^{-1} sum_i c_i x~_i x~_i'
Eigen::MatrixXd
weighted_moment(const Eigen::MatrixXd& design, const Eigen::VectorXd& c)
{
  const auto n = design.rows();
  Eigen::MatrixXd m = design.transpose() * c.asDiagonal() * design;
  m /= static_cast<double>(n);
  return 0.5 * (m + m.transpose());
}

void
require_regular(const Eigen::MatrixXd& m, const char* kind, const char* what)
{
  double rc = reciprocal_condition(m);
  if (!(rc >= kSingularRcond)) {
    std::ostringstream os;
    os << what << " is singular or nearly so (reciprocal condition estimate " << rc
       << " below " << kSingularRcond << ")";
    throw numerical_error(kind, os.str());
  }
}

double
objective(const LossFunction& loss, const Eigen::VectorXd& weights, const Eigen::VectorXd& e)
{
  double total = 0.0;
  for (Eigen::Index i = 0; i < e.size(); ++i)
    total += weights[i] * loss.rho(std::abs(e[i]));
  return total / static_cast<double>(e.size());
}

Eigen::VectorXd
solve_normal(const Eigen::MatrixXd& design, const Eigen::VectorXd& y, const Eigen::VectorXd& c)
{
  Eigen::MatrixXd sigma = weighted_moment(design, c);
  require_regular(sigma, "degenerate-design", "weighted moment matrix");
  Eigen::VectorXd gamma = design.transpose() * c.cwiseProduct(y);
  gamma /= static_cast<double>(design.rows());
  return sigma.ldlt().solve(gamma);
}

} // namespace

void
Dataset::validate() const
{
  if (X.rows() != y.size()) {
    throw input_error("bad-dataset",
                      "response length " + std::to_string(y.size()) + " does not match " +
                        std::to_string(X.rows()) + " covariate rows");
  }
  if (X.cols() < 1)
    throw input_error("bad-dataset", "at least one covariate is required");
  if (n() < q() + 2) {
    throw input_error("bad-dataset",
                      "need at least q + 2 = " + std::to_string(q() + 2) +
                        " observations, got " + std::to_string(n()));
  }
  if (!y.allFinite() || !X.allFinite())
    throw input_error("bad-dataset", "dataset contains non-finite values");
}

Eigen::VectorXd
Dataset::augmented_row(Eigen::Index i) const
{
  Eigen::VectorXd row(q() + 1);
  row[0] = 1.0;
  row.tail(q()) = X.row(i).transpose();
  return row;
}

Eigen::MatrixXd
Dataset::augmented() const
{
  Eigen::MatrixXd design(n(), q() + 1);
  design.col(0).setOnes();
  design.rightCols(q()) = X;
  return design;
}

double
reciprocal_condition(const Eigen::MatrixXd& symmetric)
{
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetric, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  double hi = ev.cwiseAbs().maxCoeff();
  if (!(hi > 0.0) || !std::isfinite(hi))
    return 0.0;
  return std::max(ev.minCoeff(), 0.0) / hi;
}

Eigen::VectorXd
residuals(const Dataset& data, const Eigen::VectorXd& beta)
{
  return data.y - data.X * beta.tail(data.q()) - Eigen::VectorXd::Constant(data.n(), beta[0]);
}

FitResult
fit_wls(const Dataset& data, const Eigen::VectorXd& weights)
{
  data.validate();
  check_weights(data, weights);
  FitResult fit;
  fit.beta = solve_normal(data.augmented(), data.y, weights);
  fit.weights = weights;
  fit.iterations = 0;
  fit.converged = true;
  fit.gradient_norm =
    estimating_equation(data, LossFunction::square(), weights, fit.beta).lpNorm<Eigen::Infinity>();
  return fit;
}

Eigen::VectorXd
estimating_equation(const Dataset& data,
                    const LossFunction& loss,
                    const Eigen::VectorXd& weights,
                    const Eigen::VectorXd& beta)
{
  Eigen::VectorXd e = residuals(data, beta);
  Eigen::VectorXd score(data.n());
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    double s = e[i] > 0.0 ? 1.0 : (e[i] < 0.0 ? -1.0 : 0.0);
    score[i] = weights[i] * loss.rho_prime(std::abs(e[i])) * s;
  }
  Eigen::VectorXd out(data.q() + 1);
  out[0] = score.sum();
  out.tail(data.q()) = data.X.transpose() * score;
  return out / static_cast<double>(data.n());
}

FitResult
fit_weighted_m(const Dataset& data,
               const LossFunction& loss,
               const Eigen::VectorXd& weights,
               const SolverOptions& options)
{
  data.validate();
  check_weights(data, weights);
  const Eigen::MatrixXd design = data.augmented();
  require_regular(weighted_moment(design, weights), "degenerate-design", "weighted moment matrix");

  Eigen::VectorXd beta;
  if (options.init) {
    if (options.init->size() != data.q() + 1)
      throw input_error("bad-init", "initial coefficient vector has the wrong length");
    beta = *options.init;
  } else {
    beta = solve_normal(design, data.y, Eigen::VectorXd::Ones(data.n()));
  }

  FitResult fit;
  fit.weights = weights;
  fit.converged = false;

  Eigen::VectorXd e = residuals(data, beta);
  double f = objective(loss, weights, e);
  Eigen::VectorXd g = estimating_equation(data, loss, weights, beta);

  int iter = 0;
  for (; iter < options.max_iter; ++iter) {
    if (g.lpNorm<Eigen::Infinity>() <= options.tol) {
      fit.converged = true;
      break;
    }

    // Newton direction when the curvature matrix is regular, IRLS otherwise.
    Eigen::VectorXd curvature(data.n());
    for (Eigen::Index i = 0; i < data.n(); ++i)
      curvature[i] = weights[i] * loss_g2(loss, e[i]);
    Eigen::MatrixXd hessian = weighted_moment(design, curvature);

    Eigen::VectorXd step;
    bool newton = reciprocal_condition(hessian) >= kSingularRcond;
    if (newton) {
      step = hessian.ldlt().solve(g);
    } else {
      Eigen::VectorXd irls(data.n());
      for (Eigen::Index i = 0; i < data.n(); ++i)
        irls[i] = weights[i] * loss_irls_ratio(loss, e[i]);
      step = solve_normal(design, data.y, irls) - beta;
    }

    // Step halving on the weighted objective.
    double t = 1.0;
    bool accepted = false;
    Eigen::VectorXd candidate;
    Eigen::VectorXd candidate_e;
    double candidate_f = f;
    for (int halvings = 0; halvings < 60; ++halvings, t *= 0.5) {
      candidate = beta + t * step;
      candidate_e = residuals(data, candidate);
      candidate_f = objective(loss, weights, candidate_e);
      if (candidate_f <= f + 1e-15 * std::abs(f)) {
        accepted = true;
        break;
      }
    }
    if (!accepted)
      break;

    Eigen::VectorXd candidate_g = estimating_equation(data, loss, weights, candidate);
    // Objective flat to rounding and gradient not improving: stalled.
    if (candidate_f >= f && candidate_g.lpNorm<Eigen::Infinity>() >= g.lpNorm<Eigen::Infinity>()) {
      beta = candidate;
      g = candidate_g;
      ++iter;
      break;
    }
    beta = std::move(candidate);
    e = std::move(candidate_e);
    f = candidate_f;
    g = std::move(candidate_g);
  }
  if (!fit.converged && g.lpNorm<Eigen::Infinity>() <= options.tol)
    fit.converged = true;

  fit.beta = beta;
  fit.iterations = iter;
  fit.gradient_norm = g.lpNorm<Eigen::Infinity>();
  return fit;
}

Eigen::MatrixXd
sandwich_covariance(const Dataset& data,
                    const LossFunction& loss,
                    const Eigen::VectorXd& weights,
                    const Eigen::VectorXd& beta)
{
  data.validate();
  check_weights(data, weights);
  if (beta.size() != data.q() + 1)
    throw input_error("bad-beta", "coefficient vector has the wrong length");
  const Eigen::MatrixXd design = data.augmented();
  Eigen::VectorXd e = residuals(data, beta);
  Eigen::VectorXd c(data.n());
  Eigen::VectorXd m(data.n());
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    c[i] = weights[i] * loss_g2(loss, e[i]);
    m[i] = weights[i] * weights[i] * loss_g1(loss, e[i]);
  }
  Eigen::MatrixXd curvature = weighted_moment(design, c);
  require_regular(curvature, "degenerate-curvature", "curvature matrix");
  Eigen::MatrixXd meat = weighted_moment(design, m);
  auto ldlt = curvature.ldlt();
  Eigen::MatrixXd left = ldlt.solve(meat);
  Eigen::MatrixXd cov = ldlt.solve(left.transpose());
  cov /= static_cast<double>(data.n());
  return 0.5 * (cov + cov.transpose());
}

} // namespace awr
