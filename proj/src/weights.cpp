#include "awr/weights.hpp"

#include "awr/errors.hpp"
#include "awr/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace awr {

namespace {

constexpr double kRatioFloor = 1e-8;

void
require_bandwidth(double h)
{
  if (!(h > 0.0) || !std::isfinite(h))
    throw input_error("bad-bandwidth", "bandwidth must be positive and finite");
}

void
require_nonzero_slope(const Eigen::VectorXd& slope)
{
  double norm = slope.norm();
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw numerical_error("index-degenerate", "first-step slope vector is zero");
}

Weights
residual_ratio(const SmoothingGeometry& geometry,
               const LossFunction& loss,
               const FirstStepFit& fs,
               const KernelSpec& kernel,
               double h)
{
  const auto n = fs.residuals.size();
  Eigen::VectorXd num(n);
  Eigen::VectorXd den(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    num[i] = loss_g2(loss, fs.residuals[i]);
    den[i] = loss_g1(loss, fs.residuals[i]);
  }
  return nadaraya_watson_ratio(geometry, kernel, h, num, den);
}

} // namespace

double
squared_distance(const double* a, const double* b, int d)
{
  double s = 0.0;
  for (int k = 0; k < d; ++k) {
    double diff = a[k] - b[k];
    s += diff * diff;
  }
  return s;
}

const char*
to_string(SmoothingMode mode)
{
  switch (mode) {
    case SmoothingMode::Nonparametric:
      return "np";
    case SmoothingMode::SemiparametricProjected:
      return "sp-proj";
    case SmoothingMode::SemiparametricIndex:
      return "sp-index";
  }
  return "?";
}

FirstStepFit
first_step(const Dataset& data, const LossFunction& loss)
{
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(data.n());
  FitResult fit = loss.family() == LossFamily::Square ? fit_wls(data, ones)
                                                      : fit_weighted_m(data, loss, ones);
  if (!fit.converged) {
    throw numerical_error("no-convergence",
                          "first-step fit did not converge (gradient norm " +
                            std::to_string(fit.gradient_norm) + ")");
  }
  FirstStepFit fs;
  fs.beta0_hat = fit.beta;
  fs.residuals = residuals(data, fit.beta);

  // An exact fit leaves residuals at rounding level, which would otherwise
  // turn into weights of order 1e30. Treat the fit as exact in that case.
  double scale = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    double s = std::abs(data.y[i]) + std::abs(fit.beta[0]) +
               (data.X.row(i).transpose().cwiseProduct(fs.slope())).cwiseAbs().sum();
    scale = std::max(scale, s);
  }
  if (fs.residuals.cwiseAbs().maxCoeff() <= kExactFitTolerance * scale)
    fs.residuals.setZero();
  return fs;
}

SmoothingGeometry
make_geometry(const Dataset& data, const FirstStepFit& fs, SmoothingMode mode, double epsilon)
{
  SmoothingGeometry g{ mode, {}, 0.0 };
  switch (mode) {
    case SmoothingMode::Nonparametric:
      g.coords = data.X;
      break;
    case SmoothingMode::SemiparametricIndex: {
      Eigen::VectorXd slope = fs.slope();
      require_nonzero_slope(slope);
      g.coords = data.X * slope;
      break;
    }
    case SmoothingMode::SemiparametricProjected: {
      if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
        throw input_error("bad-epsilon", "epsilon must be nonnegative and finite");
      Eigen::MatrixXd a = projector(fs.slope());
      a.diagonal().array() += epsilon;
      // A is symmetric, so rows of X A are (A X_i)'.
      g.coords = data.X * a;
      g.epsilon = epsilon;
      break;
    }
  }
  return g;
}

Weights
nadaraya_watson_ratio(const SmoothingGeometry& geometry,
                      const KernelSpec& kernel,
                      double h,
                      const Eigen::VectorXd& numerator,
                      const Eigen::VectorXd& denominator)
{
  require_bandwidth(h);
  if (kernel.dimension() != geometry.dim()) {
    throw input_error("dimension-mismatch",
                      "kernel dimension " + std::to_string(kernel.dimension()) +
                        " does not match smoothing dimension " + std::to_string(geometry.dim()));
  }
  const auto n = geometry.size();
  const Eigen::MatrixXd zt = geometry.coords.transpose();
  const int d = geometry.dim();
  const double inv_h2 = 1.0 / (h * h);
  const double scale = std::pow(h, -geometry.dim()) / static_cast<double>(n);

  Eigen::VectorXd num = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd den = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double nj = 0.0;
    double dj = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double k =
        kernel.from_squared_norm(squared_distance(zt.col(i).data(), zt.col(j).data(), d) * inv_h2);
      if (k > 0.0) {
        nj += numerator[i] * k;
        dj += denominator[i] * k;
      }
    }
    num[j] = nj * scale;
    den[j] = dj * scale;
  }

  double den_max = den.maxCoeff();
  if (!(den_max > 0.0) || !std::isfinite(den_max)) {
    throw numerical_error("bandwidth-too-small",
                          "every smoothed denominator is at the floor; the bandwidth is too "
                          "small for this sample (try --bandwidth cv)");
  }
  double num_max = num.maxCoeff();
  if (!(num_max > 0.0) || !std::isfinite(num_max)) {
    throw numerical_error("bandwidth-too-small",
                          "every smoothed numerator vanishes; no observation has positive "
                          "curvature within the kernel windows");
  }

  Weights w;
  w.values.resize(n);
  const double den_floor = kRatioFloor * den_max;
  const double num_floor = kRatioFloor * num_max;
  for (Eigen::Index j = 0; j < n; ++j) {
    double nj = num[j];
    double dj = den[j];
    if (dj < den_floor || nj < num_floor) {
      ++w.clamp_count;
      dj = std::max(dj, den_floor);
      nj = std::max(nj, num_floor);
    }
    w.values[j] = nj / dj;
  }
  return w;
}

std::optional<double>
nadaraya_watson_ratio_at(const SmoothingGeometry& geometry,
                         const KernelSpec& kernel,
                         double h,
                         const Eigen::VectorXd& numerator,
                         const Eigen::VectorXd& denominator,
                         const Eigen::VectorXd& z)
{
  require_bandwidth(h);
  if (kernel.dimension() != geometry.dim() || z.size() != geometry.dim())
    throw input_error("dimension-mismatch", "evaluation point has the wrong dimension");
  const Eigen::MatrixXd zt = geometry.coords.transpose();
  const double inv_h2 = 1.0 / (h * h);
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index i = 0; i < geometry.size(); ++i) {
    double k = kernel.from_squared_norm(squared_distance(zt.col(i).data(), z.data(), geometry.dim()) * inv_h2);
    num += numerator[i] * k;
    den += denominator[i] * k;
  }
  if (!(den > 0.0))
    return std::nullopt;
  return num / den;
}

std::optional<double>
np_weight_at(const Dataset& data,
             const LossFunction& loss,
             const FirstStepFit& fs,
             const KernelSpec& kernel,
             double h,
             const Eigen::VectorXd& x)
{
  auto geometry = make_geometry(data, fs, SmoothingMode::Nonparametric);
  const auto n = data.n();
  Eigen::VectorXd num(n);
  Eigen::VectorXd den(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    num[i] = loss_g2(loss, fs.residuals[i]);
    den[i] = loss_g1(loss, fs.residuals[i]);
  }
  return nadaraya_watson_ratio_at(geometry, kernel, h, num, den, x);
}

Weights
np_weights(const Dataset& data,
           const LossFunction& loss,
           const FirstStepFit& fs,
           const KernelSpec& kernel,
           double h)
{
  auto geometry = make_geometry(data, fs, SmoothingMode::Nonparametric);
  return residual_ratio(geometry, loss, fs, kernel, h);
}

Weights
sp_index_weights(const Dataset& data,
                 const LossFunction& loss,
                 const FirstStepFit& fs,
                 const KernelSpec& kernel,
                 double h)
{
  auto geometry = make_geometry(data, fs, SmoothingMode::SemiparametricIndex);
  return residual_ratio(geometry, loss, fs, kernel, h);
}

Weights
sp_projected_weights(const Dataset& data,
                     const LossFunction& loss,
                     const FirstStepFit& fs,
                     const KernelSpec& kernel,
                     double h,
                     double eps)
{
  auto geometry = make_geometry(data, fs, SmoothingMode::SemiparametricProjected, eps);
  return residual_ratio(geometry, loss, fs, kernel, h);
}

Eigen::MatrixXd
projector(const Eigen::VectorXd& beta2)
{
  double sq = beta2.squaredNorm();
  if (!(sq > 0.0) || !std::isfinite(sq))
    throw numerical_error("index-degenerate", "cannot project onto a zero vector");
  Eigen::MatrixXd p = beta2 * beta2.transpose() / sq;
  return 0.5 * (p + p.transpose());
}

double
epsilon_perturbation(const Dataset& data, const FirstStepFit& fs, EpsilonNorm norm)
{
  data.validate();
  const auto n = data.n();
  const auto q = data.q();
  Eigen::MatrixXd design = data.augmented();
  Eigen::MatrixXd moment = design.transpose() * design / static_cast<double>(n);
  moment = 0.5 * (moment + moment.transpose());
  double rc = reciprocal_condition(moment);
  if (!(rc >= kSingularRcond))
    throw numerical_error("degenerate-design", "design moment matrix is singular");
  Eigen::MatrixXd inverse = moment.ldlt().solve(Eigen::MatrixXd::Identity(q + 1, q + 1));
  Eigen::MatrixXd slope_block = inverse.bottomRightCorner(q, q);

  Eigen::VectorXd slope = fs.slope();
  Eigen::MatrixXd complement = Eigen::MatrixXd::Identity(q, q) - projector(slope);
  Eigen::MatrixXd m = complement * slope_block * complement;
  m = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  double sum_lambda2 = eig.eigenvalues().squaredNorm();

  double sigma2 = fs.residuals.squaredNorm() / static_cast<double>(n);
  double denom_norm = norm == EpsilonNorm::Slope ? slope.squaredNorm() : fs.beta0_hat.squaredNorm();
  double value = 2.0 * sigma2 * sum_lambda2 /
                 (static_cast<double>(n) * static_cast<double>(q) * denom_norm);
  return std::sqrt(std::max(value, 0.0));
}

Weights
clamp_to_median(const Eigen::VectorXd& raw, double low, double high)
{
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    if (std::isnan(raw[i]) || raw[i] < 0.0) {
      throw numerical_error("weight-family",
                            "weight family is negative or NaN at row " + std::to_string(i));
    }
  }
  double mid = median(std::span<const double>(raw.data(), static_cast<std::size_t>(raw.size())));
  if (!(mid > 0.0) || !std::isfinite(mid))
    throw numerical_error("weight-family", "median weight is zero or infinite");
  const double lo = low * mid;
  const double hi = high * mid;
  Weights w;
  w.values.resize(raw.size());
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    double v = raw[i];
    if (v < lo || v > hi) {
      ++w.clamp_count;
      v = std::clamp(v, lo, hi);
    }
    w.values[i] = v;
  }
  return w;
}

Weights
parametric_weights(const ParametricFamily& family, const FirstStepFit& fs, const Dataset& data)
{
  Eigen::VectorXd raw(data.n());
  for (Eigen::Index i = 0; i < data.n(); ++i)
    raw[i] = family(data.X.row(i).transpose(), fs.beta0_hat);
  return clamp_to_median(raw);
}

Weights
oracle_weights(const OracleFamily& w0, const Dataset& data)
{
  Eigen::VectorXd raw(data.n());
  for (Eigen::Index i = 0; i < data.n(); ++i)
    raw[i] = w0(data.X.row(i).transpose());
  return clamp_to_median(raw);
}

} // namespace awr
