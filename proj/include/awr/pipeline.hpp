#pragma once

#include "awr/bandwidth.hpp"
#include "awr/estimator.hpp"
#include "awr/weights.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace awr {

/// Fixed bandwidth, or cross-validation over a grid (default grid if empty).
struct BandwidthChoice
{
  std::optional<double> fixed;
  std::vector<double> grid;

  static BandwidthChoice cv(std::vector<double> grid = {}) { return { std::nullopt, std::move(grid) }; }
  static BandwidthChoice value(double h) { return { h, {} }; }
};

namespace weight_spec {

struct Fixed
{
  Eigen::VectorXd values;
};
struct Constant
{};
struct Parametric
{
  ParametricFamily family;
};
struct Nonparametric
{
  BandwidthChoice bandwidth;
};
struct SemiparametricIndex
{
  BandwidthChoice bandwidth;
};
struct SemiparametricProjected
{
  BandwidthChoice bandwidth;
  std::optional<double> epsilon; ///< empty: computed from the data
  EpsilonNorm norm = EpsilonNorm::Slope;
};
struct Oracle
{
  OracleFamily w0;
};

} // namespace weight_spec

using WeightSpec = std::variant<weight_spec::Fixed,
                                weight_spec::Constant,
                                weight_spec::Parametric,
                                weight_spec::Nonparametric,
                                weight_spec::SemiparametricIndex,
                                weight_spec::SemiparametricProjected,
                                weight_spec::Oracle>;

std::string weight_kind(const WeightSpec& spec);

struct WeightOutcome
{
  Weights weights;
  std::optional<double> bandwidth;
  std::string bandwidth_method; ///< "cv", "fixed" or empty
  std::optional<CvResult> cv;
  std::optional<double> epsilon;
};

/// Produces weights for one observation sample given its first-step fit.
WeightOutcome compute_weights(const Dataset& data,
                              const LossFunction& loss,
                              const FirstStepFit& fs,
                              const WeightSpec& spec);

struct AdaptiveFit
{
  FirstStepFit first;
  WeightOutcome weighting;
  FitResult fit;
};

/// Weighted fit: closed form for the square loss, iterative otherwise.
FitResult fit_with_weights(const Dataset& data,
                           const LossFunction& loss,
                           const Eigen::VectorXd& weights,
                           const std::optional<Eigen::VectorXd>& init = std::nullopt);

/// First step, weight estimation, final fit and (when the curvature matrix
/// is regular) sandwich covariance.
AdaptiveFit adaptive_fit(const Dataset& data, const LossFunction& loss, const WeightSpec& spec);

} // namespace awr
