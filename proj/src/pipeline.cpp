#include "awr/pipeline.hpp"

#include "awr/errors.hpp"

#include <cmath>

namespace awr {

namespace {

template<class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};

// Resolves the bandwidth for a smoothing geometry, running CV when asked.
void
choose_bandwidth(const SmoothingGeometry& geometry,
                 const FirstStepFit& fs,
                 const KernelSpec& kernel,
                 const BandwidthChoice& choice,
                 WeightOutcome& out)
{
  if (choice.fixed) {
    if (!(*choice.fixed > 0.0) || !std::isfinite(*choice.fixed))
      throw input_error("bad-bandwidth", "bandwidth must be positive and finite");
    out.bandwidth = *choice.fixed;
    out.bandwidth_method = "fixed";
    return;
  }
  auto grid = choice.grid.empty() ? default_grid(geometry) : choice.grid;
  out.cv = cv_bandwidth(geometry, fs.residuals.array().square().matrix(), kernel, grid);
  out.bandwidth = out.cv->h_cv;
  out.bandwidth_method = "cv";
}

WeightOutcome
smoothed(const Dataset& data,
         const LossFunction& loss,
         const FirstStepFit& fs,
         SmoothingMode mode,
         const BandwidthChoice& choice,
         double epsilon)
{
  WeightOutcome out;
  auto geometry = make_geometry(data, fs, mode, epsilon);
  KernelSpec kernel(geometry.dim());
  choose_bandwidth(geometry, fs, kernel, choice, out);
  const auto n = data.n();
  Eigen::VectorXd num(n);
  Eigen::VectorXd den(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    num[i] = loss_g2(loss, fs.residuals[i]);
    den[i] = loss_g1(loss, fs.residuals[i]);
  }
  out.weights = nadaraya_watson_ratio(geometry, kernel, *out.bandwidth, num, den);
  return out;
}

} // namespace

std::string
weight_kind(const WeightSpec& spec)
{
  return std::visit(overloaded{
                      [](const weight_spec::Fixed&) { return "fixed"; },
                      [](const weight_spec::Constant&) { return "constant"; },
                      [](const weight_spec::Parametric&) { return "parametric"; },
                      [](const weight_spec::Nonparametric&) { return "np"; },
                      [](const weight_spec::SemiparametricIndex&) { return "sp-index"; },
                      [](const weight_spec::SemiparametricProjected&) { return "sp-proj"; },
                      [](const weight_spec::Oracle&) { return "oracle"; },
                    },
                    spec);
}

WeightOutcome
compute_weights(const Dataset& data,
                const LossFunction& loss,
                const FirstStepFit& fs,
                const WeightSpec& spec)
{
  return std::visit(
    overloaded{
      [&](const weight_spec::Fixed& s) {
        if (s.values.size() != data.n())
          throw input_error("bad-weights", "fixed weight vector has the wrong length");
        if (!s.values.allFinite() || (s.values.array() < 0.0).any() ||
            !(s.values.array() > 0.0).any())
          throw input_error("bad-weights", "fixed weights must be finite, >= 0, not all zero");
        WeightOutcome out;
        out.weights.values = s.values;
        return out;
      },
      [&](const weight_spec::Constant&) {
        WeightOutcome out;
        out.weights.values = Eigen::VectorXd::Ones(data.n());
        return out;
      },
      [&](const weight_spec::Parametric& s) {
        WeightOutcome out;
        out.weights = parametric_weights(s.family, fs, data);
        return out;
      },
      [&](const weight_spec::Nonparametric& s) {
        return smoothed(data, loss, fs, SmoothingMode::Nonparametric, s.bandwidth, 0.0);
      },
      [&](const weight_spec::SemiparametricIndex& s) {
        return smoothed(data, loss, fs, SmoothingMode::SemiparametricIndex, s.bandwidth, 0.0);
      },
      [&](const weight_spec::SemiparametricProjected& s) {
        double eps = s.epsilon ? *s.epsilon : epsilon_perturbation(data, fs, s.norm);
        auto out = smoothed(data, loss, fs, SmoothingMode::SemiparametricProjected, s.bandwidth, eps);
        out.epsilon = eps;
        return out;
      },
      [&](const weight_spec::Oracle& s) {
        WeightOutcome out;
        out.weights = oracle_weights(s.w0, data);
        return out;
      },
    },
    spec);
}

FitResult
fit_with_weights(const Dataset& data,
                 const LossFunction& loss,
                 const Eigen::VectorXd& weights,
                 const std::optional<Eigen::VectorXd>& init)
{
  if (loss.family() == LossFamily::Square)
    return fit_wls(data, weights);
  SolverOptions options;
  options.init = init;
  return fit_weighted_m(data, loss, weights, options);
}

AdaptiveFit
adaptive_fit(const Dataset& data, const LossFunction& loss, const WeightSpec& spec)
{
  AdaptiveFit out;
  out.first = first_step(data, loss);
  out.weighting = compute_weights(data, loss, out.first, spec);
  out.fit = fit_with_weights(data, loss, out.weighting.weights.values, out.first.beta0_hat);
  try {
    out.fit.covariance =
      sandwich_covariance(data, loss, out.weighting.weights.values, out.fit.beta);
  } catch (const Error& e) {
    if (e.kind() != "degenerate-curvature")
      throw;
  }
  return out;
}

} // namespace awr
