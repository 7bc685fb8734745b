#include "awr/simulation.hpp"

#include "awr/errors.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace awr {

const char*
to_string(SigmaKind kind)
{
  switch (kind) {
    case SigmaKind::Smooth:
      return "smooth";
    case SigmaKind::Discontinuous:
      return "disc";
    case SigmaKind::Homoscedastic:
      return "homo";
  }
  return "?";
}

const char*
to_string(Method method)
{
  switch (method) {
    case Method::FirstStep:
      return "first-step";
    case Method::Parametric:
      return "parametric";
    case Method::Nonparametric:
      return "np";
    case Method::Semiparametric:
      return "sp";
    case Method::SemiparametricIndex:
      return "sp-index";
    case Method::Oracle:
      return "oracle";
  }
  return "?";
}

SigmaKind
parse_sigma_kind(std::string_view text)
{
  if (text == "smooth")
    return SigmaKind::Smooth;
  if (text == "disc")
    return SigmaKind::Discontinuous;
  if (text == "homo")
    return SigmaKind::Homoscedastic;
  throw input_error("bad-sigma", "unknown sigma kind '" + std::string(text) +
                                   "' (expected smooth, disc or homo)");
}

Method
parse_method(std::string_view text)
{
  for (Method m : { Method::FirstStep, Method::Parametric, Method::Nonparametric,
                    Method::Semiparametric, Method::SemiparametricIndex, Method::Oracle }) {
    if (text == to_string(m))
      return m;
  }
  throw input_error("bad-method", "unknown method '" + std::string(text) + "'");
}

void
SimConfig::validate() const
{
  if (q < 1)
    throw input_error("bad-config", "q must be at least 1");
  if (n < q + 2)
    throw input_error("bad-config", "n must be at least q + 2");
  if (replications < 1)
    throw input_error("bad-config", "replications must be at least 1");
  if (methods.empty())
    throw input_error("bad-config", "no methods requested");
  if (workers < 1)
    throw input_error("bad-config", "workers must be at least 1");
  if (bandwidth.fixed && !(*bandwidth.fixed > 0.0))
    throw input_error("bad-config", "bandwidth must be positive");
}

Eigen::VectorXd
true_beta(int q)
{
  return Eigen::VectorXd::Constant(q + 1, 1.0 / std::sqrt(q + 1.0));
}

double
sigma_value(SigmaKind kind, const Eigen::VectorXd& x, const Eigen::VectorXd& slope)
{
  switch (kind) {
    case SigmaKind::Smooth:
      return slope.dot(x) / slope.norm();
    case SigmaKind::Discontinuous:
      return slope.dot(x) > 0.0 ? 2.5 : 0.5;
    case SigmaKind::Homoscedastic:
      return 1.0;
  }
  return 1.0;
}

ParametricFamily
inverse_variance_family(SigmaKind kind)
{
  return [kind](const Eigen::VectorXd& x, const Eigen::VectorXd& beta) {
    double s = sigma_value(kind, x, beta.tail(beta.size() - 1));
    return 1.0 / (s * s);
  };
}

OracleFamily
oracle_family(SigmaKind kind, const Eigen::VectorXd& beta0)
{
  Eigen::VectorXd slope = beta0.tail(beta0.size() - 1);
  return [kind, slope](const Eigen::VectorXd& x) {
    double s = sigma_value(kind, x, slope);
    return 1.0 / (s * s);
  };
}

Sample
generate_sample(int n, int q, SigmaKind kind, CounterRng& rng)
{
  Sample s;
  s.beta0 = true_beta(q);
  Eigen::VectorXd slope = s.beta0.tail(q);
  s.data.y.resize(n);
  s.data.X.resize(n, q);
  Eigen::VectorXd x(q);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < q; ++k)
      x[k] = rng.normal();
    double noise = rng.normal();
    s.data.X.row(i) = x.transpose();
    s.data.y[i] = s.beta0[0] + slope.dot(x) + sigma_value(kind, x, slope) * noise;
  }
  return s;
}

ReplicationResult
run_replication(const SimConfig& config, int replication_index)
{
  CounterRng rng(config.seed, static_cast<std::uint64_t>(replication_index));
  Sample sample = generate_sample(config.n, config.q, config.sigma, rng);

  ReplicationResult result;
  result.index = replication_index;

  auto fail_all = [&](const std::string& reason) {
    for (Method m : config.methods)
      result.outcomes.push_back(
        { m, std::nullopt, std::numeric_limits<double>::quiet_NaN(), "failed:" + reason });
    return result;
  };

  FirstStepFit fs;
  try {
    fs = first_step(sample.data, config.loss);
  } catch (const Error& e) {
    return fail_all(e.kind());
  }

  for (Method m : config.methods) {
    MethodOutcome outcome{ m, std::nullopt, std::numeric_limits<double>::quiet_NaN(), "ok" };
    try {
      Eigen::VectorXd beta;
      if (m == Method::FirstStep) {
        beta = fs.beta0_hat;
      } else {
        WeightSpec spec;
        switch (m) {
          case Method::Parametric:
            spec = weight_spec::Parametric{ inverse_variance_family(config.sigma) };
            break;
          case Method::Nonparametric:
            spec = weight_spec::Nonparametric{ config.bandwidth };
            break;
          case Method::Semiparametric:
            spec = weight_spec::SemiparametricProjected{ config.bandwidth, std::nullopt };
            break;
          case Method::SemiparametricIndex:
            spec = weight_spec::SemiparametricIndex{ config.bandwidth };
            break;
          case Method::Oracle:
            spec = weight_spec::Oracle{ oracle_family(config.sigma, sample.beta0) };
            break;
          case Method::FirstStep:
            break;
        }
        auto weighting = compute_weights(sample.data, config.loss, fs, spec);
        auto fit = fit_with_weights(sample.data, config.loss, weighting.weights.values, fs.beta0_hat);
        if (!fit.converged)
          throw numerical_error("no-convergence", "weighted fit did not converge");
        beta = fit.beta;
      }
      double err = (beta - sample.beta0).squaredNorm();
      if (!std::isfinite(err))
        throw numerical_error("non-finite", "non-finite estimate");
      outcome.sq_error = err;
      outcome.beta = std::move(beta);
    } catch (const Error& e) {
      outcome.status = "failed:" + e.kind();
    }
    result.outcomes.push_back(std::move(outcome));
  }
  return result;
}

std::vector<ReplicationResult>
run_replications(const SimConfig& config)
{
  config.validate();
  std::vector<ReplicationResult> results(static_cast<std::size_t>(config.replications));
  const int workers = std::min(config.workers, config.replications);
  if (workers <= 1) {
    for (int r = 0; r < config.replications; ++r)
      results[static_cast<std::size_t>(r)] = run_replication(config, r);
    return results;
  }

  std::atomic<int> next{ 0 };
  std::exception_ptr failure;
  std::atomic<bool> failed{ false };
  auto work = [&]() {
    for (int r = next++; r < config.replications && !failed; r = next++) {
      try {
        results[static_cast<std::size_t>(r)] = run_replication(config, r);
      } catch (...) {
        if (!failed.exchange(true))
          failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back(work);
  for (auto& t : pool)
    t.join();
  if (failure)
    std::rethrow_exception(failure);
  return results;
}

const MethodSummary&
SimSummary::at(Method m) const
{
  for (const auto& s : methods)
    if (s.method == m)
      return s;
  throw input_error("bad-method", std::string("method not in study: ") + to_string(m));
}

SimSummary
summarize_study(const SimConfig& config, std::vector<ReplicationResult> raw)
{
  SimSummary summary;
  summary.config = config;
  for (std::size_t k = 0; k < config.methods.size(); ++k) {
    MethodSummary ms{ config.methods[k], std::nullopt, 0 };
    std::vector<double> errors;
    for (const auto& rep : raw) {
      const auto& o = rep.outcomes.at(k);
      if (o.ok())
        errors.push_back(o.sq_error);
      else
        ++ms.failures;
    }
    if (!errors.empty())
      ms.stats = summarize(errors);
    summary.methods.push_back(std::move(ms));
  }
  summary.raw = std::move(raw);
  return summary;
}

void
check_study(const SimSummary& summary)
{
  const double total = static_cast<double>(summary.raw.size());
  for (const auto& ms : summary.methods) {
    if (static_cast<double>(ms.failures) > 0.2 * total) {
      throw numerical_error("study-failed",
                            std::string("method ") + to_string(ms.method) + " failed in " +
                              std::to_string(ms.failures) + " of " +
                              std::to_string(summary.raw.size()) + " replications");
    }
  }
}

SimSummary
run_study(const SimConfig& config)
{
  auto summary = summarize_study(config, run_replications(config));
  check_study(summary);
  return summary;
}

} // namespace awr
