#pragma once

#include "awr/estimator.hpp"
#include "awr/losses.hpp"
#include "awr/pipeline.hpp"
#include "awr/rng.hpp"
#include "awr/stats.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace awr {

/// Conditional noise scale of the simulated model.
enum class SigmaKind {
  Smooth,        ///< slope' x / |slope|
  Discontinuous, ///< 1/2 + 2 * 1{slope' x > 0}
  Homoscedastic, ///< 1, diagnostic mode
};

enum class Method { FirstStep, Parametric, Nonparametric, Semiparametric, SemiparametricIndex, Oracle };

const char* to_string(SigmaKind kind);
const char* to_string(Method method);
SigmaKind parse_sigma_kind(std::string_view text);
Method parse_method(std::string_view text);

inline constexpr std::uint64_t kDefaultSeed = 7;

struct SimConfig
{
  int n = 500;
  int q = 4;
  SigmaKind sigma = SigmaKind::Smooth;
  std::vector<Method> methods{ Method::FirstStep, Method::Parametric, Method::Nonparametric,
                               Method::Semiparametric, Method::Oracle };
  int replications = 200;
  std::uint64_t seed = kDefaultSeed;
  BandwidthChoice bandwidth = BandwidthChoice::cv();
  LossFunction loss = LossFunction::square();
  int workers = 1;

  /// Throws an input error for n < q + 2, q < 1, replications < 1, no methods.
  void validate() const;
};

/// True coefficients (1, ..., 1) / sqrt(q + 1), intercept first.
Eigen::VectorXd true_beta(int q);

/// sigma(x) for the given slope direction.
double sigma_value(SigmaKind kind, const Eigen::VectorXd& x, const Eigen::VectorXd& slope);

/// 1 / sigma(x; beta)^2 with beta's slope part, for parametric plug-in.
ParametricFamily inverse_variance_family(SigmaKind kind);

/// 1 / sigma(x)^2 at the true slope.
OracleFamily oracle_family(SigmaKind kind, const Eigen::VectorXd& beta0);

struct Sample
{
  Dataset data;
  Eigen::VectorXd beta0;
};

/// n rows of Y = b1 + b2'X + sigma(X) e with (X, e) standard normal.
Sample generate_sample(int n, int q, SigmaKind kind, CounterRng& rng);

struct MethodOutcome
{
  Method method;
  std::optional<Eigen::VectorXd> beta;
  double sq_error = 0.0; ///< NaN on failure
  std::string status;    ///< "ok" or "failed:<kind>"
  bool ok() const { return status == "ok"; }
};

struct ReplicationResult
{
  int index = 0;
  std::vector<MethodOutcome> outcomes; ///< in config.methods order
};

/// One sample shared by every method; replication r draws from stream r.
ReplicationResult run_replication(const SimConfig& config, int replication_index);

std::vector<ReplicationResult> run_replications(const SimConfig& config);

struct MethodSummary
{
  Method method;
  std::optional<FiveNumber> stats;
  int failures = 0;
};

struct SimSummary
{
  SimConfig config;
  std::vector<MethodSummary> methods;
  std::vector<ReplicationResult> raw;

  const MethodSummary& at(Method m) const;
};

SimSummary summarize_study(const SimConfig& config, std::vector<ReplicationResult> raw);

/// Throws a numerical error when any method fails in more than 20% of
/// replications.
void check_study(const SimSummary& summary);

SimSummary run_study(const SimConfig& config);

} // namespace awr
