#include "oracles.hpp"

#include "awr/errors.hpp"
#include "awr/estimator.hpp"

#include <doctest.h>

#include <random>

using namespace awr;

namespace {

Dataset
make(std::initializer_list<double> y, std::initializer_list<double> x)
{
  Dataset d;
  d.y = Eigen::Map<const Eigen::VectorXd>(y.begin(), static_cast<Eigen::Index>(y.size()));
  d.X = Eigen::Map<const Eigen::MatrixXd>(x.begin(), static_cast<Eigen::Index>(x.size()), 1);
  return d;
}

Eigen::VectorXd
vec(std::initializer_list<double> v)
{
  return Eigen::Map<const Eigen::VectorXd>(v.begin(), static_cast<Eigen::Index>(v.size()));
}

} // namespace

TEST_CASE("fit_wls hand-derived examples")
{
  // Two points are interpolated exactly. n = q + 1 is below the fit minimum,
  // so a third collinear point keeps the example honest.
  auto line = make({ 0.0, 1.0, 2.0 }, { 0.0, 1.0, 2.0 });
  auto fit = fit_wls(line, vec({ 5.0, 0.1, 1.0 }));
  CHECK(fit.beta[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fit.beta[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.iterations == 0);

  auto d = make({ 0.0, 1.0, 0.0 }, { 0.0, 1.0, 2.0 });
  auto a = fit_wls(d, vec({ 1.0, 1.0, 1.0 }));
  CHECK(std::abs(a.beta[0] - 1.0 / 3.0) < 1e-10);
  CHECK(std::abs(a.beta[1]) < 1e-10);
  auto b = fit_wls(d, vec({ 1.0, 2.0, 1.0 }));
  CHECK(std::abs(b.beta[0] - 0.5) < 1e-10);
  CHECK(std::abs(b.beta[1]) < 1e-10);
}

TEST_CASE("fit_wls rejects degenerate designs and bad weights")
{
  auto d = make({ 0.0, 1.0, 0.0, 2.0 }, { 0.0, 1.0, 2.0, 3.0 });
  try {
    fit_wls(d, vec({ 1.0, 0.0, 0.0, 0.0 }));
    FAIL("expected a degenerate-design error");
  } catch (const Error& e) {
    CHECK(e.kind() == "degenerate-design");
    CHECK(e.category() == ErrorCategory::Numerical);
    CHECK(std::string(e.what()).find("condition") != std::string::npos);
  }
  CHECK_THROWS_AS(fit_wls(d, vec({ 1.0, 1.0, 1.0 })), Error);
  CHECK_THROWS_AS(fit_wls(d, vec({ 1.0, -1.0, 1.0, 1.0 })), Error);
  CHECK_THROWS_AS(fit_wls(d, vec({ 0.0, 0.0, 0.0, 0.0 })), Error);

  auto tiny = make({ 0.0, 1.0 }, { 0.0, 1.0 });
  CHECK_THROWS_AS(fit_wls(tiny, vec({ 1.0, 1.0 })), Error);
}

TEST_CASE("fit_wls agrees with the plain-loop normal equations")
{
  std::mt19937_64 gen(3);
  for (int rep = 0; rep < 20; ++rep) {
    auto d = oracle::random_dataset(gen, 30, 3);
    auto w = oracle::random_weights(gen, 30);
    auto ref = oracle::wls(d, w);
    auto fit = fit_wls(d, oracle::to_eigen(w));
    for (std::size_t k = 0; k < ref.size(); ++k)
      CHECK(std::abs(fit.beta[static_cast<Eigen::Index>(k)] - ref[k]) < 1e-10);
  }
}

TEST_CASE("fit_wls weight-scale invariance and affine equivariance")
{
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int rep = 0; rep < 100; ++rep) {
    auto d = oracle::random_dataset(gen, 40, 3);
    Eigen::VectorXd w = oracle::to_eigen(oracle::random_weights(gen, 40));
    auto base = fit_wls(d, w);
    double c = std::exp(u(gen));
    auto scaled = fit_wls(d, c * w);
    CHECK((scaled.beta - base.beta).lpNorm<Eigen::Infinity>() < 1e-10);

    double a = u(gen);
    Eigen::VectorXd b(3);
    b << u(gen), u(gen), u(gen);
    Dataset shifted = d;
    shifted.y = d.y + Eigen::VectorXd::Constant(d.n(), a) + d.X * b;
    auto moved = fit_wls(shifted, w);
    CHECK(std::abs(moved.beta[0] - (base.beta[0] + a)) < 1e-9);
    CHECK((moved.beta.tail(3) - (base.beta.tail(3) + b)).lpNorm<Eigen::Infinity>() < 1e-9);
  }
}

TEST_CASE("fit_weighted_m with the square loss reproduces fit_wls")
{
  std::mt19937_64 gen(23);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    auto d = oracle::random_dataset(gen, 50, 3);
    auto w = oracle::to_eigen(oracle::random_weights(gen, 50));
    auto m = fit_weighted_m(d, LossFunction::square(), w);
    CHECK(m.converged);
    worst = std::max(worst, (m.beta - fit_wls(d, w).beta).lpNorm<Eigen::Infinity>());
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("Huber fits")
{
  auto line = make({ 0.0, 1.0, 2.0 }, { 0.0, 1.0, 2.0 });
  auto exact = fit_weighted_m(line, LossFunction::huber(10.0), vec({ 1.0, 1.0, 1.0 }));
  CHECK(exact.converged);
  CHECK(exact.beta[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(exact.beta[1] == doctest::Approx(1.0).epsilon(1e-12));

  std::mt19937_64 gen(29);
  for (int rep = 0; rep < 20; ++rep) {
    auto d = oracle::random_dataset(gen, 60, 2);
    auto w = oracle::to_eigen(oracle::random_weights(gen, 60));
    // Every residual of the square-loss fit lies inside the quadratic region.
    auto ls = fit_wls(d, w);
    double cutoff = 1.01 * residuals(d, ls.beta).cwiseAbs().maxCoeff();
    auto hub = fit_weighted_m(d, LossFunction::huber(cutoff), w);
    CHECK(hub.converged);
    CHECK((hub.beta - ls.beta).lpNorm<Eigen::Infinity>() < 1e-8);

    auto big = fit_weighted_m(d, LossFunction::huber(1e6), w);
    CHECK((big.beta - ls.beta).lpNorm<Eigen::Infinity>() < 1e-6);
  }
}

TEST_CASE("estimating-equation certificate holds for every converged fit")
{
  std::mt19937_64 gen(31);
  for (int rep = 0; rep < 30; ++rep) {
    auto d = oracle::random_dataset(gen, 80, 2);
    auto w = oracle::random_weights(gen, 80);
    for (double c : { 0.3, 1.0, 2.0 }) {
      auto fit = fit_weighted_m(d, LossFunction::huber(c), oracle::to_eigen(w));
      REQUIRE(fit.converged);
      double cert = oracle::certificate(d, w, fit.beta, [c](double t) { return std::min(t, c); });
      CHECK(cert <= 1e-10);
      CHECK(fit.gradient_norm <= 1e-10);
    }
    for (double p : { 1.5, 3.0 }) {
      auto fit = fit_weighted_m(d, LossFunction::power(p), oracle::to_eigen(w));
      REQUIRE(fit.converged);
      double cert = oracle::certificate(d, w, fit.beta, [p](double t) { return p * std::pow(t, p - 1.0); });
      CHECK(cert <= 1e-10);
    }
  }
}

TEST_CASE("weighted M-fit is scale invariant in the weights")
{
  std::mt19937_64 gen(37);
  auto d = oracle::random_dataset(gen, 70, 3);
  auto w = oracle::to_eigen(oracle::random_weights(gen, 70));
  auto a = fit_weighted_m(d, LossFunction::huber(0.8), w);
  auto b = fit_weighted_m(d, LossFunction::huber(0.8), 25.0 * w);
  CHECK((a.beta - b.beta).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("non-convergence is reported, never silent")
{
  std::mt19937_64 gen(41);
  auto d = oracle::random_dataset(gen, 60, 2);
  SolverOptions opts;
  opts.max_iter = 1;
  opts.init = Eigen::VectorXd::Constant(3, 50.0);
  auto fit = fit_weighted_m(d, LossFunction::huber(0.1), Eigen::VectorXd::Ones(60), opts);
  CHECK_FALSE(fit.converged);
  CHECK(fit.gradient_norm > opts.tol);
}

TEST_CASE("Huber with every residual beyond the cutoff falls back to IRLS")
{
  // Start far away so no point is in the quadratic region at the first
  // iterate; the Newton system is singular there.
  std::mt19937_64 gen(43);
  auto d = oracle::random_dataset(gen, 50, 1);
  SolverOptions opts;
  opts.init = Eigen::VectorXd::Constant(2, 100.0);
  auto fit = fit_weighted_m(d, LossFunction::huber(0.5), Eigen::VectorXd::Ones(50), opts);
  CHECK(fit.converged);
  auto ref = fit_weighted_m(d, LossFunction::huber(0.5), Eigen::VectorXd::Ones(50));
  CHECK((fit.beta - ref.beta).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("sandwich covariance")
{
  auto exact = make({ 1.0, 3.0, 5.0, 7.0 }, { 0.0, 1.0, 2.0, 3.0 });
  auto zero = sandwich_covariance(exact, LossFunction::square(), Eigen::VectorXd::Ones(4), vec({ 1.0, 2.0 }));
  CHECK(zero.cwiseAbs().maxCoeff() == 0.0);

  // Square loss with unit weights is the heteroscedasticity-robust HC0 form.
  Dataset d;
  d.y = vec({ 0.3, 1.9, 1.2, 4.4, 3.1 });
  d.X.resize(5, 2);
  d.X << 0.0, 1.0, 1.0, -1.0, 2.0, 0.5, 3.0, 2.0, 4.0, -0.5;
  auto fit = fit_wls(d, Eigen::VectorXd::Ones(5));
  auto cov = sandwich_covariance(d, LossFunction::square(), Eigen::VectorXd::Ones(5), fit.beta);
  auto ref = oracle::hc0(d, oracle::to_std(fit.beta));
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      CHECK(cov(a, b) == doctest::Approx(ref[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]).epsilon(1e-10));

  std::mt19937_64 gen(47);
  for (int rep = 0; rep < 20; ++rep) {
    auto r = oracle::random_dataset(gen, 40, 3);
    auto w = oracle::to_eigen(oracle::random_weights(gen, 40));
    auto loss = rep % 2 ? LossFunction::huber(1.0) : LossFunction::square();
    auto f = fit_weighted_m(r, loss, w);
    auto c1 = sandwich_covariance(r, loss, w, f.beta);
    auto c10 = sandwich_covariance(r, loss, 10.0 * w, f.beta);
    CHECK((c1 - c10).cwiseAbs().maxCoeff() <= 1e-12 * c1.cwiseAbs().maxCoeff());
    CHECK((c1 - c1.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c1);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
  }
}

TEST_CASE("sandwich covariance rejects a flat curvature matrix")
{
  auto d = make({ 10.0, -10.0, 10.0, -10.0 }, { 0.0, 1.0, 2.0, 3.0 });
  try {
    sandwich_covariance(d, LossFunction::huber(0.5), Eigen::VectorXd::Ones(4), vec({ 0.0, 0.0 }));
    FAIL("expected degenerate curvature");
  } catch (const Error& e) {
    CHECK(e.kind() == "degenerate-curvature");
  }
}
