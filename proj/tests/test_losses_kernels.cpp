#include "oracles.hpp"

#include "awr/errors.hpp"
#include "awr/kernel.hpp"
#include "awr/losses.hpp"

#include <doctest.h>

#include <random>

using namespace awr;

TEST_CASE("loss_rho matches the family formulas")
{
  CHECK(loss_rho(LossFunction::square(), 3.0) == 9.0);
  CHECK(loss_rho(LossFunction::huber(1.0), 0.5) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(loss_rho(LossFunction::huber(1.0), 2.0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(loss_rho(LossFunction::power(3.0), 2.0) == doctest::Approx(8.0));
  CHECK_THROWS_AS(loss_rho(LossFunction::square(), -1.0), Error);
}

TEST_CASE("g1 and g2 transforms")
{
  CHECK(loss_g1(LossFunction::square(), 1.5) == doctest::Approx(9.0));
  CHECK(loss_g1(LossFunction::huber(1.0), 0.5) == doctest::Approx(0.25));
  CHECK(loss_g1(LossFunction::huber(1.0), -3.0) == doctest::Approx(1.0));

  CHECK(loss_g2(LossFunction::square(), 7.0) == 2.0);
  CHECK(loss_g2(LossFunction::huber(1.0), 0.5) == 1.0);
  CHECK(loss_g2(LossFunction::huber(1.0), 2.0) == 0.0);
  // boundary assigned to the quadratic piece
  CHECK(loss_g2(LossFunction::huber(1.0), 1.0) == 1.0);
  CHECK(loss_g2(LossFunction::huber(1.0), -1.0) == 1.0);
}

TEST_CASE("loss parsing and admissibility")
{
  CHECK(LossFunction::parse("square").family() == LossFamily::Square);
  CHECK(LossFunction::parse("huber:1.345").parameter() == doctest::Approx(1.345));
  CHECK(LossFunction::parse("power:3").family() == LossFamily::Power);
  CHECK_THROWS_AS(LossFunction::parse("huber:-1"), Error);
  CHECK_THROWS_AS(LossFunction::parse("power:1"), Error);
  CHECK_THROWS_AS(LossFunction::parse("absolute"), Error);
  CHECK_THROWS_AS(LossFunction::parse("huber:abc"), Error);
  CHECK(LossFunction::parse(LossFunction::huber(2.5).to_string()).parameter() == 2.5);
}

TEST_CASE("every family has rho(0) = rho'(0) = 0 and is convex on a grid")
{
  for (auto loss : { LossFunction::square(), LossFunction::huber(0.7), LossFunction::power(1.5),
                     LossFunction::power(3.0) }) {
    CHECK(loss.rho(0.0) == 0.0);
    CHECK(loss.rho_prime(0.0) == 0.0);
    for (double t = 0.05; t < 5.0; t += 0.05) {
      double mid = loss.rho(t);
      double avg = 0.5 * (loss.rho(t - 0.05) + loss.rho(t + 0.05));
      CHECK(avg >= mid - 1e-12);
    }
  }
}

TEST_CASE("residual transforms are even in the residual")
{
  std::mt19937_64 gen(11);
  std::normal_distribution<double> z(0.0, 3.0);
  for (auto loss : { LossFunction::square(), LossFunction::huber(1.2), LossFunction::power(2.5) }) {
    for (int k = 0; k < 200; ++k) {
      double e = z(gen);
      CHECK(loss_g1(loss, e) == loss_g1(loss, -e));
      CHECK(loss_g2(loss, e) == loss_g2(loss, -e));
    }
  }
}

TEST_CASE("Huber g1 is bounded and continuous; large cutoff recovers e^2")
{
  auto huber = LossFunction::huber(1.5);
  double prev = loss_g1(huber, -10.0);
  for (double e = -10.0; e <= 10.0; e += 1e-3) {
    double v = loss_g1(huber, e);
    CHECK(v <= 1.5 * 1.5);
    CHECK(std::abs(v - prev) < 0.01);
    prev = v;
  }
  CHECK(loss_g1(LossFunction::square(), 1e4) == doctest::Approx(4e8));
  for (double e : { -3.0, -0.2, 0.0, 0.9, 7.0 })
    CHECK(loss_g1(LossFunction::huber(10.0), e) == e * e);
}

TEST_CASE("kernel normalizing constant")
{
  CHECK(kernel_norm_const(1) == 0.75);
  CHECK(kernel_norm_const(2) == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-14));
  CHECK_THROWS_AS(kernel_norm_const(0), Error);
  for (int q = 1; q <= 30; ++q)
    CHECK(unit_ball_volume(q) == doctest::Approx(oracle::ball_volume_recursive(q)).epsilon(1e-12));

  double c1 = kernel_norm_const(1);
  double integral = oracle::simpson([&](double u) { return c1 * (1.0 - u * u); }, -1.0, 1.0, 1000);
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("kernel integrates to one in dimensions 1 to 25")
{
  // Radial integral with the ball volume from its recursion: the surface
  // area of the unit sphere is q V_q.
  for (int q = 1; q <= 25; ++q) {
    KernelSpec k(q);
    double radial = oracle::simpson(
      [&](double r) { return k.from_squared_norm(r * r) * std::pow(r, q - 1); }, 0.0, 1.0, 2000);
    double integral = q * oracle::ball_volume_recursive(q) * radial;
    CHECK_MESSAGE(std::abs(integral - 1.0) < 1e-3, "q = " << q);
  }

  // Cartesian midpoint rule in two dimensions.
  KernelSpec k2(2);
  const int m = 800;
  double cell = 2.0 / m;
  double total = 0.0;
  Eigen::VectorXd u(2);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      u << -1.0 + (a + 0.5) * cell, -1.0 + (b + 0.5) * cell;
      total += k2(u) * cell * cell;
    }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("kernel evaluation")
{
  KernelSpec k1(1);
  CHECK(kernel_eval(k1, Eigen::VectorXd::Zero(1)) == 0.75);
  CHECK(kernel_eval(k1, Eigen::VectorXd::Ones(1)) == 0.0);
  KernelSpec k2(2);
  Eigen::VectorXd u(2);
  u << 0.6, 0.8;
  CHECK(kernel_eval(k2, u) == doctest::Approx(0.0).epsilon(1e-15));
  u << 2.0, 0.0;
  CHECK(kernel_eval(k2, u) == 0.0);
  CHECK_THROWS_AS(kernel_eval(k2, Eigen::VectorXd::Zero(3)), Error);
}

TEST_CASE("kernel is symmetric")
{
  std::mt19937_64 gen(5);
  std::normal_distribution<double> z(0.0, 0.6);
  for (int q = 1; q <= 6; ++q) {
    KernelSpec k(q);
    for (int rep = 0; rep < 1000; ++rep) {
      Eigen::VectorXd u(q);
      for (int c = 0; c < q; ++c)
        u[c] = z(gen);
      CHECK(k(u) == k(-u));
    }
  }
}
