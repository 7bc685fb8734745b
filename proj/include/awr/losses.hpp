#pragma once

#include <string>
#include <string_view>

namespace awr {

enum class LossFamily { Square, Huber, Power };

/// Convex loss rho on the absolute residual, with rho(0) = rho'(0) = 0.
///
/// Square: rho(t) = t^2.
/// Huber(c): rho(t) = t^2/2 for t <= c, c (t - c/2) beyond.
/// Power(p): rho(t) = t^p with p > 1.
class LossFunction
{
public:
  static LossFunction square();
  static LossFunction huber(double cutoff);
  static LossFunction power(double exponent);

  /// Parses "square", "huber:<c>" or "power:<p>".
  static LossFunction parse(std::string_view spec);

  LossFamily family() const { return family_; }
  /// Huber cutoff or power exponent; unused for the square loss.
  double parameter() const { return param_; }
  std::string to_string() const;

  double rho(double t) const;
  double rho_prime(double t) const;
  double rho_second(double t) const;

private:
  LossFunction(LossFamily family, double param)
    : family_(family)
    , param_(param)
  {}

  LossFamily family_;
  double param_;
};

double loss_rho(const LossFunction& loss, double t);

/// rho'(|e|)^2
double loss_g1(const LossFunction& loss, double e);

/// rho''(|e|). Huber assigns 1 at |e| = c.
double loss_g2(const LossFunction& loss, double e);

/// rho'(|e|) / |e|, continued by rho''(0) at e = 0. Used by IRLS.
double loss_irls_ratio(const LossFunction& loss, double e);

} // namespace awr
