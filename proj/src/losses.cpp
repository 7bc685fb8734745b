#include "awr/losses.hpp"

#include "awr/errors.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace awr {

namespace {

// Power losses with p < 2 have rho'' unbounded at the origin; curvature is
// evaluated no closer to zero than this.
constexpr double kPowerCurvatureFloor = 1e-12;

double
parse_positive(std::string_view text, std::string_view what)
{
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw input_error("bad-loss",
                      "cannot parse " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

} // namespace

LossFunction
LossFunction::square()
{
  return LossFunction(LossFamily::Square, 0.0);
}

LossFunction
LossFunction::huber(double cutoff)
{
  if (!(cutoff > 0.0) || !std::isfinite(cutoff))
    throw input_error("bad-loss", "Huber cutoff must be positive and finite");
  return LossFunction(LossFamily::Huber, cutoff);
}

LossFunction
LossFunction::power(double exponent)
{
  if (!(exponent > 1.0) || !std::isfinite(exponent))
    throw input_error("bad-loss", "power-loss exponent must exceed 1");
  return LossFunction(LossFamily::Power, exponent);
}

LossFunction
LossFunction::parse(std::string_view spec)
{
  if (spec == "square")
    return square();
  auto colon = spec.find(':');
  if (colon != std::string_view::npos) {
    auto name = spec.substr(0, colon);
    auto arg = spec.substr(colon + 1);
    if (name == "huber")
      return huber(parse_positive(arg, "Huber cutoff"));
    if (name == "power")
      return power(parse_positive(arg, "power exponent"));
  }
  throw input_error("bad-loss",
                    "unknown loss '" + std::string(spec) +
                      "' (expected square, huber:<c> or power:<p>)");
}

std::string
LossFunction::to_string() const
{
  std::ostringstream os;
  os.precision(17);
  switch (family_) {
    case LossFamily::Square:
      return "square";
    case LossFamily::Huber:
      os << "huber:" << param_;
      break;
    case LossFamily::Power:
      os << "power:" << param_;
      break;
  }
  return os.str();
}

double
LossFunction::rho(double t) const
{
  switch (family_) {
    case LossFamily::Square:
      return t * t;
    case LossFamily::Huber:
      return t <= param_ ? 0.5 * t * t : param_ * (t - 0.5 * param_);
    case LossFamily::Power:
      return std::pow(t, param_);
  }
  return 0.0;
}

double
LossFunction::rho_prime(double t) const
{
  switch (family_) {
    case LossFamily::Square:
      return 2.0 * t;
    case LossFamily::Huber:
      return t <= param_ ? t : param_;
    case LossFamily::Power:
      return param_ * std::pow(t, param_ - 1.0);
  }
  return 0.0;
}

double
LossFunction::rho_second(double t) const
{
  switch (family_) {
    case LossFamily::Square:
      return 2.0;
    case LossFamily::Huber:
      return t <= param_ ? 1.0 : 0.0;
    case LossFamily::Power:
      if (param_ < 2.0)
        t = std::max(t, kPowerCurvatureFloor);
      return param_ * (param_ - 1.0) * std::pow(t, param_ - 2.0);
  }
  return 0.0;
}

double
loss_rho(const LossFunction& loss, double t)
{
  if (!(t >= 0.0))
    throw input_error("domain", "loss argument must be nonnegative");
  return loss.rho(t);
}

double
loss_g1(const LossFunction& loss, double e)
{
  double d = loss.rho_prime(std::abs(e));
  return d * d;
}

double
loss_g2(const LossFunction& loss, double e)
{
  return loss.rho_second(std::abs(e));
}

double
loss_irls_ratio(const LossFunction& loss, double e)
{
  double t = std::abs(e);
  switch (loss.family()) {
    case LossFamily::Square:
      return 2.0;
    case LossFamily::Huber:
      return t <= loss.parameter() ? 1.0 : loss.parameter() / t;
    case LossFamily::Power: {
      double p = loss.parameter();
      if (p < 2.0)
        t = std::max(t, kPowerCurvatureFloor);
      else if (t == 0.0)
        return p == 2.0 ? 2.0 : 0.0;
      return p * std::pow(t, p - 2.0);
    }
  }
  return 0.0;
}

} // namespace awr
