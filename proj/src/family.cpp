#include "nef/family.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <boost/math/tools/roots.hpp>

#include "nef/errors.hpp"

namespace nef {

MixingFamily MixingFamily::from_name(std::string_view name) {
  if (name == "gamma" || name == "ng") return gamma();
  if (name == "ig" || name == "nig" || name == "inverse-gaussian") {
    return inverse_gaussian();
  }
  if (name == "ghs") return ghs();
  throw UnsupportedFamily("unknown family '" + std::string(name) + "'");
}

std::string_view MixingFamily::name() const {
  switch (tag_) {
    case FamilyTag::Gamma:
      return "gamma";
    case FamilyTag::InverseGaussian:
      return "ig";
    case FamilyTag::Ghs:
      return "ghs";
  }
  return "?";
}

void MixingFamily::require_density(std::string_view op) const {
  if (tag_ == FamilyTag::Ghs) {
    throw UnsupportedFamily(std::string(op) +
                            ": GHS latent supports cumulants only");
  }
}

double MixingFamily::xi0() const {
  switch (tag_) {
    case FamilyTag::Gamma:
      return -1.0;
    case FamilyTag::InverseGaussian:
      return -0.5;
    case FamilyTag::Ghs:
      return -0.75 * std::numbers::pi;
  }
  return 0.0;
}

double MixingFamily::b(double theta) const {
  switch (tag_) {
    case FamilyTag::Gamma:
      return -std::log(-theta);
    case FamilyTag::InverseGaussian:
      return -std::sqrt(-2.0 * theta);
    case FamilyTag::Ghs: {
      const double t = std::tan(theta);
      return 0.5 * std::log1p(t * t);
    }
  }
  return 0.0;
}

std::complex<double> MixingFamily::b(std::complex<double> theta) const {
  switch (tag_) {
    case FamilyTag::Gamma:
      return -std::log(-theta);
    case FamilyTag::InverseGaussian:
      return -std::sqrt(-2.0 * theta);
    case FamilyTag::Ghs:
      // -log|cos| continued analytically from xi0, where cos < 0.
      return -std::log(-std::cos(theta));
  }
  return {};
}

double MixingFamily::b2() const {
  switch (tag_) {
    case FamilyTag::Gamma:
      return 1.0;
    case FamilyTag::InverseGaussian:
      return 1.0;
    case FamilyTag::Ghs:
      return 2.0;
  }
  return 0.0;
}

double MixingFamily::b3() const {
  switch (tag_) {
    case FamilyTag::Gamma:
      return 2.0;
    case FamilyTag::InverseGaussian:
      return 3.0;
    case FamilyTag::Ghs:
      return 4.0;
  }
  return 0.0;
}

double MixingFamily::b4() const {
  switch (tag_) {
    case FamilyTag::Gamma:
      return 6.0;
    case FamilyTag::InverseGaussian:
      return 15.0;
    case FamilyTag::Ghs:
      return 16.0;
  }
  return 0.0;
}

double MixingFamily::d(double phi) const {
  require_density("d(phi)");
  if (tag_ == FamilyTag::Gamma) return phi * std::log(phi) - std::lgamma(phi);
  return 0.5 * std::log(phi);
}

double MixingFamily::d1(double phi) const {
  require_density("d'(phi)");
  if (tag_ == FamilyTag::Gamma) {
    return std::log(phi) + 1.0 - boost::math::digamma(phi);
  }
  return 0.5 / phi;
}

double MixingFamily::d2(double phi) const {
  require_density("d''(phi)");
  if (tag_ == FamilyTag::Gamma) return 1.0 / phi - boost::math::trigamma(phi);
  return -0.5 / (phi * phi);
}

double MixingFamily::g(double w) const {
  require_density("g(w)");
  if (tag_ == FamilyTag::Gamma) return std::log(w);
  return -0.5 / w;
}

double MixingFamily::h(double w) const {
  require_density("h(w)");
  if (tag_ == FamilyTag::Gamma) return -std::log(w);
  return -0.5 * std::log(2.0 * std::numbers::pi) - 1.5 * std::log(w);
}

double MixingFamily::d1_inverse(double x) const {
  require_density("v = (d')^-1");
  if (tag_ == FamilyTag::InverseGaussian) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw MStepDomainError("phi update: argument must be positive, got " +
                             std::to_string(x));
    }
    return 0.5 / x;
  }
  // d'(phi) = log(phi) + 1 - digamma(phi) decreases from +inf to 1.
  if (!(x > 1.0) || !std::isfinite(x)) {
    throw MStepDomainError("phi update: argument must exceed 1, got " +
                           std::to_string(x));
  }
  // Solve in t = log(phi) on the bracket phi in [1e-8, 1e8].
  auto f = [x](double t) {
    const double phi = std::exp(t);
    const double value = t + 1.0 - boost::math::digamma(phi) - x;
    const double slope = 1.0 - phi * boost::math::trigamma(phi);
    return std::make_pair(value, slope);
  };
  const double lo = std::log(1e-8);
  const double hi = std::log(1e8);
  if (f(hi).first > 0.0) return 1e8;
  if (f(lo).first < 0.0) return 1e-8;
  // Start from the asymptotic inverse d' - 1 ~ 1/(2 phi).
  double guess = std::log(0.5 / (x - 1.0));
  guess = std::clamp(guess, lo, hi);
  std::uintmax_t iters = 100;
  const double t =
      boost::math::tools::newton_raphson_iterate(f, guess, lo, hi, 50, iters);
  return std::exp(t);
}

}  // namespace nef
