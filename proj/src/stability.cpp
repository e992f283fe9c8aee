#include "nef/stability.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "nef/errors.hpp"
#include "nef/special.hpp"

namespace nef {

StableCfSpec StableCfSpec::symmetric(double c, double alpha) {
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("stable: c must be positive");
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("stable: alpha must be in (0, 2]");
  return StableCfSpec(Kind::SymmetricAlphaStable, c, alpha);
}

StableCfSpec StableCfSpec::normal_drift(double mu, double sigma2) {
  if (!std::isfinite(mu) || !(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw DomainError("normal drift: need finite mu and positive sigma2");
  }
  return StableCfSpec(Kind::NormalDrift, mu, sigma2);
}

std::complex<double> StableCfSpec::log_cf(double t) const {
  if (kind_ == Kind::SymmetricAlphaStable) {
    return {-p1_ * std::pow(std::abs(t), p2_), 0.0};
  }
  return {-0.5 * p2_ * t * t, p1_ * t};
}

std::complex<double> mp_stable_cf(const MixingFamily& fam, double phi,
                                  const StableCfSpec& psi, double t) {
  fam.require_density("mp_stable_cf");
  if (!(phi > 0.0)) throw DomainError("mp_stable_cf: phi must be positive");
  const double xi0 = fam.xi0();
  const std::complex<double> theta = xi0 + psi.log_cf(t) / phi;
  return std::exp(-phi * (fam.b(std::complex<double>(xi0)) - fam.b(theta)));
}

double nb_stable_symmetric_pdf(double c, double phi, double y) {
  if (!(c > 0.0) || !(phi > 0.0)) {
    throw DomainError("nb_stable_symmetric_pdf: c and phi must be positive");
  }
  const double ay = std::abs(y);
  const double s = std::sqrt(phi / c);
  if (ay == 0.0) {
    // K_nu(z) z^nu -> Gamma(nu) 2^{nu-1} as z -> 0 for nu > 0.
    if (phi <= 0.5) return std::numeric_limits<double>::infinity();
    return s * std::exp(std::lgamma(phi - 0.5) - std::lgamma(phi)) /
           (2.0 * std::sqrt(std::numbers::pi));
  }
  const double log_f = (0.5 * phi + 0.25) * std::log(phi / c) +
                       (0.5 - phi) * std::numbers::ln2 +
                       log_bessel_k(phi - 0.5, ay * s) +
                       (phi - 0.5) * std::log(ay) -
                       0.5 * std::log(std::numbers::pi) - std::lgamma(phi);
  return std::exp(log_f);
}

}  // namespace nef
