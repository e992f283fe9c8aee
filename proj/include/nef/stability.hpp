#pragma once

// Characteristic functions of mixed-Poisson-stable laws,
//   psi(t) = exp{-phi [b(xi0) - b(xi0 + log Psi(t) / phi)]},
// with Psi an alpha-stable characteristic function.

#include <complex>

#include "nef/family.hpp"

namespace nef {

class StableCfSpec {
 public:
  enum class Kind { SymmetricAlphaStable, NormalDrift };

  /// Psi(t) = exp(-c |t|^alpha), c > 0, alpha in (0, 2].
  static StableCfSpec symmetric(double c, double alpha);
  /// Psi(t) = exp(i mu t - sigma2 t^2 / 2).
  static StableCfSpec normal_drift(double mu, double sigma2);

  Kind kind() const { return kind_; }
  /// log Psi(t), evaluated analytically (no complex log of Psi).
  std::complex<double> log_cf(double t) const;
  std::complex<double> cf(double t) const { return std::exp(log_cf(t)); }

 private:
  StableCfSpec(Kind kind, double p1, double p2) : kind_(kind), p1_(p1), p2_(p2) {}
  Kind kind_;
  double p1_;  // c or mu
  double p2_;  // alpha or sigma2
};

std::complex<double> mp_stable_cf(const MixingFamily& fam, double phi,
                                  const StableCfSpec& psi, double t);

/// Density of the NB-stable law with ch.f. (1 + (c/phi) t^2)^{-phi}:
///   (phi/c)^{phi/2+1/4} 2^{1/2-phi} K_{phi-1/2}(|y| sqrt(phi/c)) |y|^{phi-1/2}
///   / (sqrt(pi) Gamma(phi)).
double nb_stable_symmetric_pdf(double c, double phi, double y);

}  // namespace nef
