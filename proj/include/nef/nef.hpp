#pragma once

// Normal-exponential-family (NEF) laws: Y = mu W + sigma sqrt(W) Z with a
// unit-mean exponential-family latent W and Z ~ N(0, 1).

#include <complex>
#include <cstddef>
#include <vector>

#include "nef/family.hpp"
#include "nef/rng.hpp"
#include "nef/special.hpp"

namespace nef {

struct NefParams {
  double mu = 0.0;
  double sigma2 = 1.0;
  double phi = 1.0;

  /// Throws DomainError unless sigma2 > 0, phi > 0 and all finite.
  void validate() const;
  friend bool operator==(const NefParams&, const NefParams&) = default;
};

struct Cumulants {
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
  double k4 = 0.0;
};

struct ShapeCoefficients {
  double skewness = 0.0;         // k3 / k2^{3/2}
  double excess_kurtosis = 0.0;  // k4 / k2^2 - 3
  double kurtosis_ratio = 0.0;   // k4 / k2^2
};

// ---- latent W ----

double mixing_log_pdf(const MixingFamily& fam, double phi, double w);
double mixing_pdf(const MixingFamily& fam, double phi, double w);

/// E[exp(z W)] = exp{-phi [b(xi0) - b(xi0 + z / phi)]} for complex z with
/// Re(z) small enough that the expectation exists.
std::complex<double> mixing_mgf(const MixingFamily& fam, double phi,
                                std::complex<double> z);

/// Characteristic function of W: mixing_mgf at z = i t.
std::complex<double> mixing_cf(const MixingFamily& fam, double phi, double t);

double sample_latent(const MixingFamily& fam, double phi, Rng& rng);

// ---- observable Y ----

/// exp{-phi [b(xi0) - b(xi0 + (i t mu - t^2 sigma2 / 2) / phi)]}.
std::complex<double> nef_cf(const NefParams& p, const MixingFamily& fam,
                            double t);

/// Closed-form density (normal-gamma / NIG), with the mixture integral used
/// near y = 0 for the gamma latent.
double nef_pdf(const NefParams& p, const MixingFamily& fam, double y);
double nef_log_pdf(const NefParams& p, const MixingFamily& fam, double y);

/// log of the mixture integral  int N(y; mu w, sigma2 w) f_W(w) dw  by
/// adaptive quadrature. Works for any family with a latent density.
double nef_log_pdf_mixture(const NefParams& p, const MixingFamily& fam,
                           double y);

/// Posterior of W given Y = y is GIG(a, b, p) with
///   a = mu^2/sigma2 - 2 phi xi0,  b = y^2/sigma2 (+ phi for IG),
///   p = phi - 1/2 (gamma) or -1 (IG).
GigParams posterior_gig(const NefParams& p, const MixingFamily& fam, double y);

Cumulants nef_cumulants(const NefParams& p, const MixingFamily& fam);
ShapeCoefficients nef_skew_kurt(const NefParams& p, const MixingFamily& fam);

std::vector<double> sample_nef(const NefParams& p, const MixingFamily& fam,
                               std::size_t n, Rng& rng);

/// Asymmetric Laplace density (the phi = 1 gamma case), skewness parameter
/// kappa = (sqrt(2 sigma2 + mu^2) - mu) / (sqrt(2) sigma).
double asymmetric_laplace_pdf(double mu, double sigma2, double y);

}  // namespace nef
