#include "nef/nef.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "nef/errors.hpp"
#include "nef/quadrature.hpp"

namespace nef {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_normal_pdf(double y, double mean, double var) {
  const double r = y - mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * var) - 0.5 * r * r / var;
}

}  // namespace

void NefParams::validate() const {
  if (!std::isfinite(mu) || !std::isfinite(sigma2) || !std::isfinite(phi)) {
    throw DomainError("NEF parameters must be finite");
  }
  if (!(sigma2 > 0.0)) throw DomainError("NEF: sigma2 must be positive");
  if (!(phi > 0.0)) throw DomainError("NEF: phi must be positive");
}

double mixing_log_pdf(const MixingFamily& fam, double phi, double w) {
  fam.require_density("mixing_pdf");
  if (!(phi > 0.0)) throw DomainError("mixing_pdf: phi must be positive");
  if (!(w > 0.0)) throw DomainError("mixing_pdf: w must be positive");
  const double xi0 = fam.xi0();
  return phi * (w * xi0 - fam.b(xi0)) + fam.d(phi) + phi * fam.g(w) + fam.h(w);
}

double mixing_pdf(const MixingFamily& fam, double phi, double w) {
  return std::exp(mixing_log_pdf(fam, phi, w));
}

std::complex<double> mixing_mgf(const MixingFamily& fam, double phi,
                                std::complex<double> z) {
  const double xi0 = fam.xi0();
  const std::complex<double> theta = xi0 + z / phi;
  return std::exp(-phi * (fam.b(std::complex<double>(xi0)) - fam.b(theta)));
}

std::complex<double> mixing_cf(const MixingFamily& fam, double phi, double t) {
  return mixing_mgf(fam, phi, std::complex<double>(0.0, t));
}

double sample_latent(const MixingFamily& fam, double phi, Rng& rng) {
  fam.require_density("sample_latent");
  if (fam.tag() == FamilyTag::Gamma) {
    return std::gamma_distribution<double>(phi, 1.0 / phi)(rng);
  }
  // Inverse Gaussian with mean 1 and shape phi (Michael, Schucany & Haas).
  const double v = std::normal_distribution<double>()(rng);
  const double y = v * v;
  const double x =
      1.0 + y / (2.0 * phi) - std::sqrt(4.0 * phi * y + y * y) / (2.0 * phi);
  const double u = std::uniform_real_distribution<double>()(rng);
  return u <= 1.0 / (1.0 + x) ? x : 1.0 / x;
}

std::complex<double> nef_cf(const NefParams& p, const MixingFamily& fam,
                            double t) {
  fam.require_density("nef_cf");
  const std::complex<double> z(-0.5 * t * t * p.sigma2, t * p.mu);
  return mixing_mgf(fam, p.phi, z);
}

GigParams posterior_gig(const NefParams& p, const MixingFamily& fam, double y) {
  fam.require_density("posterior_gig");
  GigParams g;
  g.a = p.mu * p.mu / p.sigma2 - 2.0 * p.phi * fam.xi0();
  g.b = y * y / p.sigma2;
  if (fam.tag() == FamilyTag::Gamma) {
    g.p = p.phi - 0.5;
  } else {
    g.b += p.phi;
    g.p = -1.0;
  }
  return g;
}

double nef_log_pdf_mixture(const NefParams& p, const MixingFamily& fam,
                           double y) {
  p.validate();
  fam.require_density("nef_pdf");
  const GigParams post = posterior_gig(p, fam, y);
  if (post.b == 0.0 && post.p <= 0.0) return kInf;  // gamma, y = 0, phi <= 1/2

  auto logf = [&](double s) {
    const double w = std::exp(s);
    if (w == 0.0 || !std::isfinite(w)) return -kInf;
    return log_normal_pdf(y, p.mu * w, p.sigma2 * w) +
           mixing_log_pdf(fam, p.phi, w) + s;
  };
  const double u = (post.p + std::sqrt(post.p * post.p + post.a * post.b)) / post.a;
  const double hint = u > 0.0 ? std::log(u) : 0.0;
  const double curv = 0.5 * (post.a * u + (u > 0.0 ? post.b / u : 0.0));
  return quad::log_integral(logf, hint, curv > 0.0 ? 1.0 / std::sqrt(curv) : 1.0);
}

double nef_log_pdf(const NefParams& p, const MixingFamily& fam, double y) {
  p.validate();
  fam.require_density("nef_pdf");
  if (!std::isfinite(y)) throw DomainError("nef_pdf: y must be finite");
  const double s2 = p.sigma2;
  const double mu = p.mu;
  const double phi = p.phi;

  if (fam.tag() == FamilyTag::Gamma) {
    const double k2 = (mu * mu * fam.b2() + phi * s2) / phi;
    // near 0 the two log terms below cancel when phi > 1/2; the density is
    // finite there and the mixture integral is well behaved
    if (y == 0.0 || (phi > 0.5 && std::abs(y) < 1e-6 * std::sqrt(k2))) return nef_log_pdf_mixture(p, fam, y);
    // sqrt(a b) and log(b / a) formed without squaring y
    const double a = mu * mu / s2 + 2.0 * phi;
    const double x = std::sqrt(a) * (std::abs(y) / std::sqrt(s2));
    if (x == std::numeric_limits<double>::infinity()) return -x;
    const double log_k = x > 1e-290 ? log_bessel_k(phi - 0.5, x)
                                    : log_bessel_k_log_arg(phi - 0.5, 0.5 * std::log(a / s2) + std::log(std::abs(y)));
    return 0.5 * std::log(2.0 / (std::numbers::pi * s2)) + phi * std::log(phi) -
           std::lgamma(phi) + y * mu / s2 + log_k +
           (phi - 0.5) * (std::log(std::abs(y)) - 0.5 * std::log(s2 * a));
  }

  const double a = mu * mu / s2 + phi;
  const double r = std::hypot(y, std::sqrt(s2 * phi));  // sqrt(y^2 + s2 phi)
  const double x = std::sqrt(a / s2) * r;
  if (x == std::numeric_limits<double>::infinity()) return -x;
  return -std::log(std::numbers::pi) + 0.5 * std::log(phi / s2) + y * mu / s2 +
         phi + log_bessel_k(1.0, x) + 0.5 * std::log(mu * mu + s2 * phi) - std::log(r);
}

double nef_pdf(const NefParams& p, const MixingFamily& fam, double y) {
  return std::exp(nef_log_pdf(p, fam, y));
}

Cumulants nef_cumulants(const NefParams& p, const MixingFamily& fam) {
  p.validate();
  const double mu = p.mu;
  const double s2 = p.sigma2;
  const double phi = p.phi;
  const double b2 = fam.b2();
  const double b3 = fam.b3();
  const double b4 = fam.b4();
  Cumulants c;
  c.k1 = mu;
  c.k2 = (mu * mu * b2 + phi * s2) / phi;
  c.k3 = (mu * mu * mu * b3 + 3.0 * phi * s2 * mu * b2) / (phi * phi);
  c.k4 = (std::pow(mu, 4) * b4 + 6.0 * phi * s2 * mu * mu * b3 +
          3.0 * phi * phi * s2 * s2 * b2) /
         (phi * phi * phi);
  return c;
}

ShapeCoefficients nef_skew_kurt(const NefParams& p, const MixingFamily& fam) {
  const Cumulants c = nef_cumulants(p, fam);
  ShapeCoefficients s;
  s.skewness = c.k3 / std::pow(c.k2, 1.5);
  s.kurtosis_ratio = c.k4 / (c.k2 * c.k2);
  s.excess_kurtosis = s.kurtosis_ratio - 3.0;
  return s;
}

std::vector<double> sample_nef(const NefParams& p, const MixingFamily& fam,
                               std::size_t n, Rng& rng) {
  p.validate();
  fam.require_density("sample_nef");
  if (n == 0) throw DomainError("sample_nef: n must be >= 1");
  std::normal_distribution<double> normal;
  const double sigma = std::sqrt(p.sigma2);
  std::vector<double> out(n);
  for (auto& y : out) {
    const double w = sample_latent(fam, p.phi, rng);
    y = p.mu * w + sigma * std::sqrt(w) * normal(rng);
  }
  return out;
}

double asymmetric_laplace_pdf(double mu, double sigma2, double y) {
  const double sigma = std::sqrt(sigma2);
  const double kappa =
      (std::sqrt(2.0 * sigma2 + mu * mu) - mu) / (std::numbers::sqrt2 * sigma);
  const double front = std::numbers::sqrt2 / sigma * kappa / (1.0 + kappa * kappa);
  const double rate = y >= 0.0 ? std::numbers::sqrt2 * kappa / sigma
                               : std::numbers::sqrt2 / (sigma * kappa);
  return front * std::exp(-rate * std::abs(y));
}

}  // namespace nef
