#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <complex>
#include <numbers>
#include <vector>

#include "nef/errors.hpp"
#include "nef/nef.hpp"
#include "oracles.hpp"

using nef::MixingFamily;
using nef::NefParams;

namespace {

const MixingFamily kGamma = MixingFamily::gamma();
const MixingFamily kIg = MixingFamily::inverse_gaussian();

double integrate(const std::function<double(double)>& f, double lo, double hi) {
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate(f, lo, hi, 1e-12);
}

// split at 0, where the density can have a cusp
double integrate_line(const std::function<double(double)>& f) {
  boost::math::quadrature::exp_sinh<double> es;
  const double inf = std::numeric_limits<double>::infinity();
  return es.integrate(f, -inf, 0.0, 1e-12) + es.integrate(f, 0.0, inf, 1e-12);
}

}  // namespace

TEST_CASE("latent densities") {
  CHECK(nef::mixing_pdf(kGamma, 1.0, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
  CHECK(nef::mixing_pdf(kIg, 1.0, 1.0) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-14));
  for (double phi : {0.3, 1.0, 2.0, 25.0}) {
    for (const MixingFamily& fam : {kGamma, kIg}) {
      const double mass = integrate([&](double w) { return nef::mixing_pdf(fam, phi, w); }, 0.0,
                                    std::numeric_limits<double>::infinity());
      const double mean = integrate([&](double w) { return w * nef::mixing_pdf(fam, phi, w); }, 0.0,
                                    std::numeric_limits<double>::infinity());
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
      CHECK(mean == doctest::Approx(1.0).epsilon(1e-8));
    }
    CHECK(nef::mixing_log_pdf(kGamma, phi, 0.7) == doctest::Approx(oracle::gamma_latent_log_pdf(phi, 0.7)).epsilon(1e-13));
    CHECK(nef::mixing_log_pdf(kIg, phi, 0.7) == doctest::Approx(oracle::ig_latent_log_pdf(phi, 0.7)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(nef::mixing_pdf(MixingFamily::ghs(), 1.0, 1.0), nef::UnsupportedFamily);
}

TEST_CASE("latent characteristic function") {
  const auto g = nef::mixing_cf(kGamma, 2.0, 1.0);
  CHECK(std::abs(g - std::pow(std::complex<double>(1.0, -0.5), -2.0)) < 1e-14);
  const auto ig = nef::mixing_cf(kIg, 1.0, 1.0);
  CHECK(std::abs(ig - std::exp(1.0 - std::sqrt(std::complex<double>(1.0, -2.0)))) < 1e-14);
  for (const MixingFamily& fam : {kGamma, kIg}) {
    CHECK(std::abs(nef::mixing_cf(fam, 1.7, 0.0) - 1.0) < 1e-15);
    for (double t : {0.3, 2.0}) {
      const double phi = 1.7;
      const double re = integrate([&](double w) { return std::cos(t * w) * nef::mixing_pdf(fam, phi, w); }, 0.0, 60.0);
      const double im = integrate([&](double w) { return std::sin(t * w) * nef::mixing_pdf(fam, phi, w); }, 0.0, 60.0);
      CHECK(std::abs(nef::mixing_cf(fam, phi, t) - std::complex<double>(re, im)) < 1e-9);
    }
  }
  // moment generating function on the real axis
  CHECK(nef::mixing_mgf(kGamma, 2.0, 0.5).real() == doctest::Approx(std::pow(1.0 - 0.25, -2.0)).epsilon(1e-14));
}

TEST_CASE("observable characteristic function") {
  const NefParams p{0.4, 1.5, 2.0};
  const double t = 0.8;
  // gamma: (1 - (i t mu - t^2 sigma2 / 2) / phi)^{-phi}
  const std::complex<double> arg = (std::complex<double>(0.0, t * p.mu) - 0.5 * t * t * p.sigma2) / p.phi;
  CHECK(std::abs(nef::nef_cf(p, kGamma, t) - std::pow(1.0 - arg, -p.phi)) < 1e-14);
  // IG: exp{phi (1 - sqrt(1 - 2 (i t mu - t^2 sigma2/2) / phi))}
  CHECK(std::abs(nef::nef_cf(p, kIg, t) - std::exp(p.phi * (1.0 - std::sqrt(1.0 - 2.0 * arg)))) < 1e-14);
  // against numerical Fourier transform of the density
  for (const MixingFamily& fam : {kGamma, kIg}) {
    const double re = integrate_line([&](double y) { return std::cos(t * y) * nef::nef_pdf(p, fam, y); });
    const double im = integrate_line([&](double y) { return std::sin(t * y) * nef::nef_pdf(p, fam, y); });
    CHECK(std::abs(nef::nef_cf(p, fam, t) - std::complex<double>(re, im)) < 1e-8);
  }
}

TEST_CASE("asymmetric Laplace is the unit-shape gamma case") {
  for (double mu : {-1.0, 0.0, 0.6}) {
    for (double y : {-3.0, -0.4, 0.2, 2.5}) {
      const NefParams p{mu, 1.3, 1.0};
      CHECK(nef::nef_pdf(p, kGamma, y) == doctest::Approx(nef::asymmetric_laplace_pdf(mu, 1.3, y)).epsilon(1e-10));
    }
  }
  // mu = 0: Laplace with scale sqrt(sigma2 / 2)
  const double s = std::sqrt(1.3 / 2.0);
  CHECK(nef::asymmetric_laplace_pdf(0.0, 1.3, 0.9) == doctest::Approx(std::exp(-0.9 / s) / (2 * s)).epsilon(1e-14));
}

TEST_CASE("symmetric when mu = 0") {
  for (const MixingFamily& fam : {kGamma, kIg}) {
    const NefParams p{0.0, 2.0, 1.4};
    for (double y : {0.1, 1.0, 7.0}) {
      CHECK(nef::nef_pdf(p, fam, y) == doctest::Approx(nef::nef_pdf(p, fam, -y)).epsilon(1e-14));
    }
  }
}

TEST_CASE("closed form matches the mixture integral") {
  for (const MixingFamily& fam : {kGamma, kIg}) {
    for (const NefParams& p : {NefParams{3, 4, 2}, NefParams{-0.5, 0.3, 0.7}, NefParams{0.0, 1.0, 5.0},
                               NefParams{1e-3, 2e-4, 1.3}}) {
      const double sd = std::sqrt(p.sigma2 + p.mu * p.mu * fam.b2() / p.phi);
      for (double z : {-4.0, -1.0, -0.01, 0.3, 2.0, 6.0}) {
        const double y = p.mu + z * sd;
        const double closed = nef::nef_log_pdf(p, fam, y);
        const double mix = nef::nef_log_pdf_mixture(p, fam, y);
        const double ora = oracle::Posterior{fam == kIg, p.mu, p.sigma2, p.phi, y}.log_density();
        INFO(fam.name() << " mu=" << p.mu << " y=" << y);
        CHECK(std::abs(closed - mix) <= 1e-8 * std::max(1.0, std::abs(closed)));
        CHECK(std::abs(closed - ora) <= 1e-8 * std::max(1.0, std::abs(closed)));
        CHECK(std::exp(closed) == doctest::Approx(nef::nef_pdf(p, fam, y)).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("density integrates to one") {
  for (const MixingFamily& fam : {kGamma, kIg}) {
    for (const NefParams& p : {NefParams{3, 4, 2}, NefParams{-0.5, 0.3, 0.7}}) {
      CHECK(integrate_line([&](double y) { return nef::nef_pdf(p, fam, y); }) == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
}

TEST_CASE("far tail and the origin") {
  const NefParams p{3, 4, 2};
  for (const MixingFamily& fam : {kGamma, kIg}) {
    const double l = nef::nef_log_pdf(p, fam, -50.0);
    CHECK(std::isfinite(l));
    CHECK(l == doctest::Approx(oracle::Posterior{fam == kIg, 3, 4, 2, -50.0}.log_density()).epsilon(1e-8));
  }
  // IG density is continuous through y = 0
  const double at0 = nef::nef_log_pdf(p, kIg, 0.0);
  CHECK(std::isfinite(at0));
  CHECK(at0 == doctest::Approx(nef::nef_log_pdf(p, kIg, 1e-9)).epsilon(1e-8));
  CHECK(at0 == doctest::Approx(oracle::Posterior{true, 3, 4, 2, 0.0}.log_density()).epsilon(1e-8));
  // phi < 1/2: a pole at 0 with f(y) ~ |y|^{2 phi - 1}
  const NefParams pole{3, 4, 0.4};
  CHECK(nef::nef_log_pdf(pole, kGamma, 0.0) == std::numeric_limits<double>::infinity());
  for (double y : {1e-300, -1e-300, 4.9e-324}) {
    const double slope = nef::nef_log_pdf(pole, kGamma, y) - nef::nef_log_pdf(pole, kGamma, std::copysign(1e-200, y));
    CHECK(slope == doctest::Approx(-0.2 * std::log(std::abs(y) / 1e-200)).epsilon(1e-9));
  }
  // gamma with phi > 1/2 is finite at 0
  CHECK(nef::nef_log_pdf(p, kGamma, 0.0) == doctest::Approx(oracle::Posterior{false, 3, 4, 2, 0.0}.log_density()).epsilon(1e-8));
}

TEST_CASE("cumulants") {
  const NefParams p{3, 4, 2};
  const auto g = nef::nef_cumulants(p, kGamma);
  CHECK(g.k1 == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(g.k2 == doctest::Approx(8.5).epsilon(1e-15));
  CHECK(g.k3 == doctest::Approx(31.5).epsilon(1e-15));
  CHECK(g.k4 == doctest::Approx(192.75).epsilon(1e-15));
  const auto ig = nef::nef_cumulants(p, kIg);
  CHECK(ig.k1 == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(ig.k2 == doctest::Approx(8.5).epsilon(1e-15));
  CHECK(ig.k3 == doctest::Approx(38.25).epsilon(1e-15));
  CHECK(ig.k4 == doctest::Approx(337.875).epsilon(1e-15));

  const auto sk = nef::nef_skew_kurt(p, kGamma);
  CHECK(sk.skewness == doctest::Approx(31.5 / std::pow(8.5, 1.5)).epsilon(1e-14));
  CHECK(sk.kurtosis_ratio == doctest::Approx(192.75 / 72.25).epsilon(1e-14));
  CHECK(sk.excess_kurtosis == doctest::Approx(192.75 / 72.25 - 3.0).epsilon(1e-14));

  // GHS needs only b and its derivatives
  const auto h = nef::nef_cumulants(p, MixingFamily::ghs());
  CHECK(h.k1 == doctest::Approx(3.0).epsilon(1e-14));

  // against moments of the density
  for (const MixingFamily& fam : {kGamma, kIg}) {
    const NefParams q{0.8, 1.1, 3.0};
    const auto c = nef::nef_cumulants(q, fam);
    std::vector<double> m(5);
    for (int k = 1; k <= 4; ++k) {
      m[k] = integrate_line([&](double y) {
        const double f = nef::nef_pdf(q, fam, y);
        return f == 0.0 ? 0.0 : std::pow(y - c.k1, k) * f;
      });
    }
    CHECK(std::abs(m[1]) < 1e-8);
    CHECK(m[2] == doctest::Approx(c.k2).epsilon(1e-7));
    CHECK(m[3] == doctest::Approx(c.k3).epsilon(1e-7));
    CHECK(m[4] - 3 * m[2] * m[2] == doctest::Approx(c.k4).epsilon(1e-6));
  }
}

TEST_CASE("posterior GIG parameters") {
  const NefParams p{3, 4, 2};
  const auto g = nef::posterior_gig(p, kGamma, 1.0);
  CHECK(g.a == doctest::Approx(9.0 / 4.0 + 4.0));
  CHECK(g.b == doctest::Approx(0.25));
  CHECK(g.p == doctest::Approx(1.5));
  const auto i = nef::posterior_gig(p, kIg, 1.0);
  CHECK(i.a == doctest::Approx(9.0 / 4.0 + 2.0));
  CHECK(i.b == doctest::Approx(0.25 + 2.0));
  CHECK(i.p == doctest::Approx(-1.0));
}

TEST_CASE("sampler") {
  const NefParams p{3, 4, 2};
  for (const MixingFamily& fam : {kGamma, kIg}) {
    nef::Rng rng = nef::stream_for(5, 0);
    const std::size_t n = 200000;
    const auto y = nef::sample_nef(p, fam, n, rng);
    double s = 0.0, s2 = 0.0;
    for (double v : y) {
      s += v;
      s2 += v * v;
    }
    const double mean = s / n;
    const double var = s2 / n - mean * mean;
    CHECK(std::abs(mean - 3.0) < 5.0 * std::sqrt(8.5 / n));
    CHECK(std::abs(var - 8.5) < 0.15);
    for (double t : {0.1, 0.5}) {
      std::complex<double> acc = 0.0;
      for (double v : y) acc += std::exp(std::complex<double>(0.0, t * v));
      CHECK(std::abs(acc / static_cast<double>(n) - nef::nef_cf(p, fam, t)) < 5.0 / std::sqrt(double(n)));
    }
    // latent mean
    double wsum = 0.0;
    for (int k = 0; k < 100000; ++k) wsum += nef::sample_latent(fam, 2.0, rng);
    CHECK(std::abs(wsum / 1e5 - 1.0) < 0.01);
  }
}

TEST_CASE("sampler is deterministic per stream") {
  nef::Rng a = nef::stream_for(9, 3);
  nef::Rng b = nef::stream_for(9, 3);
  const NefParams p{3, 4, 2};
  CHECK(nef::sample_nef(p, kIg, 100, a) == nef::sample_nef(p, kIg, 100, b));
  nef::Rng c = nef::stream_for(9, 4);
  nef::Rng d = nef::stream_for(9, 3);
  CHECK(nef::sample_nef(p, kIg, 100, c) != nef::sample_nef(p, kIg, 100, d));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(nef::nef_pdf(NefParams{0, 0, 1}, kGamma, 1.0), nef::DomainError);
  CHECK_THROWS_AS(nef::nef_pdf(NefParams{0, 1, -1}, kGamma, 1.0), nef::DomainError);
  CHECK_THROWS_AS(nef::nef_pdf(NefParams{0, 1, 1}, MixingFamily::ghs(), 1.0), nef::UnsupportedFamily);
  CHECK_THROWS_AS(MixingFamily::from_name("stable"), std::exception);
  CHECK(MixingFamily::from_name("ig") == kIg);
}
