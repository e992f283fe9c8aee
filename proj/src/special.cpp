#include "nef/special.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/digamma.hpp>

#include "nef/errors.hpp"
#include "nef/quadrature.hpp"

namespace nef {
namespace {

constexpr double kEps = 1e-16;

// Power series coefficients of 1/Gamma(z) = sum_k c[k] z^(k+1).
constexpr std::array<double, 26> kRecipGamma = {
    1.0,
    0.5772156649015329,
    -0.6558780715202538,
    -0.0420026350340952,
    0.1665386113822915,
    -0.0421977345555443,
    -0.0096219715278770,
    0.0072189432466630,
    -0.0011651675918591,
    -0.0002152416741149,
    0.0001280502823882,
    -0.0000201348547807,
    -0.0000012504934821,
    0.0000011330272320,
    -0.0000002056338417,
    0.0000000061160950,
    0.0000000050020075,
    -0.0000000011812746,
    0.0000000001043427,
    0.0000000000077823,
    -0.0000000000036968,
    0.0000000000005100,
    -0.0000000000000206,
    -0.0000000000000054,
    0.0000000000000014,
    0.0000000000000001,
};

void check_args(double order, double arg) {
  if (!std::isfinite(order) || !std::isfinite(arg)) {
    throw DomainError("log_bessel_k: non-finite argument");
  }
  if (arg <= 0.0) {
    throw DomainError("log_bessel_k: arg must be positive, got " +
                      std::to_string(arg));
  }
}

double reciprocal_gamma_1p_impl(double x) {
  double sum = 0.0;
  double pw = 1.0;
  for (double c : kRecipGamma) {
    sum += c * pw;
    pw *= x;
  }
  return sum;
}

// First term of Temme's series, K_mu(x) + O(x^2) for |mu| <= 1/2, with
// d = -log(x / 2).
double temme_f0(double mu, double d) {
  const double pimu = std::numbers::pi * mu;
  const double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
  const double e = mu * d;
  const double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
  // gam1 = (1/G(1-mu) - 1/G(1+mu)) / (2 mu), gam2 = (1/G(1-mu) + 1/G(1+mu)) / 2
  // Even and odd parts of the series of 1/G(1+mu); the odd part is
  // divided by mu term by term.
  double gam1 = 0.0;
  double gam2 = 0.0;
  double pw = 1.0;
  for (std::size_t k = 0; k + 1 < kRecipGamma.size(); k += 2) {
    gam2 += kRecipGamma[k] * pw;
    gam1 -= kRecipGamma[k + 1] * pw;
    pw *= mu * mu;
  }
  return fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
}

struct BaseValues {
  double log_k;  // log K_mu(x)
  double ratio;  // K_{mu+1}(x) / K_mu(x)
};

// K_mu and K_{mu+1} for |mu| <= 1/2. Temme's series for x < 2, Steed's
// continued fraction otherwise (the latter in exp(x)-scaled form).
BaseValues base_values(double mu, double x) {
  const double mu2 = mu * mu;
  if (x < 2.0) {
    const double x2 = 0.5 * x;
    double d = std::numbers::ln2 - std::log(x);  // x / 2 can underflow
    double ff = temme_f0(mu, d);
    double sum = ff;
    const double gampl = reciprocal_gamma_1p_impl(mu);
    const double gammi = reciprocal_gamma_1p_impl(-mu);
    double e = std::exp(mu * d);
    double p = 0.5 * e / gampl;
    double q = 0.5 / (e * gammi);
    double c = 1.0;
    d = x2 * x2;
    double sum1 = p;
    for (int i = 1; i < 10000; ++i) {
      const double di = i;
      ff = (di * ff + p + q) / (di * di - mu2);
      c *= d / di;
      p /= (di - mu);
      q /= (di + mu);
      const double del = c * ff;
      sum += del;
      const double del1 = c * p - di * del;
      sum1 += del1;
      if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    const double k1 = sum1 * (2.0 / x);
    return {std::log(sum), k1 / sum};
  }

  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25 - mu2;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 2; i < 100000; ++i) {
    a -= 2.0 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps) break;
  }
  h = a1 * h;
  const double log_k = 0.5 * std::log(std::numbers::pi / (2.0 * x)) - x - std::log(s);
  const double ratio = (mu + x + 0.5 - h) / x;
  return {log_k, ratio};
}

// Uniform asymptotic expansion of K_nu(nu z) for large nu:
//   sqrt(pi / (2 nu)) exp(-nu eta) (1 + z^2)^{-1/4} sum_k (-1)^k u_k(t) / nu^k
// with t = 1/sqrt(1 + z^2), eta = sqrt(1 + z^2) + log(z / (1 + sqrt(1 + z^2))).
double log_k_debye(double nu, double x) {
  const double z = x / nu;
  const double r = std::hypot(1.0, z);
  const double t = 1.0 / r;
  // log(z / (1 + r)) without cancellation for tiny z
  const double eta = r + std::log(z) - std::log1p(r);
  const double t2 = t * t;
  const double u1 = t * (3.0 - 5.0 * t2) / 24.0;
  const double u2 = t2 * (81.0 + t2 * (-462.0 + t2 * 385.0)) / 1152.0;
  const double u3 =
      t * t2 * (30375.0 + t2 * (-369603.0 + t2 * (765765.0 - t2 * 425425.0))) / 414720.0;
  const double u4 =
      t2 * t2 *
      (4465125.0 +
       t2 * (-94121676.0 + t2 * (349922430.0 + t2 * (-446185740.0 + t2 * 185910725.0)))) /
      39813120.0;
  const double u5 =
      t * t2 * t2 *
      (1519035525.0 +
       t2 * (-49286948607.0 +
             t2 * (284499769554.0 +
                   t2 * (-614135872350.0 +
                         t2 * (566098157625.0 - t2 * 188699385875.0))))) /
      6688604160.0;
  const double inv = 1.0 / nu;
  const double series =
      1.0 + inv * (-u1 + inv * (u2 + inv * (-u3 + inv * (u4 - inv * u5))));
  return 0.5 * std::log(std::numbers::pi / (2.0 * nu)) - nu * eta -
         0.5 * std::log(r) + std::log(series);
}

constexpr double kDebyeOrder = 100.0;

// Fills log K_{nu + j}(x), j = 0..n-1, for nu >= 0.
void log_k_nonneg_run(double nu, double x, double* out, std::size_t n) {
  if (nu >= kDebyeOrder) {
    for (std::size_t j = 0; j < n; ++j) {
      out[j] = log_k_debye(nu + static_cast<double>(j), x);
    }
    return;
  }
  if (x < 1e-290 && nu >= 0.5) {
    // leading term; the rest is O(x) relative
    for (std::size_t j = 0; j < n; ++j) {
      const double v = nu + static_cast<double>(j);
      out[j] = std::lgamma(v) + (v - 1.0) * std::numbers::ln2 - v * std::log(x);
    }
    return;
  }
  const long nl = static_cast<long>(nu + 0.5);
  const double mu = nu - static_cast<double>(nl);
  const BaseValues base = base_values(mu, x);

  double log_k = base.log_k;
  double ratio = base.ratio;  // K_{mu+i+1} / K_{mu+i}
  const double two_over_x = 2.0 / x;
  // Upward recurrence in ratio form: r_{i+1} = 2(mu+i+1)/x + 1/r_i.
  double prod = 1.0;
  double acc = log_k;
  for (long i = 0; i < nl; ++i) {
    prod *= ratio;
    if (prod > 1e250 || prod < 1e-250) {
      acc += std::log(prod);
      prod = 1.0;
    }
    ratio = two_over_x * (mu + static_cast<double>(i) + 1.0) + 1.0 / ratio;
  }
  acc += std::log(prod);
  out[0] = acc;
  for (std::size_t j = 1; j < n; ++j) {
    acc += std::log(ratio);
    out[j] = acc;
    ratio = two_over_x * (nu + static_cast<double>(j)) + 1.0 / ratio;
  }
}

}  // namespace

double reciprocal_gamma_1p(double x) {
  // 1/G(1+x) = 1/(x G(x)) ... = sum_k c[k] x^k
  return reciprocal_gamma_1p_impl(x);
}

double log_bessel_k(double order, double arg) {
  check_args(order, arg);
  double out = 0.0;
  log_k_nonneg_run(std::abs(order), arg, &out, 1);
  return out;
}

double log_bessel_k_log_arg(double order, double log_arg) {
  if (!std::isfinite(order) || std::isnan(log_arg) || log_arg == std::numeric_limits<double>::infinity()) {
    throw DomainError("log_bessel_k: non-finite argument");
  }
  if (log_arg > -690.0) return log_bessel_k(order, std::exp(log_arg));
  if (log_arg == -std::numeric_limits<double>::infinity()) return std::numeric_limits<double>::infinity();
  const double nu = std::abs(order);
  const double d = std::numbers::ln2 - log_arg;
  // the (x/2)^{nu} half of the pair is exp(-2 nu d) smaller; drop it
  if (nu >= 0.5 || nu * d > 50.0) return std::lgamma(nu) + (nu - 1.0) * std::numbers::ln2 - nu * log_arg;
  return std::log(temme_f0(nu, d));
}

void log_bessel_k_run(double order, double arg, std::span<double> out) {
  check_args(order, arg);
  if (out.empty()) return;
  const double last = order + static_cast<double>(out.size() - 1);
  if (order >= 0.0) {
    log_k_nonneg_run(order, arg, out.data(), out.size());
    return;
  }
  if (last <= 0.0) {
    // K_{order+j} = K_{|order|-j}: run upward from |last| and reverse.
    const std::size_t n = out.size();
    log_k_nonneg_run(-last, arg, out.data(), n);
    for (std::size_t i = 0; i < n / 2; ++i) std::swap(out[i], out[n - 1 - i]);
    return;
  }
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = log_bessel_k(order + static_cast<double>(j), arg);
  }
}

double dlog_bessel_k_dorder(double order, double arg) {
  check_args(order, arg);
  const double h = 1e-6 * std::max(1.0, std::abs(order));
  return (log_bessel_k(order + h, arg) - log_bessel_k(order - h, arg)) / (2.0 * h);
}

void GigParams::validate() const {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("GIG: a must be positive");
  if (!(b >= 0.0) || !std::isfinite(b)) throw DomainError("GIG: b must be nonnegative");
  if (!std::isfinite(p)) throw DomainError("GIG: p must be finite");
  if (b == 0.0 && p <= 0.0) {
    throw DomainError("GIG: b == 0 requires p > 0 (gamma limit)");
  }
}

double gig_log_normalizer(const GigParams& g) {
  g.validate();
  if (g.b == 0.0) {
    return std::lgamma(g.p) - g.p * std::log(0.5 * g.a);
  }
  return std::numbers::ln2 + 0.5 * g.p * std::log(g.b / g.a) +
         log_bessel_k(g.p, std::sqrt(g.a * g.b));
}

namespace {

// e^x - 1 - x without cancellation near 0.
double expm1_minus_x(double x) {
  if (std::abs(x) > 0.5) return std::expm1(x) - x;
  double term = 0.5 * x * x;
  double sum = term;
  for (int k = 3; k < 30 && std::abs(term) > 1e-17 * std::abs(sum); ++k) {
    term *= x / k;
    sum += term;
  }
  return sum;
}

double gig_log_mode(const GigParams& g) {
  // mode of u^p exp{-(a u + b / u)/2}
  const double u = (g.p + std::sqrt(g.p * g.p + g.a * g.b)) / g.a;
  if (u > 0.0 && std::isfinite(u)) return std::log(u);
  // p < 0 with tiny ab: mode near sqrt(b/a)
  return g.b > 0.0 ? 0.5 * std::log(g.b / g.a) : 0.0;
}

double gig_log_width(const GigParams& g, double s) {
  const double curv = 0.5 * (g.a * std::exp(s) + g.b * std::exp(-s));
  return curv > 0.0 ? 1.0 / std::sqrt(curv) : 1.0;
}

}  // namespace

double gig_moment(const GigParams& g, int power_k, int log_power_l) {
  g.validate();
  if (log_power_l < 0) throw DomainError("gig_moment: log power must be >= 0");
  if (g.b == 0.0 && g.p + power_k <= 0.0) {
    throw DomainError("gig_moment: moment does not exist (b = 0, p + k <= 0)");
  }
  if (log_power_l == 0) {
    if (power_k == 0) return 1.0;
    if (g.b == 0.0) {
      return std::exp(std::lgamma(g.p + power_k) - std::lgamma(g.p) -
                      power_k * std::log(0.5 * g.a));
    }
    const double x = std::sqrt(g.a * g.b);
    return std::exp(0.5 * power_k * std::log(g.b / g.a) +
                    log_bessel_k(g.p + power_k, x) - log_bessel_k(g.p, x));
  }

  const GigParams shifted{g.a, g.b, g.p + power_k};
  const double scale = power_k == 0 ? 1.0 : gig_moment(g, power_k, 0);
  // Kernel relative to its mode in t = s - s0, split into a linear part
  // (zero up to roundoff) and the curved remainder, so that large p does
  // not drown the integrand in cancellation noise.
  const double s0 = gig_log_mode(shifted);
  const double ca = 0.5 * shifted.a * std::exp(s0);
  const double cb = 0.5 * shifted.b * std::exp(-s0);
  const double slope = shifted.p - ca + cb;
  auto logf = [&](double t) {
    return slope * t - ca * expm1_minus_x(t) - cb * expm1_minus_x(-t);
  };
  const int l = log_power_l;
  auto weight = [l, s0](double t) { return std::pow(s0 + t, l); };
  return scale * quad::expectation(logf, weight, 0.0, gig_log_width(shifted, s0));
}

double gig_mean_log(const GigParams& g) {
  g.validate();
  if (g.b == 0.0) {
    return boost::math::digamma(g.p) - std::log(0.5 * g.a);
  }
  return 0.5 * std::log(g.b / g.a) +
         dlog_bessel_k_dorder(g.p, std::sqrt(g.a * g.b));
}

}  // namespace nef
