#include "nef/mp_sums.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "nef/errors.hpp"
#include "nef/quadrature.hpp"
#include "first_error.hpp"

namespace nef {

namespace {

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Chebyshev interpolant of f on [lo, hi], integrated from lo. Exact to
// rounding for densities analytic well beyond the panel.
class PanelIntegral {
 public:
  static constexpr int kN = 24;

  template <class F>
  PanelIntegral(F f, double lo, double hi) : mid_(0.5 * (lo + hi)), half_(0.5 * (hi - lo)) {
    std::array<double, kN + 1> v{};
    for (int j = 0; j <= kN; ++j) v[j] = f(mid_ + half_ * std::cos(std::numbers::pi * j / kN));
    std::array<double, kN + 3> c{};  // f = sum_k c_k T_k
    for (int k = 0; k <= kN; ++k) {
      double sum = 0.0;
      for (int j = 0; j <= kN; ++j) {
        const double w = (j == 0 || j == kN) ? 0.5 : 1.0;
        sum += w * v[j] * std::cos(std::numbers::pi * j * k / kN);
      }
      c[k] = sum * 2.0 / kN;
    }
    c[0] *= 0.5;
    c[kN] *= 0.5;
    // antiderivative coefficients, then the constant that pins F(lo) = 0
    b_[1] = half_ * (2.0 * c[0] - c[2]) / 2.0;
    for (int k = 2; k <= kN + 1; ++k) b_[k] = half_ * (c[k - 1] - c[k + 1]) / (2.0 * k);
    double at_lo = 0.0;
    for (int k = 1; k <= kN + 1; ++k) at_lo += (k % 2 ? -b_[k] : b_[k]);
    b_[0] = -at_lo;
  }

  double operator()(double y) const {
    const double x = std::clamp((y - mid_) / half_, -1.0, 1.0);
    double b1 = 0.0, b2 = 0.0;  // Clenshaw
    for (int k = kN + 1; k >= 1; --k) {
      const double t = 2.0 * x * b1 - b2 + b_[k];
      b2 = b1;
      b1 = t;
    }
    return x * b1 - b2 + b_[0];
  }

 private:
  double mid_;
  double half_;
  std::array<double, kN + 2> b_{};
};

}  // namespace

void MpCountParams::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError("mixed Poisson: lambda must be positive");
  }
  if (!(phi > 0.0) || !std::isfinite(phi)) {
    throw DomainError("mixed Poisson: phi must be positive");
  }
  family.require_density("mixed Poisson counts");
}

SummandSpec::SummandSpec(std::string label, double mu, double sigma2,
                         Sampler sampler)
    : label_(std::move(label)), mu_(mu), sigma2_(sigma2), sampler_(std::move(sampler)) {
  if (!std::isfinite(mu_) || !(sigma2_ > 0.0) || !std::isfinite(sigma2_)) {
    throw DomainError("summand: need finite mean and positive finite variance");
  }
}

SummandSpec SummandSpec::exponential(double mean) {
  if (!(mean > 0.0)) throw DomainError("summand exp: mean must be positive");
  return SummandSpec("exp:" + shortest(mean), mean, mean * mean,
                     [mean](Rng& rng) {
                       return std::exponential_distribution<double>(1.0 / mean)(rng);
                     });
}

SummandSpec SummandSpec::normal(double mu, double sigma2) {
  const double sd = std::sqrt(sigma2);
  return SummandSpec("normal:" + shortest(mu) + "," + shortest(sigma2),
                     mu, sigma2, [mu, sd](Rng& rng) {
                       return std::normal_distribution<double>(mu, sd)(rng);
                     });
}

SummandSpec SummandSpec::custom(std::string label, double mu, double sigma2,
                                Sampler sampler) {
  return SummandSpec(std::move(label), mu, sigma2, std::move(sampler));
}

SummandSpec SummandSpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw DomainError("summand spec must look like exp:MEAN or normal:MU,SIGMA2");
  }
  const std::string kind = text.substr(0, colon);
  const std::string rest = text.substr(colon + 1);
  try {
    if (kind == "exp") {
      std::size_t used = 0;
      const double mean = std::stod(rest, &used);
      if (used != rest.size()) throw std::invalid_argument(rest);
      return exponential(mean);
    }
    if (kind == "normal") {
      const auto comma = rest.find(',');
      if (comma == std::string::npos) throw std::invalid_argument(rest);
      return normal(std::stod(rest.substr(0, comma)), std::stod(rest.substr(comma + 1)));
    }
  } catch (const std::invalid_argument&) {
    throw DomainError("cannot parse summand spec '" + text + "'");
  } catch (const std::out_of_range&) {
    throw DomainError("cannot parse summand spec '" + text + "'");
  }
  throw DomainError("unknown summand kind '" + kind + "'");
}

double mp_log_pmf_mixture(const MpCountParams& c, std::uint64_t n) {
  c.validate();
  const double dn = static_cast<double>(n);
  const double log_lambda = std::log(c.lambda);
  const double log_fact = std::lgamma(dn + 1.0);
  auto logf = [&](double s) {
    const double w = std::exp(s);
    if (w == 0.0 || !std::isfinite(w)) return -std::numeric_limits<double>::infinity();
    return dn * (log_lambda + s) - c.lambda * w - log_fact +
           mixing_log_pdf(c.family, c.phi, w) + s;
  };
  // Posterior of W given N = n is GIG-like; start near the mean of that law.
  const double hint = std::log((dn + c.phi) / (c.lambda + c.phi));
  return quad::log_integral(logf, hint, 1.0 / std::sqrt(dn + c.phi));
}

double mp_log_pmf(const MpCountParams& c, std::uint64_t n) {
  c.validate();
  if (c.family.tag() == FamilyTag::Gamma) {
    const double dn = static_cast<double>(n);
    const double lp = c.lambda + c.phi;
    return std::lgamma(dn + c.phi) - std::lgamma(dn + 1.0) - std::lgamma(c.phi) +
           dn * std::log(c.lambda / lp) + c.phi * std::log(c.phi / lp);
  }
  return mp_log_pmf_mixture(c, n);
}

double mp_pmf(const MpCountParams& c, std::uint64_t n) {
  return std::exp(mp_log_pmf(c, n));
}

std::uint64_t sample_mp_count(const MpCountParams& c, Rng& rng) {
  c.validate();
  const double w = sample_latent(c.family, c.phi, rng);
  const double rate = c.lambda * w;
  if (rate <= 0.0) return 0;
  return static_cast<std::uint64_t>(std::poisson_distribution<long long>(rate)(rng));
}

double sample_normalized_sum(const MpCountParams& c, const SummandSpec& s,
                             Rng& rng) {
  const std::uint64_t n = sample_mp_count(c, rng);
  if (n == 0) return 0.0;
  const double a = 1.0 / std::sqrt(c.lambda);
  const double shift = s.mu() * (a - 1.0);
  double sum = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) sum += s.draw(rng) + shift;
  return a * sum;
}

std::vector<double> sample_normalized_sums(const MpCountParams& c,
                                           const SummandSpec& s,
                                           std::size_t replicas,
                                           std::uint64_t seed) {
  std::vector<double> out(replicas);
  const auto count = static_cast<std::int64_t>(replicas);
  detail::FirstError failure;  // a custom sampler may throw
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < count; ++r) {
    try {
      Rng rng = stream_for(seed, static_cast<std::uint64_t>(r));
      out[static_cast<std::size_t>(r)] = sample_normalized_sum(c, s, rng);
    } catch (...) {
      failure.capture();
    }
  }
  failure.rethrow();
  return out;
}

std::vector<double> nef_cdf_sorted(const NefParams& p, const MixingFamily& fam,
                                   std::span<const double> sorted) {
  using boost::math::quadrature::gauss_kronrod;
  const Cumulants k = nef_cumulants(p, fam);
  const double sd = std::sqrt(k.k2);
  auto pdf = [&](double y) { return nef_pdf(p, fam, y); };
  // Panels of width sd/8 on a grid through 0, where the normal-gamma
  // density has a cusp (a pole for phi <= 1/2). Panels ending at 0 go to
  // tanh-sinh, which never evaluates the endpoint.
  const double h = sd / 8.0;
  boost::math::quadrature::tanh_sinh<double> ts;
  auto panel = [&](double lo, double hi) {
    if (hi <= lo) return 0.0;
    if (lo == 0.0 || hi == 0.0) return ts.integrate(pdf, lo, hi, 1e-12);
    return gauss_kronrod<double, 21>::integrate(pdf, lo, hi, 4, 1e-12);
  };
  // Within the current panel: segments, each with a Chebyshev antiderivative
  // that is kept only if it reproduces the adaptive integral. Panels at 0 are
  // cut geometrically toward the cusp so every piece is smooth on its scale.
  struct Segment {
    double lo, hi, before;
    std::optional<PanelIntegral> fast;
  };
  std::vector<Segment> segs;
  auto build = [&](double lo, double hi) {
    segs.clear();
    std::vector<double> cuts{lo};
    constexpr int kLevels = 16;
    if (hi == 0.0) {
      for (int m = 1; m <= kLevels; ++m) cuts.push_back(std::ldexp(lo, -m));
    } else if (lo == 0.0) {
      for (int m = kLevels; m >= 1; --m) cuts.push_back(std::ldexp(hi, -m));
    }
    cuts.push_back(hi);
    double before = 0.0;
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
      Segment sg{cuts[j], cuts[j + 1], before, std::nullopt};
      const double whole = panel(sg.lo, sg.hi);
      if (sg.lo != 0.0 && sg.hi != 0.0) {
        PanelIntegral f(pdf, sg.lo, sg.hi);
        const double mid = 0.5 * (sg.lo + sg.hi);
        const double tol = 1e-14 * h + 1e-12 * whole;
        if (std::abs(f(sg.hi) - whole) <= tol && std::abs(f(mid) - panel(sg.lo, mid)) <= tol) {
          sg.fast = f;
        }
      }
      before += whole;
      segs.push_back(std::move(sg));
    }
  };

  std::vector<double> out(sorted.size());
  auto node = static_cast<long>(std::floor((k.k1 - 60.0 * sd) / h));
  const double left = static_cast<double>(node) * h;
  double acc = 0.0;
  long built = std::numeric_limits<long>::min();
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double y = sorted[i];
    if (i > 0 && y < sorted[i - 1]) throw DomainError("nef_cdf_sorted: input not sorted");
    if (y <= left) continue;  // below the integration range, F(y) ~ 0
    const auto ky = static_cast<long>(std::floor(y / h));
    for (; node < ky; ++node) {
      acc += panel(static_cast<double>(node) * h, static_cast<double>(node + 1) * h);
    }
    if (built != node) {
      build(static_cast<double>(node) * h, static_cast<double>(node + 1) * h);
      built = node;
    }
    auto sg = std::find_if(segs.begin(), segs.end(), [&](const Segment& s) { return y < s.hi; });
    if (sg == segs.end()) --sg;
    const double part = sg->before + (sg->fast ? (*sg->fast)(y) : panel(sg->lo, y));
    out[i] = std::clamp(acc + part, 0.0, 1.0);
  }
  return out;
}

double nef_cdf(const NefParams& p, const MixingFamily& fam, double y) {
  const double arr[1] = {y};
  return nef_cdf_sorted(p, fam, arr)[0];
}

double ks_distance(std::span<const double> sample, const NefParams& p,
                   const MixingFamily& fam) {
  if (sample.empty()) throw DomainError("ks_distance: empty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const std::vector<double> cdf = nef_cdf_sorted(p, fam, sorted);
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    d = std::max(d, static_cast<double>(i + 1) / n - cdf[i]);
    d = std::max(d, cdf[i] - static_cast<double>(i) / n);
  }
  return d;
}

}  // namespace nef
