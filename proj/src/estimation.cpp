#include "nef/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "nef/errors.hpp"
#include "nef/special.hpp"
#include "first_error.hpp"

namespace nef {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// y^k * m, taken as 0 at y == 0 (the products stay bounded as y -> 0 even
// where the posterior moment itself diverges).
double ypow_times(double y, int k, double m) {
  if (y == 0.0) return 0.0;
  return std::pow(y, k) * m;
}

struct Posterior {
  EStepRecord rec;
  double log_density = 0.0;
};

// Gamma latent, y != 0: GIG(a, b, phi - 1/2) posterior.
Posterior gamma_posterior(double y, const NefParams& p, bool full) {
  const GigParams g = posterior_gig(p, MixingFamily::gamma(), y);
  const double x = std::sqrt(g.a * g.b);
  const double half_log_r = 0.5 * std::log(g.b / g.a);  // log sqrt(b/a)

  // log K at orders p-2 .. p+2 (index 2 is order p), and order derivatives
  // at p-1, p, p+1 by central differences.
  double lk[5];
  log_bessel_k_run(g.p - 2.0, x, lk);
  const double h = 1e-6 * std::max(1.0, std::abs(g.p));
  double plus[3];
  double minus[3];
  log_bessel_k_run(g.p - 1.0 + h, x, plus);
  log_bessel_k_run(g.p - 1.0 - h, x, minus);
  double dk[3];
  for (int i = 0; i < 3; ++i) dk[i] = (plus[i] - minus[i]) / (2.0 * h);

  auto moment = [&](int k) { return std::exp(k * half_log_r + lk[2 + k] - lk[2]); };

  Posterior out;
  EStepRecord& r = out.rec;
  r.alpha = moment(1);
  r.gamma = moment(-1);
  r.delta = half_log_r + dk[1];
  if (full) {
    r.lambda2 = moment(2);
    r.rho = moment(-2);
    r.tau = r.alpha * (half_log_r + dk[2]);
    r.varphi = r.gamma * (half_log_r + dk[0]);
    r.nu = gig_moment(g, 0, 2);
  }
  const double s2 = p.sigma2;
  out.log_density = 0.5 * std::log(2.0 / (std::numbers::pi * s2)) +
                    p.phi * std::log(p.phi) - std::lgamma(p.phi) + y * p.mu / s2 +
                    lk[2] + g.p * half_log_r;
  return out;
}

// Gamma latent at y == 0: GIG(a, 0, p) is Gamma(shape p, rate a/2).
Posterior gamma_posterior_at_zero(const NefParams& p, bool full) {
  const GigParams g = posterior_gig(p, MixingFamily::gamma(), 0.0);
  if (g.p <= 0.0) {
    throw DomainError("E-step: y = 0 has infinite density under the gamma latent "
                      "when phi <= 1/2");
  }
  const double shape = g.p;
  const double log_rate = std::log(0.5 * g.a);
  auto moment = [&](int k) {
    if (shape + k <= 0.0) return kInf;
    return std::exp(std::lgamma(shape + k) - std::lgamma(shape) - k * log_rate);
  };
  auto mean_log = [&](double s) {
    return s > 0.0 ? boost::math::digamma(s) - log_rate : -kInf;
  };
  Posterior out;
  EStepRecord& r = out.rec;
  r.alpha = moment(1);
  r.gamma = moment(-1);
  r.delta = mean_log(shape);
  if (full) {
    r.lambda2 = moment(2);
    r.rho = moment(-2);
    r.tau = r.alpha * mean_log(shape + 1.0);
    r.varphi = shape > 1.0 ? r.gamma * mean_log(shape - 1.0) : -kInf;
    r.nu = boost::math::trigamma(shape) + r.delta * r.delta;
  }
  out.log_density = nef_log_pdf_mixture(p, MixingFamily::gamma(), 0.0);
  return out;
}

// IG latent: GIG(a, b, -1) posterior, b > 0 always.
Posterior ig_posterior(double y, const NefParams& p, bool full) {
  const GigParams g = posterior_gig(p, MixingFamily::inverse_gaussian(), y);
  const double x = std::sqrt(g.a * g.b);
  const double log_r = std::log(g.b / g.a);
  double lk[4];  // K_0 .. K_3; K_{-n} = K_n
  log_bessel_k_run(0.0, x, lk);

  Posterior out;
  EStepRecord& r = out.rec;
  r.alpha = std::exp(0.5 * log_r + lk[0] - lk[1]);
  r.gamma = std::exp(-0.5 * log_r + lk[2] - lk[1]);
  r.delta = -0.5 * r.gamma;
  if (full) {
    r.lambda2 = g.b / g.a;
    r.rho = std::exp(-log_r + lk[3] - lk[1]);
    r.tau = -0.5;
    r.nu = 0.25 * r.rho;
    r.varphi = -0.5 * r.rho;
  }
  const double s2 = p.sigma2;
  out.log_density = -std::log(std::numbers::pi) + 0.5 * std::log(p.phi / s2) +
                    y * p.mu / s2 + p.phi + lk[1] +
                    0.5 * std::log((p.mu * p.mu + s2 * p.phi) / (y * y + s2 * p.phi));
  return out;
}

Posterior posterior(double y, const NefParams& p, const MixingFamily& fam,
                    bool full) {
  fam.require_density("e_step");
  if (fam.tag() == FamilyTag::InverseGaussian) return ig_posterior(y, p, full);
  if (y == 0.0) return gamma_posterior_at_zero(p, full);
  return gamma_posterior(y, p, full);
}

// E-step over all observations; returns the observed log-likelihood at p.
double e_step_into(std::span<const double> data, const NefParams& p,
                   const MixingFamily& fam, bool full,
                   std::vector<EStepRecord>& out) {
  p.validate();
  out.resize(data.size());
  const auto n = static_cast<std::int64_t>(data.size());
  double ll = 0.0;
  detail::FirstError failure;
#pragma omp parallel for schedule(static) reduction(+ : ll)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      const auto idx = static_cast<std::size_t>(i);
      const Posterior post = posterior(data[idx], p, fam, full);
      out[idx] = post.rec;
      ll += post.log_density;
    } catch (...) {
      failure.capture();
    }
  }
  failure.rethrow();
  return ll;
}

double rel_change(const NefParams& next, const NefParams& cur) {
  const double dm = next.mu - cur.mu;
  const double ds = next.sigma2 - cur.sigma2;
  const double dp = next.phi - cur.phi;
  const double num = std::sqrt(dm * dm + ds * ds + dp * dp);
  const double den = std::sqrt(cur.mu * cur.mu + cur.sigma2 * cur.sigma2 +
                               cur.phi * cur.phi);
  return num / den;
}

}  // namespace

std::string_view to_string(FitMethod m) {
  switch (m) {
    case FitMethod::MM:
      return "MM";
    case FitMethod::EM:
      return "EM";
    case FitMethod::NormalMLE:
      return "NormalMLE";
  }
  return "?";
}

SampleMoments SampleMoments::of(std::span<const double> data) {
  SampleMoments m;
  if (data.empty()) return m;
  for (double y : data) {
    m.m1 += y;
    m.m2 += y * y;
    m.m3 += y * y * y;
  }
  const double n = static_cast<double>(data.size());
  m.m1 /= n;
  m.m2 /= n;
  m.m3 /= n;
  return m;
}

MomentEstimate method_of_moments(const SampleMoments& m, const MixingFamily& fam) {
  const double m1 = m.m1;
  const double m2 = m.m2;
  const double m3 = m.m3;
  const double b2 = fam.b2();
  const double m1sq = m1 * m1;
  const double m1cu = m1sq * m1;

  // (3 M1 M2 - 2 M1^3 - M3) phi^2 + b2 (3 M1 M2 - 3 M1^3) phi
  //   + M1^3 (b3 - 3 b2^2) = 0
  const double qa = 3.0 * m1 * m2 - 2.0 * m1cu - m3;
  const double qb = b2 * (3.0 * m1 * m2 - 3.0 * m1cu);
  const double qc = m1cu * (fam.b3() - 3.0 * b2 * b2);

  std::vector<double> roots;
  const double scale = std::max({std::abs(qa), std::abs(qb), std::abs(qc)});
  if (scale == 0.0 || std::abs(qa) <= 1e-14 * scale) {
    if (qb != 0.0) roots.push_back(-qc / qb);
  } else {
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc >= 0.0) {
      // Numerically stable pair.
      const double sq = std::sqrt(disc);
      const double q = -0.5 * (qb + std::copysign(sq, qb));
      if (q != 0.0) {
        roots.push_back(q / qa);
        roots.push_back(qc / q);
      } else {
        roots.push_back(0.0);
      }
    }
  }

  int admissible = 0;
  MomentEstimate best;
  double best_sigma2 = -kInf;
  for (double phi : roots) {
    if (!(phi > 0.0) || !std::isfinite(phi)) continue;
    const double sigma2 = m2 - m1sq * (1.0 + b2 / phi);
    if (!(sigma2 > 0.0)) continue;
    ++admissible;
    if (sigma2 > best_sigma2) {
      best_sigma2 = sigma2;
      best.params = NefParams{m1, sigma2, phi};
    }
  }
  if (admissible == 0) {
    throw InadmissibleEstimate(
        "method of moments: no root with phi > 0 and sigma2 > 0");
  }
  best.multiple_roots = admissible > 1;
  return best;
}

MomentEstimate method_of_moments(std::span<const double> data,
                                 const MixingFamily& fam) {
  if (data.size() < 3) throw DomainError("method_of_moments: need at least 3 points");
  const SampleMoments m = SampleMoments::of(data);
  if (!(m.m2 - m.m1 * m.m1 > 0.0)) {
    throw DomainError("method_of_moments: zero sample variance");
  }
  return method_of_moments(m, fam);
}

EStepRecord e_step_record(double y, const NefParams& p, const MixingFamily& fam,
                          bool full) {
  p.validate();
  return posterior(y, p, fam, full).rec;
}

std::vector<EStepRecord> e_step(std::span<const double> data, const NefParams& p,
                                const MixingFamily& fam, bool full) {
  std::vector<EStepRecord> out;
  e_step_into(data, p, fam, full, out);
  return out;
}

std::vector<EStepRecord> e_step_serial(std::span<const double> data,
                                       const NefParams& p,
                                       const MixingFamily& fam, bool full) {
  p.validate();
  std::vector<EStepRecord> out;
  out.reserve(data.size());
  for (double y : data) out.push_back(posterior(y, p, fam, full).rec);
  return out;
}

NefParams m_step(std::span<const double> data,
                 std::span<const EStepRecord> estep, const MixingFamily& fam) {
  if (data.size() != estep.size() || data.empty()) {
    throw DomainError("m_step: data and E-step records must align");
  }
  fam.require_density("m_step");
  const double n = static_cast<double>(data.size());
  double sum_y = 0.0;
  double sum_alpha = 0.0;
  double sum_delta = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    sum_y += data[i];
    sum_alpha += estep[i].alpha;
    sum_delta += estep[i].delta;
  }
  NefParams next;
  next.mu = sum_y / sum_alpha;
  double ss = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double y = data[i];
    ss += ypow_times(y, 2, estep[i].gamma) - 2.0 * next.mu * y +
          next.mu * next.mu * estep[i].alpha;
  }
  next.sigma2 = ss / n;
  if (!(next.sigma2 > 0.0) || !std::isfinite(next.sigma2)) {
    throw MStepDomainError("sigma2 update is not positive");
  }
  const double xi0 = fam.xi0();
  const double arg = fam.b(xi0) - xi0 * sum_alpha / n - sum_delta / n;
  next.phi = fam.d1_inverse(arg);
  return next;
}

double loglik(std::span<const double> data, const NefParams& p,
              const MixingFamily& fam) {
  p.validate();
  const auto n = static_cast<std::int64_t>(data.size());
  double ll = 0.0;
  detail::FirstError failure;
#pragma omp parallel for schedule(static) reduction(+ : ll)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      ll += nef_log_pdf(p, fam, data[static_cast<std::size_t>(i)]);
    } catch (...) {
      failure.capture();
    }
  }
  failure.rethrow();
  return ll;
}

FitResult em_fit(std::span<const double> data, const MixingFamily& fam,
                 const EmOptions& options) {
  if (data.size() < 3) throw DomainError("em_fit: need at least 3 observations");
  fam.require_density("em_fit");
  FitResult result;
  result.method = FitMethod::EM;
  if (options.init) {
    result.init = *options.init;
    result.init_from_moments = false;
  } else {
    try {
      result.init = method_of_moments(data, fam).params;
      result.init_from_moments = true;
    } catch (const InadmissibleEstimate&) {
      const SampleMoments m = SampleMoments::of(data);
      result.init = NefParams{m.m1, m.m2 - m.m1 * m.m1, 1.0};
      result.init_from_moments = false;
    }
  }
  result.init.validate();

  NefParams cur = result.init;
  std::vector<EStepRecord> records;
  for (int it = 1; it <= options.max_iter; ++it) {
    const double ll = e_step_into(data, cur, fam, false, records);
    result.loglik_trace.push_back(ll);
    NefParams next;
    try {
      next = m_step(data, records, fam);
    } catch (const MStepDomainError& e) {
      throw std::runtime_error("EM iteration " + std::to_string(it) + ": " + e.what());
    }
    const double change = rel_change(next, cur);
    cur = next;
    result.iterations = it;
    if (change < options.epsilon) {
      result.converged = true;
      break;
    }
  }
  result.params = cur;
  if (options.standard_errors) {
    const ObservedInformation info = observed_information(data, cur, fam);
    result.std_errors = info.std_errors();
    result.loglik_trace.push_back(loglik(data, cur, fam));
  } else {
    result.loglik_trace.push_back(loglik(data, cur, fam));
  }
  return result;
}

std::optional<StdErrors> ObservedInformation::std_errors() const {
  if (singular) return std::nullopt;
  Eigen::LLT<Eigen::Matrix3d> llt(matrix);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const Eigen::Matrix3d inv = llt.solve(Eigen::Matrix3d::Identity());
  StdErrors se;
  for (int i = 0; i < 3; ++i) {
    if (!(inv(i, i) > 0.0) || !std::isfinite(inv(i, i))) return std::nullopt;
    se[static_cast<std::size_t>(i)] = std::sqrt(inv(i, i));
  }
  return se;
}

ObservedInformation observed_information(std::span<const double> data,
                                         const NefParams& p,
                                         const MixingFamily& fam) {
  const std::vector<EStepRecord> rec = e_step(data, p, fam, true);
  const double mu = p.mu;
  const double s2 = p.sigma2;
  const double s4 = s2 * s2;
  const double xi0 = fam.xi0();
  const double c = fam.d1(p.phi) - fam.b(xi0);  // phi score constant

  Eigen::Matrix3d curvature = Eigen::Matrix3d::Zero();  // sum E[-d2 l_i]
  Eigen::Matrix3d second = Eigen::Matrix3d::Zero();     // sum E[s_i s_i^T]
  Eigen::Matrix3d outer = Eigen::Matrix3d::Zero();      // sum E[s_i] E[s_i]^T

  for (std::size_t i = 0; i < data.size(); ++i) {
    const double y = data[i];
    const EStepRecord& r = rec[i];

    // q = y^2/w - 2 mu y + mu^2 w, the sigma2 score is (q - sigma2)/(2 sigma2^2).
    const double eq = ypow_times(y, 2, r.gamma) - 2.0 * mu * y + mu * mu * r.alpha;
    const double eqw = y * y - 2.0 * mu * y * r.alpha + mu * mu * r.lambda2;
    const double eqg = ypow_times(y, 2, r.varphi) - 2.0 * mu * y * r.delta + mu * mu * r.tau;
    const double eq2 = ypow_times(y, 4, r.rho) + 6.0 * mu * mu * y * y +
                       std::pow(mu, 4) * r.lambda2 - ypow_times(y, 3, r.gamma) * 4.0 * mu -
                       4.0 * std::pow(mu, 3) * y * r.alpha;

    Eigen::Vector3d es;
    es(0) = (y - mu * r.alpha) / s2;
    es(1) = (eq - s2) / (2.0 * s4);
    es(2) = c + xi0 * r.alpha + r.delta;

    Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
    h(0, 0) = r.alpha / s2;
    h(0, 1) = h(1, 0) = (y - mu * r.alpha) / s4;
    h(1, 1) = -0.5 / s4 + eq / (s4 * s2);
    h(2, 2) = -fam.d2(p.phi);

    Eigen::Matrix3d ss;
    // E[(y - mu w)^2]
    ss(0, 0) = (y * y - 2.0 * mu * y * r.alpha + mu * mu * r.lambda2) / s4;
    // E[(y - mu w)(q - s2)] = y E[q] - mu E[w q] - s2 (y - mu alpha)
    ss(0, 1) = (y * eq - mu * eqw - s2 * (y - mu * r.alpha)) / (2.0 * s4 * s2);
    // E[(q - s2)^2]
    ss(1, 1) = (eq2 - 2.0 * s2 * eq + s2 * s2) / (4.0 * s4 * s4);
    // E[(y - mu w)(c + xi0 w + g)]
    ss(0, 2) = ((y - mu * r.alpha) * c + xi0 * (y * r.alpha - mu * r.lambda2) +
                (y * r.delta - mu * r.tau)) /
               s2;
    // E[(q - s2)(c + xi0 w + g)]
    ss(1, 2) = ((eq - s2) * c + xi0 * (eqw - s2 * r.alpha) + (eqg - s2 * r.delta)) /
               (2.0 * s4);
    // E[(c + xi0 w + g)^2]
    ss(2, 2) = c * c + xi0 * xi0 * r.lambda2 + r.nu + 2.0 * c * xi0 * r.alpha +
               2.0 * c * r.delta + 2.0 * xi0 * r.tau;
    ss(1, 0) = ss(0, 1);
    ss(2, 0) = ss(0, 2);
    ss(2, 1) = ss(1, 2);

    curvature += h;
    second += ss;
    outer += es * es.transpose();
  }

  // E[S S^T | y] = sum_i E[s_i s_i^T] + sum_{i != j} E[s_i] E[s_j]^T, and
  // Louis adds back E[S | y] E[S | y]^T, so only the per-observation
  // covariances survive. The score need not vanish.
  ObservedInformation info;
  info.matrix = curvature - (second - outer);
  info.matrix = 0.5 * (info.matrix + info.matrix.transpose()).eval();
  if (!info.matrix.allFinite()) {
    info.singular = true;
    return info;
  }
  Eigen::LLT<Eigen::Matrix3d> llt(info.matrix);
  info.singular = llt.info() != Eigen::Success;
  return info;
}

FitResult normal_mle(std::span<const double> data) {
  if (data.size() < 2) throw DomainError("normal_mle: need at least 2 observations");
  const double n = static_cast<double>(data.size());
  double mean = 0.0;
  for (double y : data) mean += y;
  mean /= n;
  double ss = 0.0;
  for (double y : data) ss += (y - mean) * (y - mean);
  const double var = ss / n;

  FitResult r;
  r.method = FitMethod::NormalMLE;
  r.params = NefParams{mean, var, kInf};
  r.init = r.params;
  r.init_from_moments = false;
  r.converged = true;
  r.iterations = 0;
  r.std_errors = StdErrors{std::sqrt(var / n), var * std::sqrt(2.0 / n), kInf};
  double ll = 0.0;
  for (double y : data) {
    ll += -0.5 * std::log(2.0 * std::numbers::pi * var) - 0.5 * (y - mean) * (y - mean) / var;
  }
  r.loglik_trace = {ll};
  return r;
}

}  // namespace nef
