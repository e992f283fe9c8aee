// End-to-end acceptance run. One PASS/FAIL line per check, nonzero exit if
// any check fails. Takes a few minutes on one core.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/exp_sinh.hpp>

#include "cli/commands.hpp"
#include "nef/estimation.hpp"
#include "nef/mp_sums.hpp"
#include "nef/nef.hpp"
#include "nef/stability.hpp"
#include "nef/study.hpp"
#include "posterior_grid.hpp"

using nef::MixingFamily;
using nef::NefParams;

namespace {

constexpr std::uint64_t kSeed = nef::cli::kDefaultSeed;
const MixingFamily kGamma = MixingFamily::gamma();
const MixingFamily kIg = MixingFamily::inverse_gaussian();

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("[%s] %2d %s: %s\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += !ok;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

struct Study {
  nef::StudyConfig cfg;
  nef::StudySummary summary;
};

Study run_study(const MixingFamily& fam, std::size_t n, std::size_t replicas) {
  Study s;
  s.cfg.family = fam;
  s.cfg.truth = NefParams{3.0, 4.0, 2.0};
  s.cfg.n = n;
  s.cfg.replicas = replicas;
  s.cfg.seed = kSeed;
  s.summary = nef::summarize(s.cfg, nef::run_replicas(s.cfg));
  return s;
}

bool within(double got, double want, double rel) { return std::abs(got - want) <= rel * want; }

// empirical SDs and mean SEs against reference triples, 10% each
void check_table(int id, const std::string& what, const Study& s, const std::array<double, 3>& sd,
                 const std::array<double, 3>& se) {
  bool ok = s.summary.used > 0;
  std::ostringstream d;
  d << "used " << s.summary.used << "/" << s.summary.requested << "; sd";
  for (int k = 0; k < 3; ++k) {
    const auto& p = s.summary.params[k];
    const double v = p.empirical_sd.value_or(std::numeric_limits<double>::quiet_NaN());
    ok = ok && within(v, sd[k], 0.10);
    d << " " << fmt(v) << "(" << sd[k] << ")";
  }
  d << "; se";
  for (int k = 0; k < 3; ++k) {
    const auto& p = s.summary.params[k];
    const double v = p.mean_std_error.value_or(std::numeric_limits<double>::quiet_NaN());
    ok = ok && within(v, se[k], 0.10);
    d << " " << fmt(v) << "(" << se[k] << ")";
  }
  report(id, ok, what, d.str());
}

Eigen::Vector3d vec(const NefParams& p) { return {p.mu, p.sigma2, p.phi}; }
NefParams params(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }

Eigen::Matrix3d neg_hessian(const std::function<double(const Eigen::Vector3d&)>& f, const Eigen::Vector3d& x,
                            const Eigen::Vector3d& h) {
  Eigen::Matrix3d out;
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      auto at = [&](double si, double sj) {
        Eigen::Vector3d y = x;
        y[i] += si * h[i];
        y[j] += sj * h[j];
        return f(y);
      };
      out(i, j) = -(at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h[i] * h[j]);
      out(j, i) = out(i, j);
    }
  }
  return out;
}

// unbiased k-statistics k1..k4
std::array<double, 4> k_statistics(const double* x, std::size_t n) {
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += x[i];
  mean /= double(n);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  const double N = double(n);
  m2 /= N;
  m3 /= N;
  m4 /= N;
  const double k2 = N / (N - 1.0) * m2;
  const double k3 = N * N / ((N - 1.0) * (N - 2.0)) * m3;
  const double k4 = N * N * ((N + 1.0) * m4 - 3.0 * (N - 1.0) * m2 * m2) / ((N - 1.0) * (N - 2.0) * (N - 3.0));
  return {mean, k2, k3, k4};
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();

  // ---- Monte Carlo tables, small-n behaviour, MM admissibility ----
  const Study ng = run_study(kGamma, 1000, 1000);
  check_table(1, "NG n=1000 standard errors", ng, {0.0910, 0.2957, 0.1851}, {0.0922, 0.2948, 0.1846});
  const Study nig = run_study(kIg, 1000, 1000);
  check_table(2, "NIG n=1000 standard errors", nig, {0.0903, 0.2765, 0.2295}, {0.0921, 0.2827, 0.2254});

  const Study ng30 = run_study(kGamma, 30, 2000);
  const Study ng100 = run_study(kGamma, 100, 2000);
  const Study nig30 = run_study(kIg, 30, 2000);
  const Study nig100 = run_study(kIg, 100, 2000);
  {
    const double a = *ng30.summary.params[2].empirical_sd / *ng100.summary.params[2].empirical_sd;
    const double b = *nig30.summary.params[2].empirical_sd / *nig100.summary.params[2].empirical_sd;
    report(3, a > 3.0 && b > 3.0, "SD(phi) inflation from n=100 to n=30",
           "NG " + fmt(*ng100.summary.params[2].empirical_sd) + " -> " + fmt(*ng30.summary.params[2].empirical_sd) +
               " (x" + fmt(a) + "), NIG " + fmt(*nig100.summary.params[2].empirical_sd) + " -> " +
               fmt(*nig30.summary.params[2].empirical_sd) + " (x" + fmt(b) + ")");
  }
  {
    const double a = ng30.summary.mm_inadmissible_rate;
    const double b = nig30.summary.mm_inadmissible_rate;
    report(4, a >= 0.04 && a <= 0.09 && b >= 0.015 && b <= 0.05, "MM inadmissible rate at n=30",
           "NG " + fmt(100 * a) + "% in [4,9], NIG " + fmt(100 * b) + "% in [1.5,5]");
  }

  // ---- asymmetric Laplace ----
  {
    double worst = 0.0;
    for (const auto& [mu, s2] : {std::pair{0.8, 1.5}, std::pair{-2.0, 0.3}, std::pair{0.0, 1.0}, std::pair{3.0, 9.0}}) {
      for (int i = 0; i <= 2000; ++i) {
        const double y = -10.0 + 0.01 * i;
        const double d = std::abs(nef::nef_pdf(NefParams{mu, s2, 1.0}, kGamma, y) - nef::asymmetric_laplace_pdf(mu, s2, y));
        worst = std::max(worst, std::isnan(d) ? std::numeric_limits<double>::infinity() : d);
      }
    }
    report(5, worst < 1e-10, "NG phi=1 equals asymmetric Laplace", "max |diff| " + fmt(worst) + " over 4 x 2001 points");
  }

  // ---- PIG-stable composition ----
  {
    double worst = 0.0;
    for (const NefParams& p : {NefParams{0.0, 1.0, 2.0}, NefParams{1.2, 0.5, 0.6}, NefParams{-0.7, 3.0, 8.0}}) {
      const auto spec = nef::StableCfSpec::normal_drift(p.mu, p.sigma2);
      for (int i = 0; i <= 400; ++i) {
        const double t = -20.0 + 0.1 * i;
        worst = std::max(worst, std::abs(nef::mp_stable_cf(kIg, p.phi, spec, t) - nef::nef_cf(p, kIg, t)));
      }
    }
    report(6, worst < 1e-12, "PIG-stable composition equals NIG cf", "max |diff| " + fmt(worst) + " over 3 x 401 points");
  }

  // ---- posterior expectations ----
  {
    const auto rep = oracle::check_posterior_grid(1e-6);
    report(7, rep.failures == 0 && rep.records > 0, "E-step fields vs posterior quadrature",
           std::to_string(rep.records) + " observations x 8 fields, worst rel " + fmt(rep.worst) +
               (rep.failures ? "; first failure " + rep.first_failure : ""));
  }

  // ---- EM ascent over every fit above ----
  {
    std::size_t v = 0, fits = 0;
    for (const Study* s : {&ng, &nig, &ng30, &ng100, &nig30, &nig100}) {
      v += s->summary.monotonicity_violations;
      fits += s->summary.used;
    }
    report(8, v == 0, "EM log-likelihood never decreases", std::to_string(v) + " violations in " + std::to_string(fits) + " fits");
  }

  // ---- Louis information against the numerical Hessian ----
  {
    double worst = 0.0;
    std::string where;
    int datasets = 0;
    for (const MixingFamily& fam : {kGamma, kIg}) {
      for (int k = 0; k < 10; ++k) {
        nef::Rng rng = nef::stream_for(kSeed, 5000 + 100 * (fam == kIg) + k);
        const auto y = nef::sample_nef(NefParams{3, 4, 2}, fam, 500, rng);
        nef::EmOptions opt;
        opt.epsilon = 1e-8;
        opt.max_iter = 10000;
        const auto fit = nef::em_fit(y, fam, opt);
        const auto info = nef::observed_information(y, fit.params, fam);
        const Eigen::Vector3d x = vec(fit.params);
        const Eigen::Matrix3d num =
            neg_hessian([&](const Eigen::Vector3d& v) { return nef::loglik(y, params(v), fam); }, x, 1e-4 * x.cwiseAbs());
        ++datasets;
        for (int i = 0; i < 3; ++i) {
          for (int j = 0; j < 3; ++j) {
            const double rel = std::abs(info.matrix(i, j) - num(i, j)) / std::abs(num(i, j));
            if (!(rel <= worst)) {
              worst = std::isnan(rel) ? std::numeric_limits<double>::infinity() : rel;
              where = std::string(fam.name()) + " dataset " + std::to_string(k) + " entry (" + std::to_string(i) + "," +
                      std::to_string(j) + ") " + fmt(info.matrix(i, j)) + " vs " + fmt(num(i, j));
            }
          }
        }
      }
    }
    report(9, worst < 0.01, "Louis information vs finite-difference Hessian",
           std::to_string(datasets) + " datasets, worst entrywise rel " + fmt(worst) + " at " + where);
  }

  // ---- weak convergence of normalized sums ----
  {
    const NefParams limit{1.0, 1.0, 2.0};
    const auto summand = nef::SummandSpec::exponential(1.0);
    bool ok = true;
    std::ostringstream d;
    for (const MixingFamily& fam : {kGamma, kIg}) {
      std::vector<double> ks;
      for (double lambda : {30.0, 50.0, 500.0}) {
        const auto s = nef::sample_normalized_sums(nef::MpCountParams{lambda, 2.0, fam}, summand, 2000, kSeed);
        ks.push_back(nef::ks_distance(s, limit, fam));
      }
      const bool mono = ks[0] >= ks[1] && ks[1] >= ks[2];
      ok = ok && ks[2] < 0.05 && mono;
      d << (fam == kGamma ? "NB" : " PIG") << " KS " << fmt(ks[0]) << ", " << fmt(ks[1]) << ", " << fmt(ks[2])
        << (mono ? " monotone;" : " NOT monotone;");
    }
    report(10, ok, "normalized sums approach the limit law", d.str());
  }

  // ---- normalization and cumulants ----
  {
    boost::math::quadrature::exp_sinh<double> es;
    constexpr double inf = std::numeric_limits<double>::infinity();
    constexpr std::size_t draws = 1000000, batches = 100, batch = draws / batches;
    double worst_mass = 0.0, worst_z = 0.0;
    std::string where;
    int points = 0;
    std::uint64_t stream = 9000;
    for (const MixingFamily& fam : {kGamma, kIg}) {
      for (double mu : {-1.0, 0.0, 1.5}) {
        for (double s2 : {0.5, 2.0}) {
          for (double phi : {0.4, 3.0}) {
            const NefParams p{mu, s2, phi};
            ++points;
            // NG with phi < 1/2 has an integrable pole at 0, which the rule may land on
            auto f = [&](double y) { return y == 0.0 ? 0.0 : nef::nef_pdf(p, fam, y); };
            const double mass = es.integrate(f, -inf, 0.0, 1e-12) + es.integrate(f, 0.0, inf, 1e-12);
            worst_mass = std::max(worst_mass, std::abs(mass - 1.0));

            nef::Rng rng = nef::stream_for(kSeed, stream++);
            const auto x = nef::sample_nef(p, fam, draws, rng);
            const auto k = k_statistics(x.data(), draws);
            // Monte Carlo SE from the spread of batch estimates
            std::array<double, 4> sum{}, sum2{};
            for (std::size_t b = 0; b < batches; ++b) {
              const auto kb = k_statistics(x.data() + b * batch, batch);
              for (int c = 0; c < 4; ++c) {
                sum[c] += kb[c];
                sum2[c] += kb[c] * kb[c];
              }
            }
            const auto truth = nef::nef_cumulants(p, fam);
            const double want[4] = {truth.k1, truth.k2, truth.k3, truth.k4};
            for (int c = 0; c < 4; ++c) {
              const double m = sum[c] / batches;
              const double var_b = (sum2[c] - batches * m * m) / (batches - 1.0);
              const double se = std::sqrt(var_b / batches);
              const double z = std::abs(k[c] - want[c]) / se;
              if (!(z <= worst_z)) {
                worst_z = std::isnan(z) ? inf : z;
                where = std::string(fam.name()) + " (" + fmt(mu) + "," + fmt(s2) + "," + fmt(phi) + ") k" +
                        std::to_string(c + 1);
              }
            }
          }
        }
      }
    }
    report(11, worst_mass < 1e-6 && worst_z < 3.0, "density mass and sample cumulants",
           std::to_string(points) + " parameter points, worst |mass-1| " + fmt(worst_mass) + ", worst |z| " +
               fmt(worst_z) + " at " + where);
  }

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%d failed, %.0f s\n", failures, secs);
  return failures == 0 ? 0 : 1;
}
