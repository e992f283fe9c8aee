#pragma once

// Every posterior expectation the E-step reports, against quadrature over a
// 5 x 5 x 5 parameter grid and 7 observations per point, both families.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "nef/estimation.hpp"
#include "oracles.hpp"

namespace oracle {

struct GridReport {
  int records = 0;
  int failures = 0;
  double worst = 0.0;  // largest scaled error seen
  std::string first_failure;
};

inline GridReport check_posterior_grid(double rel) {
  using nef::MixingFamily;
  const double mus[] = {-2.0, -0.5, 0.0, 1.0, 3.0};
  const double s2s[] = {0.1, 0.5, 1.0, 4.0, 10.0};
  const double phis[] = {0.3, 0.8, 2.0, 5.0, 20.0};
  const double zs[] = {-3.0, -1.0, -0.3, 0.2, 1.0, 2.0, 4.0};
  GridReport rep;
  for (const MixingFamily& fam : {MixingFamily::gamma(), MixingFamily::inverse_gaussian()}) {
    const bool ig = fam.tag() == nef::FamilyTag::InverseGaussian;
    auto g = [ig](double w) { return ig ? -0.5 / w : std::log(w); };
    for (double mu : mus) {
      for (double s2 : s2s) {
        for (double phi : phis) {
          const nef::NefParams p{mu, s2, phi};
          const double sd = std::sqrt(nef::nef_cumulants(p, fam).k2);
          for (double z : zs) {
            const double y = mu + z * sd;
            if (std::abs(y) < 1e-12) continue;  // the b = 0 limit is checked on its own
            const nef::EStepRecord r = nef::e_step_record(y, p, fam, true);
            const Posterior post{ig, mu, s2, phi, y};
            const double e_w2 = post.expect([](double w) { return w * w; });
            const double e_g2 = post.expect([&](double w) { return g(w) * g(w); });
            const double e_iw2 = post.expect([](double w) { return 1.0 / (w * w); });
            struct Field {
              const char* name;
              double got;
              double want;
              double scale;  // Cauchy-Schwarz bound, for fields that can cross 0
            };
            const Field fields[] = {
                {"alpha", r.alpha, post.expect([](double w) { return w; }), 0.0},
                {"gamma", r.gamma, post.expect([](double w) { return 1.0 / w; }), 0.0},
                {"delta", r.delta, post.expect(g), std::sqrt(e_g2)},
                {"lambda2", r.lambda2, e_w2, 0.0},
                {"tau", r.tau, post.expect([&](double w) { return w * g(w); }), std::sqrt(e_w2 * e_g2)},
                {"nu", r.nu, e_g2, 0.0},
                {"rho", r.rho, e_iw2, 0.0},
                {"varphi", r.varphi, post.expect([&](double w) { return g(w) / w; }), std::sqrt(e_iw2 * e_g2)},
            };
            ++rep.records;
            for (const Field& f : fields) {
              const double err = std::abs(f.got - f.want) / std::max(std::abs(f.want), f.scale);
              rep.worst = std::max(rep.worst, err);
              if (!(err <= rel)) {
                if (rep.failures++ == 0) {
                  std::ostringstream msg;
                  msg << fam.name() << " (" << mu << "," << s2 << "," << phi << ") y=" << y << " " << f.name
                      << ": " << f.got << " vs " << f.want;
                  rep.first_failure = msg.str();
                }
              }
            }
          }
        }
      }
    }
  }
  return rep;
}

}  // namespace oracle
