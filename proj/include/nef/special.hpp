#pragma once

// Modified Bessel function of the third kind in log scale and expectations
// under the generalized inverse Gaussian law.

#include <span>

namespace nef {

/// log K_order(arg). Any real order, arg > 0. Stays finite for arg up to
/// ~1e5 and |order| up to ~1e3.
double log_bessel_k(double order, double arg);

/// log K_order(exp(log_arg)), for arguments that underflow a double.
double log_bessel_k_log_arg(double order, double log_arg);

/// log K_{order + j}(arg) for j = 0 .. out.size()-1, computed with a single
/// recurrence pass when every order in the run has the same sign.
void log_bessel_k_run(double order, double arg, std::span<double> out);

/// d/d(order) log K_order(arg), central difference with h = 1e-6 max(1,|order|).
double dlog_bessel_k_dorder(double order, double arg);

/// Kernel u^(p-1) exp{-(a u + b / u) / 2} on u > 0.
struct GigParams {
  double a = 1.0;  // > 0
  double b = 0.0;  // >= 0
  double p = 1.0;  // b == 0 requires p > 0

  void validate() const;
};

/// log of the kernel integral. b == 0 uses the gamma limit.
double gig_log_normalizer(const GigParams& g);

/// E[U^power_k (log U)^log_power_l] under GIG(a, b, p).
///
/// log_power_l == 0 is the Bessel ratio (b/a)^{k/2} K_{p+k}/K_p, or the gamma
/// moment when b == 0. log_power_l >= 1 is computed by quadrature in log u.
double gig_moment(const GigParams& g, int power_k, int log_power_l);

/// E[log U] through the order derivative of log K (no quadrature).
double gig_mean_log(const GigParams& g);

/// 1/Gamma(1 + x) for |x| <= 1/2, from its power series.
double reciprocal_gamma_1p(double x);

}  // namespace nef
