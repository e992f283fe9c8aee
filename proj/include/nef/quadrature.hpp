#pragma once

// Adaptive quadrature of unimodal integrands given in log scale.
//
// Used for GIG log-moments, the mixture-integral density and the
// Poisson-mixture pmf. The caller supplies log f(s) on the whole real line;
// the integral is taken over a window around the mode outside of which
// log f has dropped by more than `kDrop`.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

namespace nef::quad {

inline constexpr double kDrop = 46.0;  // exp(-46) ~ 1e-20
// Bisection depth cap: a tolerance near roundoff would otherwise recurse
// to 2^20 panels.
inline constexpr unsigned kMaxDepth = 12;

struct Window {
  double mode = 0.0;
  double peak = 0.0;  // log f(mode)
  double lo = 0.0;
  double hi = 0.0;
};

template <class LogF>
Window find_window(LogF&& logf, double hint, double hint_scale = 1.0) {
  double step = hint_scale > 0.0 ? hint_scale : 1.0;
  double x0 = hint;
  double f0 = logf(x0);
  double left = x0 - step;
  double right = x0 + step;
  double fl = logf(left);
  double fr = logf(right);
  // March uphill until the mode is bracketed.
  for (int i = 0; i < 200 && fr > f0; ++i) {
    left = x0;
    fl = f0;
    x0 = right;
    f0 = fr;
    step *= 2.0;
    right = x0 + step;
    fr = logf(right);
  }
  for (int i = 0; i < 200 && fl > f0; ++i) {
    right = x0;
    fr = f0;
    x0 = left;
    f0 = fl;
    step *= 2.0;
    left = x0 - step;
    fl = logf(left);
  }
  auto neg = [&](double s) {
    double v = logf(s);
    return std::isfinite(v) ? -v : std::numeric_limits<double>::max();
  };
  std::uintmax_t iters = 200;
  auto best = boost::math::tools::brent_find_minima(neg, left, right, 40, iters);
  Window w;
  w.mode = best.first;
  w.peak = -best.second;
  if (f0 > w.peak) {
    w.mode = x0;
    w.peak = f0;
  }

  // Local width from the curvature at the mode.
  const double e = 1e-3 * std::max(1.0, std::abs(w.mode));
  const double curv =
      -(logf(w.mode + e) - 2.0 * w.peak + logf(w.mode - e)) / (e * e);
  double width = (curv > 0.0 && std::isfinite(curv)) ? 1.0 / std::sqrt(curv)
                                                     : 1.0;
  width = std::max(width, 1e-12 * std::max(1.0, std::abs(w.mode)));

  double d = width;
  while (d < 1e6 && logf(w.mode - d) > w.peak - kDrop) d *= 1.6;
  w.lo = w.mode - d;
  d = width;
  while (d < 1e6 && logf(w.mode + d) > w.peak - kDrop) d *= 1.6;
  w.hi = w.mode + d;
  return w;
}

// Integral over [lo, hi] of weight(s) * exp(logf(s) - peak), split at the mode.
template <class LogF, class Weight>
double integrate_scaled(const Window& w, LogF&& logf, Weight&& weight,
                        double tol = 1e-12) {
  using boost::math::quadrature::gauss_kronrod;
  auto f = [&](double s) {
    double v = logf(s) - w.peak;
    return v < -700.0 ? 0.0 : weight(s) * std::exp(v);
  };
  const double left = gauss_kronrod<double, 31>::integrate(f, w.lo, w.mode, kMaxDepth, tol);
  const double right = gauss_kronrod<double, 31>::integrate(f, w.mode, w.hi, kMaxDepth, tol);
  return left + right;
}

// log of the integral of exp(logf) over the real line.
template <class LogF>
double log_integral(LogF&& logf, double hint, double hint_scale = 1.0) {
  const Window w = find_window(logf, hint, hint_scale);
  const double mass = integrate_scaled(w, logf, [](double) { return 1.0; });
  return w.peak + std::log(mass);
}

// E[weight(S)] when S has density proportional to exp(logf).
template <class LogF, class Weight>
double expectation(LogF&& logf, Weight&& weight, double hint,
                   double hint_scale = 1.0) {
  const Window w = find_window(logf, hint, hint_scale);
  const double mass = integrate_scaled(w, logf, [](double) { return 1.0; });
  return integrate_scaled(w, logf, weight) / mass;
}

}  // namespace nef::quad
