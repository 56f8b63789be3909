#pragma once

// Bracketed scalar root finding: geometric bracket expansion and a
// bisection-safeguarded inverse-quadratic/secant iteration (Brent's method).

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "jafit/errors.hpp"

namespace jafit {

struct Bracket {
  double lo;
  double hi;
};

struct RootConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-14;
  int max_iter = 200;
  std::optional<Bracket> bracket;
  /// Called with the current bracket after every iteration.
  std::function<void(double, double)> observer;

  void validate() const;
};

struct RootResult {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
};

/// Grows an interval geometrically away from x0 until f changes sign between
/// two consecutive probes. Probes keep the sign of x0 (positive x0 only ever
/// probes positive abscissae); x0 == 0 probes symmetrically. The returned
/// bracket is the tightest pair of probes enclosing the sign change; lo == hi
/// means f(x0) is exactly zero.
Bracket expand_bracket(const std::function<double(double)>& f, double x0, double grow = 2.0,
                       int max_expansions = 64);

namespace detail {
inline bool same_sign(double a, double b) { return (a > 0.0) == (b > 0.0); }
}  // namespace detail

/// Brent's method on cfg.bracket. Stops once the enclosing bracket is no wider
/// than abs_tol + rel_tol*|x| (plus a few ulps), or on an exact zero.
template <class F>
RootResult find_root(F&& f, const RootConfig& cfg) {
  cfg.validate();
  if (!cfg.bracket) throw Error(ErrorCode::InvalidBracket, "no bracket supplied");

  double a = cfg.bracket->lo;
  double b = cfg.bracket->hi;
  double fa = f(a);
  double fb = f(b);
  if (!std::isfinite(fa) || !std::isfinite(fb))
    throw Error(ErrorCode::InvalidBracket, "function is not finite at the bracket ends");
  if (fa == 0.0) return {a, fa, 0};
  if (fb == 0.0) return {b, fb, 0};
  if (detail::same_sign(fa, fb))
    throw Error(ErrorCode::InvalidBracket, "f(lo) and f(hi) have the same sign on [" +
                                               std::to_string(a) + ", " + std::to_string(b) + "]");

  constexpr double eps = std::numeric_limits<double>::epsilon();
  double c = a;
  double fc = fa;
  double d = b - a;
  double e = d;

  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    if (detail::same_sign(fb, fc)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * eps * std::abs(b) + 0.5 * (cfg.abs_tol + cfg.rel_tol * std::abs(b));
    const double xm = 0.5 * (c - b);
    if (cfg.observer) cfg.observer(std::min(b, c), std::max(b, c));
    if (std::abs(xm) <= tol || fb == 0.0) return {b, fb, iter};

    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double p;
      double q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      const double min1 = 3.0 * xm * q - std::abs(tol * q);
      const double min2 = std::abs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol) ? d : std::copysign(tol, xm);
    fb = f(b);
    if (!std::isfinite(fb))
      throw Error(ErrorCode::NoConvergence, "function became non-finite at x=" + std::to_string(b));
  }
  throw Error(ErrorCode::NoConvergence,
              "root not converged within " + std::to_string(cfg.max_iter) + " iterations");
}

}  // namespace jafit
