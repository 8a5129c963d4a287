#pragma once

// Scalar root bracketing and bounded scalar maximisation (Brent's methods).

#include <cmath>
#include <limits>
#include <utility>

namespace cape::optimize {

struct RootResult {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
};

// Zero of f on [lo, hi] where f(lo) and f(hi) have opposite signs (or one is
// zero). Combines bisection, secant and inverse quadratic interpolation and
// stops once the bracket is no wider than 4*eps*|x| + xtol.
template <class F>
RootResult find_root(F&& f, double lo, double hi, double xtol = 0.0, int max_iter = 500) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return {a, fa, 0};
  if (fb == 0.0) return {b, fb, 0};
  double c = a, fc = fa;
  double d = b - a, e = d;
  int it = 0;
  for (; it < max_iter; ++it) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol = 2.0 * eps * std::fabs(b) + 0.5 * xtol;
    const double m = 0.5 * (c - b);
    if (std::fabs(m) <= tol || fb == 0.0) break;
    if (std::fabs(e) < tol || std::fabs(fa) <= std::fabs(fb)) {
      d = e = m;
    } else {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      else p = -p;
      if (2.0 * p < std::fmin(3.0 * m * q - std::fabs(tol * q), std::fabs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = e = m;
      }
    }
    a = b;
    fa = fb;
    b += (std::fabs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
    fb = f(b);
  }
  return {b, fb, it};
}

struct MaxResult {
  double x = 0.0;
  double fx = 0.0;
  int evaluations = 0;
};

// Maximiser of f on [lo, hi] by golden-section search with parabolic
// acceleration. Converges to a local maximum; for the unimodal log-likelihoods
// used here that is the interior maximum whenever one exists.
template <class F>
MaxResult maximize_bounded(F&& f, double lo, double hi, double abs_tol = 1e-10,
                           int max_iter = 500) {
  constexpr double golden = 0.3819660112501051;  // (3 - sqrt(5)) / 2
  const double rel_tol = std::sqrt(std::numeric_limits<double>::epsilon()) * 1e-2;
  auto g = [&](double x) { return -f(x); };

  double a = lo, b = hi;
  double v = a + golden * (b - a);
  double w = v, x = v;
  double fx = g(x);
  double fv = fx, fw = fx;
  double d = 0.0, e = 0.0;
  int evals = 1;

  for (int it = 0; it < max_iter; ++it) {
    const double m = 0.5 * (a + b);
    const double tol = rel_tol * std::fabs(x) + abs_tol / 3.0;
    const double t2 = 2.0 * tol;
    if (std::fabs(x - m) <= t2 - 0.5 * (b - a)) break;

    double p = 0.0, q = 0.0, r = 0.0;
    if (std::fabs(e) > tol) {
      r = (x - w) * (fx - fv);
      q = (x - v) * (fx - fw);
      p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      else q = -q;
      r = e;
      e = d;
    }
    if (std::fabs(p) < std::fabs(0.5 * q * r) && p > q * (a - x) && p < q * (b - x)) {
      d = p / q;
      const double u = x + d;
      if ((u - a) < t2 || (b - u) < t2) d = (x < m) ? tol : -tol;
    } else {
      e = (x < m) ? b - x : a - x;
      d = golden * e;
    }
    const double u = x + ((std::fabs(d) >= tol) ? d : (d > 0.0 ? tol : -tol));
    const double fu = g(u);
    ++evals;
    if (fu <= fx) {
      if (u < x) b = x;
      else a = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      if (u < x) a = u;
      else b = u;
      if (fu <= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }
  return {x, -fx, evals};
}

}  // namespace cape::optimize
