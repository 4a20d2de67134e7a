#pragma once

#include <cmath>
#include <functional>

namespace gmmsq::quad {

namespace detail {

template <class Fn>
double simpson_step(Fn& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double h = b - a;
  const double left = h / 12.0 * (fa + 4.0 * flm + fm);
  const double right = h / 12.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson on [a, b].
template <class Fn>
double adaptive_simpson(Fn&& f, double a, double b, double tol = 1e-10, int max_depth = 40) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, m, fa, fm, fb, whole, tol, max_depth);
}

/// Nested adaptive Simpson over [ax,bx] x [ay,by]; inner tolerance is tighter
/// so the outer error estimate stays meaningful.
template <class Fn2>
double adaptive_simpson_2d(Fn2&& f, double ax, double bx, double ay, double by,
                           double tol = 1e-8, int max_depth = 24) {
  auto outer = [&](double x) {
    auto inner = [&](double y) { return f(x, y); };
    return adaptive_simpson(inner, ay, by, tol * 0.05, max_depth);
  };
  return adaptive_simpson(outer, ax, bx, tol, max_depth);
}

}  // namespace gmmsq::quad
