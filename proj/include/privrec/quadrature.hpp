// Adaptive Simpson quadrature used by the exact Laplace selection-probability
// oracle.  Recursive bisection with the classical (S_left + S_right - S)/15
// error estimate.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace privrec {

namespace detail {

inline double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double adaptive_step(const F& f, double a, double fa, double b, double fb,
                     double m, double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Integrates f over [a, b] to absolute tolerance tol.
template <typename F>
double adaptive_simpson(const F& f, double a, double b, double tol,
                        int max_depth = 40) {
  if (a >= b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = detail::simpson(a, fa, b, fb, fm);
  return detail::adaptive_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

// Integrates f over [a, b] to absolute tolerance tol, splitting at the given
// interior breakpoints first (the integrand's derivative kinks there; Simpson
// converges poorly across a kink, so each smooth piece is integrated
// separately with a proportional share of the tolerance budget).
template <typename F>
double adaptive_simpson_piecewise(const F& f, double a, double b,
                                 std::vector<double> breaks, double tol) {
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> cuts;
  cuts.push_back(a);
  for (double x : breaks) {
    if (x > cuts.back() && x < b) cuts.push_back(x);
  }
  cuts.push_back(b);
  const double piece_tol = tol / static_cast<double>(cuts.size() - 1);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += adaptive_simpson(f, cuts[i], cuts[i + 1], piece_tol);
  }
  return total;
}

}  // namespace privrec
