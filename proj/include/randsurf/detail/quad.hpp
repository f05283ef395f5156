// detail/quad.hpp -- small shared quadrature helpers (adaptive Simpson for
// real- and complex-valued integrands).

#pragma once

#include <cmath>
#include <complex>
#include <functional>

namespace randsurf::detail {

// `force` levels of subdivision are performed before the Richardson error
// estimate is trusted: symmetric integrands can make the refined composite
// rule agree with the coarse one to machine precision while both are far from
// the true integral (e.g. cos^6 sin^2 on [0, pi/2]), so a fresh panel must
// never terminate on its first estimate alone.
template <class V, class F>
V adaptive_simpson_rec(const F& f, double a, double b, V fa, V fm, V fb,
                       double tol, int depth, int force) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const V flm = f(lm), frm = f(rm);
  const V whole = (fa + 4.0 * fm + fb) * ((b - a) / 6.0);
  const V left = (fa + 4.0 * flm + fm) * ((m - a) / 6.0);
  const V right = (fm + 4.0 * frm + fb) * ((b - m) / 6.0);
  const V delta = left + right - whole;
  if (depth <= 0 || (force <= 0 && std::abs(delta) < 15.0 * tol))
    return left + right + delta * (1.0 / 15.0);
  const double child_tol = std::max(tol / 2.0, 1e-16);
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, child_tol, depth - 1,
                              force - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, child_tol, depth - 1,
                              force - 1);
}

template <class V, class F>
V integrate(const F& f, double a, double b, double tol = 1e-12) {
  const double m = 0.5 * (a + b);
  return adaptive_simpson_rec<V>(f, a, b, f(a), f(m), f(b), tol, 28, 6);
}

}  // namespace randsurf::detail
