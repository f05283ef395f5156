// specfun.cpp -- see specfun.hpp for the catalogue.

#include "randsurf/specfun.hpp"

#include <cmath>
#include <functional>
#include <limits>

namespace randsurf::specfun {

namespace {

constexpr double kPi = 3.14159265358979323846;
const cplx kI(0.0, 1.0);

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

// ------------------------------------------------------------------ Chebyshev

cplx cheb_eval(const ChebSpec& spec, cplx x, CutSide side) {
  if (!finite(x)) throw std::invalid_argument("cheb_eval: non-finite argument");
  if (!std::isfinite(spec.order))
    throw std::invalid_argument("cheb_eval: non-finite order");

  const bool on_cut = (x.imag() == 0.0) && (x.real() <= -1.0);
  cplx phi;  // x = cos(pi phi), principal branch Re phi in [0,1]
  if (on_cut) {
    if (side == CutSide::none)
      throw std::invalid_argument(
          "cheb_eval: argument on the branch cut (-inf,-1] requires a side");
    // x = -cosh(y) with y >= 0; the limit from the upper half plane stays in
    // the principal strip as phi = 1 - i y / pi, the lower limit is the
    // conjugate.
    const double y = std::acosh(-x.real());
    phi = cplx(1.0, (side == CutSide::plus ? -y : y) / kPi);
  } else {
    phi = std::acos(x) / kPi;
  }

  const double nu = spec.order;
  if (spec.kind == ChebKind::first) return std::cos(kPi * nu * phi);
  const cplx denom = std::sin(kPi * phi);
  if (std::abs(denom) < 1e-14)
    throw std::invalid_argument("cheb_eval: U_nu evaluated at x = +-1");
  return std::sin(kPi * (nu + 1.0) * phi) / denom;
}

double cheb_inverse_check(double nu, double x) {
  if (nu == 0.0) throw std::invalid_argument("cheb_inverse_check: nu = 0");
  if (!(x > -1.0 && x < 1.0))
    throw std::invalid_argument("cheb_inverse_check: x outside (-1,1)");
  const cplx t = cheb_T(nu, cplx(x, 0.0));
  const cplx back = cheb_T(1.0 / nu, t);
  return std::abs(back - cplx(x, 0.0));
}

// ------------------------------------------------------------------ thetas

namespace {

// Shared truncation policy: stop once |term| < 1e-17 |partial| (or the term
// underflows); throw if 200 paired terms do not reach that.
template <class TermFn>
cplx theta_sum(TermFn term_fn, cplx head) {
  cplx sum = head;
  for (int n = 0; n < 200; ++n) {
    const cplx term = term_fn(n);
    sum += term;
    const double at = std::abs(term);
    if (at < 1e-17 * std::abs(sum) || at < 1e-300) return sum;
  }
  throw std::runtime_error("theta_eval: series truncation not reached");
}

}  // namespace

cplx theta_eval(int j, cplx u, cplx tau) {
  if (tau.imag() <= 0.0)
    throw std::invalid_argument("theta_eval: Im tau must be positive");
  const cplx ipitau = kI * kPi * tau;
  switch (j) {
    case 1:
      return theta_sum(
          [&](int n) {
            const double h = n + 0.5;
            const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
            return 2.0 * sgn * std::exp(ipitau * h * h) *
                   std::sin((2.0 * n + 1.0) * u);
          },
          cplx(0.0));
    case 2:
      return theta_sum(
          [&](int n) {
            const double h = n + 0.5;
            return 2.0 * std::exp(ipitau * h * h) *
                   std::cos((2.0 * n + 1.0) * u);
          },
          cplx(0.0));
    case 3:
      return theta_sum(
          [&](int n) {
            const double m = n + 1.0;
            return 2.0 * std::exp(ipitau * m * m) * std::cos(2.0 * m * u);
          },
          cplx(1.0));
    default:
      throw std::invalid_argument("theta_eval: j must be 1, 2 or 3");
  }
}

cplx theta1_prime0(cplx tau) {
  if (tau.imag() <= 0.0)
    throw std::invalid_argument("theta1_prime0: Im tau must be positive");
  const cplx ipitau = kI * kPi * tau;
  return theta_sum(
      [&](int n) {
        const double h = n + 0.5;
        const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
        return 2.0 * sgn * (2.0 * n + 1.0) * std::exp(ipitau * h * h);
      },
      cplx(0.0));
}

// ------------------------------------------------------------------ torus

namespace {

// Adaptive Simpson on [a,b].
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fm, double fb, double tol,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) < 15.0 * tol)
    return left + right + delta / 15.0;
  const double child_tol = std::max(tol / 2.0, 1e-16);
  return adaptive_simpson(f, a, m, fa, flm, fm, child_tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, child_tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
  const double m = 0.5 * (a + b);
  return adaptive_simpson(f, a, b, f(a), f(m), f(b), tol, 30);
}

}  // namespace

TorusParam torus_from_band(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > alpha))
    throw std::invalid_argument("torus_from_band: need 0 < alpha < beta");
  const double k = alpha / beta;
  // K  = int_0^1 dt ((1-t^2)(1-(k t)^2))^{-1/2}           [t = sin(theta)]
  // K' = int_0^inf dt ((1+t^2)(1+(k t)^2))^{-1/2}         [t = tan(theta)]
  // Both substitutions remove the endpoint singularity / infinite range while
  // integrating exactly the stated integrands.
  auto fK = [k](double th) {
    const double s = std::sin(th);
    return 1.0 / std::sqrt(1.0 - k * k * s * s);
  };
  auto fKp = [k](double th) {
    const double c = std::cos(th), s = std::sin(th);
    return 1.0 / std::sqrt(c * c + k * k * s * s);
  };
  TorusParam tp;
  tp.alpha = alpha;
  tp.beta = beta;
  tp.K = integrate(fK, 0.0, kPi / 2.0, 1e-13);
  tp.Kprime = integrate(fKp, 0.0, kPi / 2.0 - 1e-12, 1e-13) +
              integrate(fKp, kPi / 2.0 - 1e-12, kPi / 2.0, 1e-13);
  tp.tau = cplx(0.0, tp.Kprime / tp.K);
  return tp;
}

cplx torus_w(const TorusParam& tp, cplx sigma) {
  const cplx u = kPi * sigma;
  return std::sqrt(tp.alpha * tp.beta) * theta_eval(2, u, tp.tau) /
         theta_eval(3, u, tp.tau);
}

// ------------------------------------------------------------------ g kernel

cplx g_kernel(cplx sigma, double nu, cplx tau) {
  if (tau.imag() <= 0.0)
    throw std::invalid_argument("g_kernel: Im tau must be positive");
  const cplx den = theta_eval(1, kPi * sigma, tau);
  if (std::abs(den) < 1e-250)
    throw std::invalid_argument("g_kernel: sigma on the period lattice");
  const cplx shift = kPi * nu * tau / 2.0;
  // Normalized so the pole at sigma = 0 has unit residue in sigma.
  return kPi * theta1_prime0(tau) / theta_eval(1, shift, tau) *
         theta_eval(1, kPi * sigma + shift, tau) / den *
         std::exp(kI * kPi * nu * sigma);
}

// ------------------------------------------------------------------ Airy

namespace {

// Maclaurin series: Ai(x) = c1 f(x) + c2 g(x) with
//   f = sum 3^k (1/3)_k x^{3k}/(3k)!,  g = sum 3^k (2/3)_k x^{3k+1}/(3k+1)!.
double airy_series(double x) {
  const double c1 = 0.35502805388781723926;   //  Ai(0)
  const double c2 = -0.25881940379280679841;  //  Ai'(0)
  double f = 1.0, g = x;
  double tf = 1.0, tg = x;
  const double x3 = x * x * x;
  for (int k = 1; k <= 120; ++k) {
    tf *= x3 / ((3.0 * k) * (3.0 * k - 1.0) * (3.0 * k - 2.0)) * (3.0 * k - 2.0);
    tg *= x3 / ((3.0 * k + 1.0) * (3.0 * k) * (3.0 * k - 1.0)) * (3.0 * k - 1.0);
    f += tf;
    g += tg;
    if (std::abs(tf) < 1e-18 * std::abs(f) &&
        std::abs(tg) < 1e-18 * (std::abs(g) + 1e-30))
      break;
  }
  return c1 * f + c2 * g;
}

// Poincare coefficients u_k of the large-|x| expansions.
double airy_asym_pos(double x) {
  const double zeta = 2.0 / 3.0 * std::pow(x, 1.5);
  double u = 1.0, sum = 1.0, prev = 1.0;
  for (int k = 0; k < 40; ++k) {
    u *= (6.0 * k + 1.0) * (6.0 * k + 3.0) * (6.0 * k + 5.0) /
         (216.0 * (k + 1.0) * (2.0 * k + 1.0));
    const double term = ((k % 2 == 0) ? -1.0 : 1.0) * u / std::pow(zeta, k + 1);
    if (std::abs(term) > prev) break;  // asymptotic series turned
    sum += term;
    prev = std::abs(term);
    if (prev < 1e-18) break;
  }
  return std::exp(-zeta) / (2.0 * std::sqrt(kPi) * std::pow(x, 0.25)) * sum;
}

double airy_asym_neg(double x) {
  const double X = -x;
  const double zeta = 2.0 / 3.0 * std::pow(X, 1.5);
  double even = 1.0, odd = 0.0, u = 1.0;
  for (int k = 1; k < 40; ++k) {
    u *= (6.0 * (k - 1.0) + 1.0) * (6.0 * (k - 1.0) + 3.0) *
         (6.0 * (k - 1.0) + 5.0) / (216.0 * k * (2.0 * k - 1.0));
    const double term = u / std::pow(zeta, k);
    if (term < 1e-18) break;
    const double sgn = ((k / 2) % 2 == 0) ? 1.0 : -1.0;  // (-1)^{floor(k/2)}
    if (k % 2 == 0)
      even += sgn * term;
    else
      odd += sgn * term;
  }
  const double ph = zeta + kPi / 4.0;
  return (std::sin(ph) * even - std::cos(ph) * odd) /
         (std::sqrt(kPi) * std::pow(X, 0.25));
}

}  // namespace

double airy_eval(double x) {
  if (!std::isfinite(x) || std::abs(x) > 80.0)
    throw std::invalid_argument("airy_eval: argument outside stable range");
  if (std::abs(x) < 6.0) return airy_series(x);
  return x > 0.0 ? airy_asym_pos(x) : airy_asym_neg(x);
}

// ------------------------------------------------------------------ Hermite

double hermite_eval(int n, double x) {
  if (n < 0 || n > 200)
    throw std::invalid_argument("hermite_eval: n out of range");
  if (n == 0) return 1.0;
  double hm = 1.0, h = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    const double next = 2.0 * x * h - 2.0 * k * hm;
    hm = h;
    h = next;
  }
  return h;
}

}  // namespace randsurf::specfun
