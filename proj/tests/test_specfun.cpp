// Tests for the special-function kernel.
//
// Where a value is not an elementary identity it is checked against an
// independent oracle implemented here: arithmetic-geometric-mean evaluation of
// the complete elliptic integrals, direct long-double theta summation, and
// quadrature of integral representations for Airy and Hermite.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "randsurf/specfun.hpp"

using namespace randsurf::specfun;
using std::abs;

namespace {

constexpr double kPi = 3.14159265358979323846;
const cplx I(0.0, 1.0);

// Oracle: K(k) = pi / (2 AGM(1, sqrt(1-k^2))).
double agm(double a, double b) {
  for (int i = 0; i < 64 && std::abs(a - b) > 1e-16 * a; ++i) {
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return a;
}
double ellipK_agm(double k) { return kPi / (2.0 * agm(1.0, std::sqrt(1.0 - k * k))); }

// Oracle: plain theta summation in long double, fixed 60 terms.
std::complex<long double> theta_direct(int j, std::complex<long double> u,
                                       std::complex<long double> tau) {
  const std::complex<long double> li(0.0L, 1.0L);
  std::complex<long double> s = (j == 3) ? 1.0L : 0.0L;
  for (int n = 0; n < 60; ++n) {
    if (j == 1) {
      const long double h = n + 0.5L;
      const long double sg = (n % 2 == 0) ? 1.0L : -1.0L;
      s += 2.0L * sg * std::exp(li * (long double)kPi * tau * h * h) *
           std::sin((2.0L * n + 1.0L) * u);
    } else if (j == 2) {
      const long double h = n + 0.5L;
      s += 2.0L * std::exp(li * (long double)kPi * tau * h * h) *
           std::cos((2.0L * n + 1.0L) * u);
    } else {
      const long double m = n + 1.0L;
      s += 2.0L * std::exp(li * (long double)kPi * tau * m * m) *
           std::cos(2.0L * m * u);
    }
  }
  return s;
}

// Oracle: Ai(x) by quadrature of the Fourier representation
//   Ai(x) = (1/2 pi) int exp(i (s^3/3 + x s)) ds,
// after rotating the two half-lines onto the rays arg s = pi/6 and 5 pi/6,
// where the integrand decays like exp(-t^3/3):
//   Ai(x) = (1/pi) Re[ e^{i pi/6} int_0^inf exp(-t^3/3 + i x t e^{i pi/6}) dt ].
double airy_quadrature(double x) {
  const cplx rot = std::exp(I * (kPi / 6.0));
  const int n = 20000;
  const double h = 14.0 / n;
  cplx sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += w * std::exp(-t * t * t / 3.0 + I * x * t * rot);
  }
  return (rot * sum * (h / 3.0)).real() / kPi;
}

// Oracle: H_n(x) = 2^n pi^{-1/2} int (x + i t)^n exp(-t^2) dt.
double hermite_quadrature(int n, double x) {
  const int m = 20000;
  const double a = -9.0, b = 9.0, h = (b - a) / m;
  cplx sum = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double t = a + i * h;
    const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += w * std::pow(cplx(x, t), n) * std::exp(-t * t);
  }
  return (std::pow(2.0, n) / std::sqrt(kPi) * sum * (h / 3.0)).real();
}

}  // namespace

TEST_CASE("cheb_eval: classical polynomial values") {
  CHECK(cheb_T(2, cplx(0.5)).real() == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(cheb_T(0.5, cplx(0.0)).real() ==
        doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
  // Integer order vs exact polynomial recurrence, |x| <= 2 including the cut.
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ux(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double x = ux(rng);
    const int nu = trial % 13;
    double tm = 1.0, t = x;  // T_0, T_1
    for (int k = 1; k < nu; ++k) {
      const double nx = 2.0 * x * t - tm;
      tm = t;
      t = nx;
    }
    const double exact = (nu == 0) ? 1.0 : t;
    const CutSide side = (x <= -1.0) ? CutSide::plus : CutSide::none;
    const cplx got = cheb_T(nu, cplx(x), side);
    CHECK(abs(got - cplx(exact)) < 1e-12 * (1.0 + std::abs(exact)));
  }
}

TEST_CASE("cheb_eval: argument checks") {
  CHECK_THROWS(cheb_T(0.5, cplx(std::nan(""), 0.0)));
  CHECK_THROWS(cheb_T(0.5, cplx(-1.5, 0.0)));  // on cut, no side
}

TEST_CASE("cheb_eval: branch-cut discontinuities") {
  // T_nu(x)_+ - T_nu(x)_- = -2 i sin(pi nu) sqrt(1-x^2) U_{nu-1}(-x) and
  // U_nu(x)_+ - U_nu(x)_- = -2 i sin(pi nu) T_{nu+1}(-x)/sqrt(1-x^2),
  // where on x < -1 the square root is the continuation
  // sqrt(1-x^2) = -sqrt(x^2-1) (verified against the hyperbolic
  // parametrization x = -cosh y evaluated in extended precision below).
  for (double nu : {1.0 / 3.0, 0.5, 2.0 / 3.0}) {
    for (int i = 0; i < 100; ++i) {
      const double x = -1.02 - 3.96 * i / 99.0;  // in (-5,-1)
      const double rt = -std::sqrt(x * x - 1.0);
      const cplx dT = cheb_T(nu, cplx(x), CutSide::plus) -
                      cheb_T(nu, cplx(x), CutSide::minus);
      const cplx rhsT =
          -2.0 * I * std::sin(kPi * nu) * rt * cheb_U(nu - 1.0, cplx(-x));
      CHECK(abs(dT - rhsT) < 1e-9 * (1.0 + abs(rhsT)));
      const cplx dU = cheb_U(nu, cplx(x), CutSide::plus) -
                      cheb_U(nu, cplx(x), CutSide::minus);
      const cplx rhsU =
          -2.0 * I * std::sin(kPi * nu) / rt * cheb_T(nu + 1.0, cplx(-x));
      CHECK(abs(dU - rhsU) < 1e-9 * (1.0 + abs(rhsU)));
    }
  }
  // High-precision hyperbolic parametrization of the quoted example
  // (frozen from the oracle x = -cosh y, T(x+-) = cos(pi nu -+ i nu y)):
  {
    const double nu = 1.0 / 3.0, x = -1.5;
    const long double y = std::acosh(1.5L);
    const std::complex<long double> li(0.0L, 1.0L);
    const std::complex<long double> tp =
        std::cos((long double)kPi * (long double)nu *
                 (std::complex<long double>(1.0L, 0.0L) - li * y / (long double)kPi));
    const std::complex<long double> tm =
        std::cos((long double)kPi * (long double)nu *
                 (std::complex<long double>(1.0L, 0.0L) + li * y / (long double)kPi));
    const cplx diff_oracle((double)(tp - tm).real(), (double)(tp - tm).imag());
    const cplx diff = cheb_T(nu, cplx(x), CutSide::plus) -
                      cheb_T(nu, cplx(x), CutSide::minus);
    CHECK(abs(diff - diff_oracle) < 1e-12);
  }
}

TEST_CASE("cheb_inverse_check") {
  CHECK(cheb_inverse_check(2.0, 0.3) < 1e-12);
  CHECK(cheb_inverse_check(1.5, 0.5) < 1e-12);
  CHECK(cheb_inverse_check(1.0, 0.9) < 1e-15);
  CHECK_THROWS(cheb_inverse_check(0.0, 0.5));
}

TEST_CASE("theta_eval: basic structure") {
  CHECK(abs(theta_eval(1, cplx(0.0), cplx(0.0, 2.0))) < 1e-15);
  CHECK_THROWS(theta_eval(1, cplx(0.0), cplx(0.0, -1.0)));
  CHECK_THROWS(theta_eval(4, cplx(0.0), cplx(0.0, 1.0)));
  // Direct-summation oracle at doubled precision.
  const cplx v = theta_eval(3, cplx(0.3), cplx(0.0, 1.5));
  const auto o = theta_direct(3, {0.3L, 0.0L}, {0.0L, 1.5L});
  CHECK(abs(v - cplx((double)o.real(), (double)o.imag())) < 1e-14);
}

TEST_CASE("theta_eval: theta1 quasi-periodicity") {
  // theta1(u + pi(m + n tau)) = (-1)^{m+n} exp(-i n (n pi tau + 2 u)) theta1(u)
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> ur(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const cplx u(ur(rng), 0.3 * ur(rng));
    const cplx tau(0.4 * ur(rng), 1.0 + 0.8 * std::abs(ur(rng)));
    const cplx base = theta_eval(1, u, tau);
    for (int m = -1; m <= 1; ++m)
      for (int n = -1; n <= 1; ++n) {
        const cplx lhs = theta_eval(1, u + kPi * (cplx(m) + cplx(n) * tau), tau);
        const double sgn = ((m + n) % 2 == 0) ? 1.0 : -1.0;
        const cplx rhs = sgn *
                         std::exp(-I * cplx(n) *
                                  (cplx(n) * kPi * tau + 2.0 * u)) *
                         base;
        CHECK(abs(lhs - rhs) < 1e-10 * (1.0 + abs(rhs)));
      }
  }
  // The (m,n) = (1,1) instance called out explicitly:
  const cplx u(0.37, 0.11), tau(0.0, 1.3);
  const cplx lhs = theta_eval(1, u + kPi * (1.0 + tau), tau);
  const cplx rhs = std::exp(-I * (kPi * tau + 2.0 * u)) * theta_eval(1, u, tau);
  CHECK(abs(lhs - rhs) < 1e-12 * (1.0 + abs(rhs)));
}

TEST_CASE("theta_eval: oddness of theta1") {
  const cplx u(0.4, 0.2), tau(0.1, 1.1);
  CHECK(abs(theta_eval(1, -u, tau) + theta_eval(1, u, tau)) < 1e-13);
}

TEST_CASE("torus_from_band: elliptic integrals vs AGM oracle") {
  for (double k : {0.1, 0.5, 0.9}) {
    const auto tp = torus_from_band(k, 1.0);
    CHECK(tp.K == doctest::Approx(ellipK_agm(k)).epsilon(1e-11));
    // The stated K' integral equals the complementary integral K(k') with
    // k' = sqrt(1 - k^2): record the relation numerically.
    CHECK(tp.Kprime ==
          doctest::Approx(ellipK_agm(std::sqrt(1.0 - k * k))).epsilon(1e-11));
    CHECK(tp.tau.real() == 0.0);
    CHECK(tp.tau.imag() > 0.0);
  }
}

TEST_CASE("torus_from_band: special points and limits") {
  // sigma = 0 maps to the inner band edge alpha (sn-based definition gives
  // w(0) = alpha sn(K | k) = alpha).
  const auto tp = torus_from_band(1.0, 2.0);
  CHECK(abs(torus_w(tp, cplx(0.0)) - cplx(1.0)) < 1e-10);
  // sigma = tau/2 maps to beta.
  CHECK(abs(torus_w(tp, tp.tau / 2.0) - cplx(2.0)) < 1e-9);
  // sigma = 1 maps to -alpha, sigma = 1/2 to 0.
  CHECK(abs(torus_w(tp, cplx(1.0)) + cplx(1.0)) < 1e-10);
  CHECK(abs(torus_w(tp, cplx(0.5))) < 1e-12);

  // alpha/beta -> 0: w(sigma)/alpha -> cos(pi sigma) pointwise.
  const auto tiny = torus_from_band(1e-5, 1.0);
  for (double s : {0.1, 0.35, 0.71}) {
    CHECK(abs(torus_w(tiny, cplx(s)) / 1e-5 - std::cos(kPi * s)) < 1e-6);
  }

  // Degenerate guards at both ends of alpha/beta in (0,1): no crash, and the
  // modular parameter degenerates the right way (tau -> 0 as the band
  // [alpha,beta] shrinks to a point, tau -> i inf as alpha/beta -> 0).
  const auto deg = torus_from_band(1.0 - 1e-9, 1.0);
  CHECK(deg.Kprime / deg.K < 0.2);
  CHECK(std::isfinite(deg.K));
  CHECK(tiny.Kprime / tiny.K > 5.0);

  CHECK_THROWS(torus_from_band(-1.0, 2.0));
  CHECK_THROWS(torus_from_band(2.0, 1.0));
}

TEST_CASE("g_kernel: residue, multiplier, zero, periodicity") {
  const cplx tau(0.0, 1.2);
  const double nu = 2.0 / 3.0;

  // Unit residue at sigma = 0 by a numerical contour integral.
  const int n = 2000;
  cplx contour = 0.0;
  const double r = 0.11;
  for (int i = 0; i < n; ++i) {
    const double th = 2.0 * kPi * i / n;
    const cplx s = r * std::exp(I * th);
    contour += g_kernel(s, nu, tau) * s;  // f(s) * ds/(i dtheta) aggregated
  }
  contour *= 2.0 * kPi / n / (2.0 * kPi);  // (1/2 pi i) * i * sum * dtheta
  CHECK(abs(contour - cplx(1.0)) < 1e-8);

  // Multiplier exp(i pi nu) under a unit shift and exact period tau.
  const cplx s0(0.23, 0.17);
  const cplx ratio = g_kernel(s0 + 1.0, nu, tau) / g_kernel(s0, nu, tau);
  CHECK(abs(ratio - std::exp(I * kPi * nu)) < 1e-10);
  CHECK(abs(g_kernel(s0 + tau, nu, tau) - g_kernel(s0, nu, tau)) < 1e-10);

  // Simple zero at sigma = -nu tau / 2.
  CHECK(abs(g_kernel(-nu * tau / 2.0, nu, tau)) < 1e-8);

  CHECK_THROWS(g_kernel(cplx(0.0), nu, tau));
}

TEST_CASE("airy_eval: value, ODE, asymptotics") {
  // Quadrature oracle for the normalization (frozen value 0.35502805388...).
  CHECK(airy_eval(0.0) == doctest::Approx(0.3550280538878172).epsilon(1e-10));
  CHECK(airy_eval(0.0) == doctest::Approx(airy_quadrature(0.0)).epsilon(1e-8));
  CHECK(airy_eval(1.0) == doctest::Approx(airy_quadrature(1.0)).epsilon(1e-8));
  CHECK(airy_eval(-3.0) == doctest::Approx(airy_quadrature(-3.0)).epsilon(1e-8));

  // Defining ODE Ai'' = x Ai by Richardson-extrapolated central differences,
  // x in [-5,5].
  auto second_diff = [](double x, double h) {
    return (airy_eval(x + h) - 2.0 * airy_eval(x) + airy_eval(x - h)) / (h * h);
  };
  for (double x = -5.0; x <= 5.0; x += 0.25) {
    const double h = 2e-2;
    const double dd =
        (4.0 * second_diff(x, h / 2.0) - second_diff(x, h)) / 3.0;
    CHECK(std::abs(dd - x * airy_eval(x)) < 1e-8);
  }

  // Monotone decay for large positive x.
  double prev = airy_eval(6.0);
  for (double x = 7.0; x <= 20.0; x += 1.0) {
    const double v = airy_eval(x);
    CHECK(v > 0.0);
    CHECK(v < prev);
    prev = v;
  }
  // Continuity across the series/asymptotic switch at |x| = 6.
  CHECK(airy_eval(5.999999) == doctest::Approx(airy_eval(6.000001)).epsilon(1e-8));
  CHECK(airy_eval(-5.999999) ==
        doctest::Approx(airy_eval(-6.000001)).epsilon(1e-6));
  CHECK_THROWS(airy_eval(100.0));
}

TEST_CASE("hermite_eval") {
  CHECK(hermite_eval(0, 1.7) == 1.0);
  CHECK(hermite_eval(1, 1.7) == doctest::Approx(3.4));
  CHECK(hermite_eval(2, 1.0) == doctest::Approx(2.0));  // 4x^2 - 2
  CHECK(hermite_eval(5, 0.7) ==
        doctest::Approx(hermite_quadrature(5, 0.7)).epsilon(1e-9));
  CHECK_THROWS(hermite_eval(-1, 0.0));
}
