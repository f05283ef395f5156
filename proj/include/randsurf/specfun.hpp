// specfun.hpp
//
// Special-function kernel used throughout the library:
//
//   * Chebyshev functions T_nu, U_nu of arbitrary (non-integer) order,
//     defined through the trigonometric parametrization
//         T_nu(x) = cos(pi nu phi),   U_nu(x) = sin(pi(nu+1)phi)/sin(pi phi),
//         x = cos(pi phi),  phi in [0,1] (principal branch).
//     For non-integer nu these have a branch cut on x in (-inf,-1]; the
//     boundary value on the cut is selected by an explicit side enum.
//
//   * Jacobi theta functions theta_1, theta_2, theta_3 (series in the nome
//     q = exp(i pi tau), Im tau > 0), together with the two-cut torus
//     parametrization w(sigma) = sqrt(alpha beta) theta_2(pi sigma)/theta_3(pi
//     sigma) of the complement of [-beta,-alpha] u [alpha,beta], and the
//     complete elliptic integrals K, K' that fix the modular parameter
//     tau = i K'/K.
//
//   * The quasi-periodic kernel g(sigma; nu): the unique function with period
//     tau, multiplier exp(i pi nu) under a unit shift of sigma, and a single
//     simple pole of unit residue (in sigma) per lattice cell.
//
//   * The Airy function Ai and the physicists' Hermite polynomials H_n.
//
// All functions are pure; there is no shared mutable state.

#pragma once

#include <complex>
#include <stdexcept>

namespace randsurf::specfun {

using cplx = std::complex<double>;

// ------------------------------------------------------------------ Chebyshev

enum class ChebKind { first, second };

// Which side of a branch cut a boundary value is taken from.  `none` demands
// that the argument not lie on the cut.
enum class CutSide { none, plus, minus };

struct ChebSpec {
  ChebKind kind = ChebKind::first;
  double order = 0.0;  // nu
};

// Evaluate T_nu or U_nu at complex x.  For real x <= -1 a side must be given;
// `plus` means the limit from the upper half x-plane.
cplx cheb_eval(const ChebSpec& spec, cplx x, CutSide side = CutSide::none);

// Convenience wrappers.
inline cplx cheb_T(double nu, cplx x, CutSide side = CutSide::none) {
  return cheb_eval({ChebKind::first, nu}, x, side);
}
inline cplx cheb_U(double nu, cplx x, CutSide side = CutSide::none) {
  return cheb_eval({ChebKind::second, nu}, x, side);
}

// |T_{1/nu}(T_nu(x)) - x| on the principal range x in (-1,1).
double cheb_inverse_check(double nu, double x);

// ------------------------------------------------------------------ thetas

// theta_j(u | tau), j in {1,2,3}; requires Im tau > 0.  The series is summed
// until |term| < 1e-17 * |partial sum| (hard cap: 200 terms, in which case a
// runtime_error is thrown).
cplx theta_eval(int j, cplx u, cplx tau);

// d/du theta_1(u|tau) at u = 0.
cplx theta1_prime0(cplx tau);

// ------------------------------------------------------------------ torus

struct TorusParam {
  double alpha = 0.0;    // inner band edge, > 0
  double beta = 0.0;     // outer band edge, > alpha
  double K = 0.0;        // int_0^1 dt ((1-t^2)(1-(alpha t/beta)^2))^{-1/2}
  double Kprime = 0.0;   // int_0^inf dt ((1+t^2)(1+(alpha t/beta)^2))^{-1/2}
  cplx tau;              // i K'/K
};

TorusParam torus_from_band(double alpha, double beta);

// w(sigma) = sqrt(alpha beta) theta_2(pi sigma|tau)/theta_3(pi sigma|tau).
cplx torus_w(const TorusParam& tp, cplx sigma);

// ------------------------------------------------------------------ g kernel

// g(sigma; nu) with period tau, g(sigma+1) = exp(i pi nu) g(sigma), a simple
// pole of residue 1 at sigma = 0 and a simple zero at sigma = -nu tau / 2.
cplx g_kernel(cplx sigma, double nu, cplx tau);

// ------------------------------------------------------------------ Airy

// Ai(x) for |x| <= 80: Maclaurin series for |x| < 6, Poincare asymptotics
// beyond.
double airy_eval(double x);

// ------------------------------------------------------------------ Hermite

// Physicists' Hermite polynomial H_n(x), three-term recurrence; n <= 200.
double hermite_eval(int n, double x);

}  // namespace randsurf::specfun
