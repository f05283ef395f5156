// potts_curves.hpp
//
// Spectral-curve engine for the q-state Potts model on random planar maps,
// formulated as the Hermitian matrix chain with a Gaussian center Y coupled
// to q identical matrices with potential U (k = 1: cubic, U'(z) = t3 z^2 +
// t2 z; k = 2: quartic, U'(z) = t4 z^3 + t3 z^2 + t2 z).  Provides
//
//   * the exponent dictionary: nu = arccos((q-2)/2)/pi, string exponent
//     gamma_s = nu/(nu-2), and the KPZ relation gamma_s(c_M),
//
//   * the explicit genus-zero spectral-curve templates F_(p)(x, y) for
//     (q,k) = (1,1), (1,2), (2,1), (3,1) with their undetermined constants
//     c^{(p)}_{i,j} kept symbolic (curve_template),
//
//   * constant fixing (fix_constants): damped Gauss-Newton on the joint
//     system of Puiseux-expansion conditions -- each sheet of the curve at
//     z -> infinity, expanded by Hensel lifting, must match the known
//     resolvent asymptotics (W ~ 1/z normalizations and the explicit
//     subleading coefficients of every sheet) -- which realizes the
//     genus-zero selection,
//
//   * the G-transform of Prop-style boundary values,
//       G_Y^{(p)}(z) = (p/q)(z - W_Y(z)_-) + ((q-p)/q) W_Y(z)_+,
//     its functional inverse by Newton, and the dual-relation residual
//     max |F_(p)(G_{(q-p)}(z) - z, G_{(q-p)}(z))|,
//
//   * the elliptic solver for W_Y at k = 1 and real 0 < q < 4: the torus
//     parametrization w(sigma) = sqrt(alpha beta) theta_2/theta_3(pi sigma),
//     z = delta_U + w^2, with W_Y = W_reg + W_sing, W_sing built from the
//     quasi-periodic kernel with multiplier e^{i pi nu}; the unknowns
//     (delta_U, band, f_0..f_2) solve the z W_Y(z) -> 1 matching conditions,
//
//   * critical points of the (t2, t3) phase diagram from the vanishing
//     higher-derivative system of the symmetrized curve polynomial E_(1),
//     and the near-critical scaling fit of W_Y(z_- - eps eta) - W_Y(z_-)
//     against eps^{1 - nu/2} with its Chebyshev T_{2-nu}(sqrt eta) profile.
//
// Curve coefficients are exact rationals (couplings are converted from
// binary doubles exactly), so fixed curves export losslessly to JSON.

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <complex>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace randsurf::potts_curves {

using cplx = std::complex<double>;
using Rat = boost::multiprecision::cpp_rational;

// ----------------------------------------------------------------- exponents

struct NuGamma {
  double nu = 0.0;       // arccos((q-2)/2) / pi
  double gamma_s = 0.0;  // nu / (nu - 2)
};

NuGamma nu_gamma(double q);  // requires 0 < q < 4

// gamma_s(c_M) = (c_M - 1 - sqrt((c_M - 1)(c_M - 25))) / 12, c_M <= 1.
double kpz(double cM);

// -------------------------------------------------------------------- curves

// One coefficient of a curve: an exact known part plus an optional linear
// combination of still-unresolved constants c_{i,j} (by name).
struct CurveCoeff {
  Rat known = 0;
  std::map<std::string, Rat> sym;
};

struct BivariatePolynomial {
  std::map<std::pair<int, int>, CurveCoeff> coefficients;  // (i, j) -> coeff
  int deg_x = 0, deg_y = 0;
  // Provenance (used by fix_constants and the branch utilities).
  int q = 0, k = 0, p = 0;
  Rat t2 = 0, t3 = 0, t4 = 0;

  bool numeric() const;                        // no unresolved constants
  std::vector<std::string> unknowns() const;   // sorted constant names
  cplx evaluate(cplx x, cplx y) const;         // requires numeric()
  BivariatePolynomial resolve(const std::map<std::string, Rat>& values) const;
  BivariatePolynomial partial_x() const;
  BivariatePolynomial partial_y() const;
};

// The printed curve templates with symbolic constants.  Supported: (q,k) =
// (1,1) p=1; (1,2) p=1; (2,1) p in {1,2}; (3,1) p in {1,3}.  t4 is used only
// for (q,k) = (1,2).
BivariatePolynomial curve_template(int q, int k, int p, double t2, double t3,
                                   double t4 = 0.0);

// Determines every c^{(p)}_{i,j} by damped Gauss-Newton on the sheet
// asymptotics conditions; final max residual < 1e-10 or throws.
BivariatePolynomial fix_constants(const BivariatePolynomial& tmpl);

// {"monomials": [[i, j, numerator, denominator], ...]}, exact; requires
// numeric().
std::string curve_to_json(const BivariatePolynomial& curve);

// All roots in the other variable at a fixed value (Durand-Kerner).
std::vector<cplx> y_roots(const BivariatePolynomial& F, cplx x);
std::vector<cplx> x_roots(const BivariatePolynomial& F, cplx y);

// Laurent coefficients w_1..w_orders of the physical resolvent branch
// W_(p)(z) = sum_k w_k z^-k read off the fixed curve (w_1 = 1).
std::vector<double> physical_series(const BivariatePolynomial& F, int orders);

// W_(1)(z) on the physical sheet of a fixed curve (root selection by the
// sheet's large-z asymptotics continued inward along a ray).
cplx curve_W1(const BivariatePolynomial& F, cplx z);

// --------------------------------------------------------------- G-transform

struct BranchPair {
  cplx plus, minus;  // boundary values W(z)_+ and W(z)_-
};
using WEvaluator = std::function<BranchPair(cplx)>;

// G_Y^{(p)}(z) = (p/q)(z - W(z)_-) + ((q-p)/q) W(z)_+.
cplx g_transform(const WEvaluator& WY, int p, double q, cplx z);

// Solves G(x) = z by damped Newton (numerical derivative) from `guess`.
cplx g_inverse(const std::function<cplx(cplx)>& G, cplx z, cplx guess);

// max over the grid of |F_(p)(G_{(q-p)}(z) - z, G_{(q-p)}(z))|.
double dual_relation_check(const BivariatePolynomial& Fp,
                           const std::function<cplx(cplx)>& G_qp,
                           const std::vector<cplx>& grid);

// ------------------------------------------------------------------ elliptic

struct EllipticWY {
  double q = 0, t2 = 0, t3 = 0;
  double nu = 0;
  double delta_U = 0;
  double z_minus = 0, z_plus = 0;  // band of rho_Y; z_minus > delta_U
  double alpha = 0, beta = 0;      // band edges in w, z = delta_U + w^2
  cplx tau;                        // i K'/K of the w-torus
  std::array<cplx, 3> f{};         // f_0..f_2 of the singular part
  double residual = 0;             // final matching residual

  // W_Y on the physical sheet (z off the band).
  cplx evaluate(cplx z) const;
  // Boundary values across the band/gap at real z (eps-offset convention).
  BranchPair boundary(double z) const;
  // Spectral density on (z_minus, z_plus).
  double density(double z) const;
};

// Solves the five matching conditions of z W_Y(z) -> 1 plus the band
// consistency for (delta_U, alpha, beta, f_0..f_2); k = 1, 0 < q < 4.
EllipticWY elliptic_WY(double q, double t2, double t3);

// ----------------------------------------------------------- critical points

struct CriticalPoint {
  int q = 0;
  // branches[0] = (t2c, t3c) upper sign, branches[1] = lower sign.
  std::array<std::array<double, 2>, 2> branches{};
  Rat gamma_s;  // exact rational nu/(nu-2)
};

// Newton on the vanishing higher-derivative system of the symmetrized curve
// polynomial at the degenerating point; q in {1, 2, 3}.
CriticalPoint critical_points(int q);

// ------------------------------------------------------------------- scaling

struct ScalingFit {
  double exponent = 0;           // fitted from W(z_- - eps eta) - W(z_-)
  double exponent_expected = 0;  // 1 - nu/2
  double profile_max_rel_err = 0;  // vs T_{2-nu}(sqrt eta), normalized
  double coefficient = 0;        // leading amplitude C at the smallest eps
};

ScalingFit scaling_coefficient(double q, const std::vector<double>& eta_grid);

}  // namespace randsurf::potts_curves
