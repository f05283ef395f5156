// freeprob.hpp
//
// Planar-limit analytics for one-matrix models and free probability:
//
//   * SpectralDensity: a normalized density on a single interval, with an
//     optional empirical sample set.
//   * Stieltjes transform of a density and its inversion
//     rho(x) = (1/pi) Im W(x + i 0), computed with a two-point Richardson
//     extrapolation in the offset epsilon.
//   * Moment <-> free-cumulant conversion (the R-transform at series level)
//     and free additive convolution: cumulants add, and the convolved density
//     is re-densified through Jacobi recurrence coefficients and a
//     continued-fraction resolvent with a square-root tail.
//   * The quartic one-cut disk function
//       W(z) = (t4 z^3 + t2 z - P(z) sqrt(z^2 - zc^2)) / 2,
//       P(z) = t4 z^2 + (2 t2 + sqrt(t2^2 + 12 t4)) / 3,
//       zc^2 = 2 (sqrt(t2^2 + 12 t4) - t2) / (3 t4),
//     valid in the single-cut regime t2^2 + 12 t4 >= 0.
//   * Contour extraction of moments (1/2 pi i) oint z^j W(z) dz.
//   * The near-critical expansion of the quartic disk function at
//     t4 = t4c (1 - eps^2 mu), z = zc (1 + eps muB / 2): coefficients of
//     1, eps, eps^{3/2} recovered as Cauchy integrals over a circle in the
//     complex sqrt(eps)-plane (spectrally accurate).
//
// The potential normalization keeps t2 explicit everywhere; the frequently
// used convention t2 = 1 is just a parameter choice here (rescaling
// x -> x sqrt(t2) maps between conventions).

#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace randsurf::freeprob {

using cplx = std::complex<double>;

struct SpectralDensity {
  double a = 0.0, b = 0.0;                  // support [a, b]
  std::function<double(double)> evaluate;   // density, >= 0 on [a, b]
  std::vector<double> samples;              // optional empirical eigenvalues
};

// Power/Puiseux series: coefficient[k] multiplies x^{offset + k*step}.
struct TruncatedSeries {
  double exponent_step = 1.0;
  double exponent_offset = 0.0;
  std::vector<double> coefficients;
  size_t order() const { return coefficients.size(); }
};

// Semicircle density of the Gaussian weight exp(-N t2 tr X^2 / 2):
// support [-2/sqrt(t2), 2/sqrt(t2)].
SpectralDensity semicircle(double t2);

// W(z) = int rho(x)/(z - x) dx, adaptive quadrature with a trigonometric
// substitution absorbing the edge behaviour.  Throws if z is within 1e-9 of
// the support.
cplx stieltjes_of_density(const SpectralDensity& rho, cplx z);

// (1/pi) Im W(x + i eps), eps in {1e-4, 5e-5}, linear Richardson step.
double density_from_stieltjes(const std::function<cplx(cplx)>& W, double x);

// Moments (m_0 = 1, m_1, ...) -> R-transform coefficients (R_0, R_1, ...):
// R(w) = W^{-1}(w) - 1/w = sum_k R_k w^k, i.e. R_k = kappa_{k+1} (free
// cumulants).  Output has the same truncation order minus one.
TruncatedSeries r_transform_series(const TruncatedSeries& moments);

// Inverse construction: free cumulants -> moments (m_0 = 1 first).
TruncatedSeries moments_from_r(const TruncatedSeries& r, size_t order);

// Free additive convolution at the stated series order (default 16).
SpectralDensity free_convolve(const SpectralDensity& rhoX,
                              const SpectralDensity& rhoY, int order = 16);

// Quartic one-cut disk function; zc2 output available separately.
double quartic_zc2(double t2, double t4);
cplx quartic_disk(double t2, double t4, cplx z);

// (1/2 pi i) oint z^j W(z) dz over |z| = contour_radius, trapezoidal rule.
// Asserts |Im| < 1e-8 and returns the real part.
double moments_of_disk(const std::function<cplx(cplx)>& W, int j,
                       double contour_radius);

// Moments of a density by direct quadrature, m_0..m_{order}.
TruncatedSeries moments_of_density(const SpectralDensity& rho, int order);

// Near-critical quartic expansion; returns a Puiseux series in sqrt(eps):
// coefficients for eps^0, eps^{1/2}, eps^1, eps^{3/2}, ...  epsilon sets the
// extraction-contour radius (|sqrt(eps_contour)| = sqrt(epsilon)).
TruncatedSeries scaling_expand_quartic(double epsilon, double mu, double muB);

// |T_3(zeta) - T_2(Q)| for the dimensionless variables zeta = muB/sqrt(mu),
// Q = (3/2) mu^{-3/4} c32, where c32 is the eps^{3/2} coefficient (the
// non-universal normalization works out to 2/3 for this model).
double scaling_cheb_residual(double mu, double muB, double c32);

}  // namespace randsurf::freeprob
