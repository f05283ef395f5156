// freeprob.cpp -- planar-limit analytics; see freeprob.hpp.

#include "randsurf/freeprob.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "randsurf/detail/quad.hpp"
#include "randsurf/specfun.hpp"

namespace randsurf::freeprob {

namespace {

constexpr double kPi = 3.14159265358979323846;
const cplx kI(0.0, 1.0);

}  // namespace

SpectralDensity semicircle(double t2) {
  if (!(t2 > 0.0)) throw std::invalid_argument("semicircle: t2 must be > 0");
  SpectralDensity rho;
  rho.a = -2.0 / std::sqrt(t2);
  rho.b = 2.0 / std::sqrt(t2);
  rho.evaluate = [t2](double x) {
    const double disc = 4.0 / t2 - x * x;
    return disc > 0.0 ? t2 / (2.0 * kPi) * std::sqrt(disc) : 0.0;
  };
  return rho;
}

cplx stieltjes_of_density(const SpectralDensity& rho, cplx z) {
  const double c = 0.5 * (rho.a + rho.b), r = 0.5 * (rho.b - rho.a);
  if (r == 0.0) return 1.0 / (z - rho.a);  // point mass
  // Distance from z to the support interval.
  const double xr = std::clamp(z.real(), rho.a, rho.b);
  if (std::abs(z - cplx(xr, 0.0)) < 1e-9)
    throw std::invalid_argument("stieltjes_of_density: z too close to support");
  // x = c + r cos(theta) absorbs square-root edges.
  auto f = [&](double th) {
    const double x = c + r * std::cos(th);
    return rho.evaluate(x) * r * std::sin(th) / (z - x);
  };
  return detail::integrate<cplx>(f, 0.0, kPi, 1e-11);
}

double density_from_stieltjes(const std::function<cplx(cplx)>& W, double x) {
  const double e1 = 1e-4, e2 = 5e-5;
  const double v1 = W(cplx(x, e1)).imag() / kPi;
  const double v2 = W(cplx(x, e2)).imag() / kPi;
  const double extrap = (e1 * v2 - e2 * v1) / (e1 - e2);  // = 2 v2 - v1
  if (std::abs(v1 - v2) > 0.05 + 0.2 * std::abs(extrap))
    throw std::runtime_error("density_from_stieltjes: extrapolation unstable");
  return -extrap;  // Im W(x + i0) = -pi rho for W = int rho/(z-x)
}

// ---------------------------------------------------------- cumulant algebra

namespace {

// Coefficient lists of powers of the moment series: A_s[l] = coefficient of
// w^l in (sum_j m_j w^j)^s, needed up to l = lmax.
std::vector<std::vector<double>> moment_powers(const std::vector<double>& m,
                                               int smax, int lmax) {
  std::vector<std::vector<double>> A(smax + 1,
                                     std::vector<double>(lmax + 1, 0.0));
  A[0][0] = 1.0;
  for (int s = 1; s <= smax; ++s)
    for (int l = 0; l <= lmax; ++l)
      for (int j = 0; j <= l && j < static_cast<int>(m.size()); ++j)
        A[s][l] += m[j] * A[s - 1][l - j];
  return A;
}

}  // namespace

TruncatedSeries r_transform_series(const TruncatedSeries& moments) {
  auto m = moments.coefficients;
  if (m.size() < 3 || std::abs(m[0] - 1.0) > 1e-6)
    throw std::invalid_argument(
        "r_transform_series: need m_0 = 1 and order >= 2");
  // Absorb tiny quadrature drift in the normalization.
  const double m0 = m[0];
  for (auto& v : m) v /= m0;
  const int K = static_cast<int>(m.size()) - 1;
  // Non-crossing recursion m_n = sum_s kappa_s * [w^{n-s}] M(w)^s.
  const auto A = moment_powers(m, K, K);
  std::vector<double> kappa(K + 1, 0.0);
  for (int n = 1; n <= K; ++n) {
    double rest = 0.0;
    for (int s = 1; s < n; ++s) rest += kappa[s] * A[s][n - s];
    kappa[n] = m[n] - rest;  // since A[n][0] = 1
  }
  TruncatedSeries R;
  R.exponent_step = 1.0;
  R.exponent_offset = 0.0;
  R.coefficients.assign(kappa.begin() + 1, kappa.end());  // R_k = kappa_{k+1}
  return R;
}

TruncatedSeries moments_from_r(const TruncatedSeries& r, size_t order) {
  std::vector<double> kappa(order + 1, 0.0);
  for (size_t k = 0; k + 1 <= order && k < r.coefficients.size(); ++k)
    kappa[k + 1] = r.coefficients[k];
  std::vector<double> m(order + 1, 0.0);
  m[0] = 1.0;
  for (size_t n = 1; n <= order; ++n) {
    const auto A = moment_powers(m, static_cast<int>(n), static_cast<int>(n));
    double v = 0.0;
    for (size_t s = 1; s <= n; ++s) v += kappa[s] * A[s][n - s];
    m[n] = v;
  }
  TruncatedSeries out;
  out.coefficients = m;
  return out;
}

TruncatedSeries moments_of_density(const SpectralDensity& rho, int order) {
  TruncatedSeries out;
  out.coefficients.resize(order + 1);
  if (rho.a == rho.b) {  // point mass
    for (int j = 0; j <= order; ++j)
      out.coefficients[j] = std::pow(rho.a, j);
    return out;
  }
  const double c = 0.5 * (rho.a + rho.b), r = 0.5 * (rho.b - rho.a);
  for (int j = 0; j <= order; ++j) {
    auto f = [&](double th) {
      const double x = c + r * std::cos(th);
      return rho.evaluate(x) * r * std::sin(th) * std::pow(x, j);
    };
    out.coefficients[j] = detail::integrate<double>(f, 0.0, kPi, 1e-12);
  }
  return out;
}

// -------------------------------------------------------- free convolution

namespace {

struct Jacobi {
  std::vector<double> alpha;  // alpha_0 .. alpha_{M-1}
  std::vector<double> beta;   // beta_1 .. beta_{M-1}
};

// Chebyshev algorithm: monomial moments -> recurrence coefficients.
Jacobi jacobi_from_moments(const std::vector<double>& m) {
  const int M = static_cast<int>(m.size()) / 2;
  std::vector<std::vector<double>> sig(M + 1, std::vector<double>(m.size(), 0.0));
  Jacobi J;
  J.alpha.resize(M);
  J.beta.resize(M, 0.0);
  for (size_t l = 0; l < m.size(); ++l) sig[0][l] = m[l];
  J.alpha[0] = m[1] / m[0];
  for (int k = 1; k < M; ++k) {
    for (size_t l = k; l + k < m.size(); ++l) {
      const double lower = (k >= 2) ? sig[k - 2][l] : 0.0;
      sig[k][l] = sig[k - 1][l + 1] - J.alpha[k - 1] * sig[k - 1][l] -
                  ((k >= 2) ? J.beta[k - 1] * lower : 0.0);
    }
    J.beta[k] = sig[k][k] / sig[k - 1][k - 1];
    J.alpha[k] = sig[k][k + 1] / sig[k][k] - sig[k - 1][k] / sig[k - 1][k - 1];
  }
  return J;
}

// Resolvent of the Jacobi operator with a self-similar square-root tail.
cplx jacobi_resolvent(const Jacobi& J, cplx z) {
  const int M = static_cast<int>(J.alpha.size());
  const double at = J.alpha[M - 1];
  const double bt = (M >= 2) ? J.beta[M - 1] : 1e-12;
  const cplx w = z - at;
  const cplx s = w * std::sqrt(1.0 - 4.0 * bt / (w * w));
  cplx t = (w - s) / (2.0 * bt);
  for (int k = M - 1; k >= 1; --k) t = 1.0 / (z - J.alpha[k - 1] - J.beta[k] * t);
  return t;
}

}  // namespace

SpectralDensity free_convolve(const SpectralDensity& rhoX,
                              const SpectralDensity& rhoY, int order) {
  if (order < 4 || order % 2 != 0)
    throw std::invalid_argument("free_convolve: order must be even and >= 4");
  const auto mX = moments_of_density(rhoX, order);
  const auto mY = moments_of_density(rhoY, order);
  const auto rX = r_transform_series(mX);
  const auto rY = r_transform_series(mY);
  TruncatedSeries rSum;
  rSum.coefficients.resize(order);
  for (int k = 0; k < order; ++k)
    rSum.coefficients[k] = rX.coefficients[k] + rY.coefficients[k];
  const auto mSum = moments_from_r(rSum, order);
  const Jacobi J = jacobi_from_moments(mSum.coefficients);

  // Re-densify on a grid spanning the tail support plus a margin.
  const int M = static_cast<int>(J.alpha.size());
  const double at = J.alpha[M - 1], bt = std::max(J.beta[M - 1], 1e-12);
  double lo = at - 2.0 * std::sqrt(bt), hi = at + 2.0 * std::sqrt(bt);
  for (double a : J.alpha) {
    lo = std::min(lo, a - 2.0 * std::sqrt(bt));
    hi = std::max(hi, a + 2.0 * std::sqrt(bt));
  }
  const double pad = 0.1 * (hi - lo) + 0.1;
  lo -= pad;
  hi += pad;
  const int G = 801;
  auto Wfun = [J](cplx z) { return jacobi_resolvent(J, z); };
  std::vector<double> xs(G), vals(G);
  for (int i = 0; i < G; ++i) {
    xs[i] = lo + (hi - lo) * i / (G - 1);
    vals[i] = std::max(0.0, density_from_stieltjes(Wfun, xs[i]));
  }
  // Trim to where mass lives and normalize.
  int i0 = 0, i1 = G - 1;
  while (i0 < G - 1 && vals[i0] < 1e-9) ++i0;
  while (i1 > 0 && vals[i1] < 1e-9) --i1;
  double mass = 0.0;
  const double h = (hi - lo) / (G - 1);
  for (int i = 0; i < G; ++i)
    mass += vals[i] * h * ((i == 0 || i == G - 1) ? 0.5 : 1.0);
  if (!(mass > 0.0)) throw std::runtime_error("free_convolve: empty density");

  SpectralDensity out;
  out.a = xs[std::max(0, i0 - 1)];
  out.b = xs[std::min(G - 1, i1 + 1)];
  out.evaluate = [xs, vals, mass, lo, hi, h](double x) {
    if (x <= lo || x >= hi) return 0.0;
    const double u = (x - lo) / h;
    const int i = std::min(static_cast<int>(u), static_cast<int>(xs.size()) - 2);
    const double f = u - i;
    return ((1.0 - f) * vals[i] + f * vals[i + 1]) / mass;
  };
  return out;
}

// ------------------------------------------------------------- quartic disk

double quartic_zc2(double t2, double t4) {
  const double disc = t2 * t2 + 12.0 * t4;
  if (disc < 0.0)
    throw std::invalid_argument("quartic_disk: outside single-cut regime");
  if (t4 == 0.0) return 4.0 / t2;  // semicircle limit
  return 2.0 / (3.0 * t4) * (std::sqrt(disc) - t2);
}

cplx quartic_disk(double t2, double t4, cplx z) {
  const double disc = t2 * t2 + 12.0 * t4;
  if (disc < 0.0)
    throw std::invalid_argument("quartic_disk: outside single-cut regime");
  const double zc2 = quartic_zc2(t2, t4);
  const cplx P = t4 * z * z + (2.0 * t2 + std::sqrt(disc)) / 3.0;
  // Branch ~ +z at infinity, cut on [-zc, zc].
  const cplx root = z * std::sqrt(1.0 - zc2 / (z * z));
  return 0.5 * (t4 * z * z * z + t2 * z - P * root);
}

double moments_of_disk(const std::function<cplx(cplx)>& W, int j,
                       double contour_radius) {
  auto contour = [&](double r) {
    const int N = 4096;
    cplx sum = 0.0;
    for (int k = 0; k < N; ++k) {
      const cplx z = r * std::exp(kI * (2.0 * kPi * k / N));
      sum += std::pow(z, j + 1) * W(z);
    }
    return sum / static_cast<double>(N);  // (1/2 pi i) oint = mean of z^{j+1} W
  };
  const cplx v = contour(contour_radius);
  const cplx v2 = contour(contour_radius * 1.17);
  if (std::abs(v - v2) > 1e-7 * (1.0 + std::abs(v)))
    throw std::runtime_error("moments_of_disk: contour radius sweep unstable");
  if (std::abs(v.imag()) > 1e-8)
    throw std::runtime_error("moments_of_disk: imaginary part too large");
  return v.real();
}

// ------------------------------------------------------- near-critical fit

namespace {

// Taylor coefficients in s = sqrt(eps) of the near-critical disk function,
// extracted as Cauchy integrals over the circle |s| = radius.  The map
// s -> W(zc (1 + s^2 muB / 2)) at t4 = t4c (1 - s^4 mu) is analytic near
// s = 0 once the branch factors are written with the winding in s explicit:
//   sqrt(t2^2 + 12 t4)      -> s^2 sqrt(mu),
//   sqrt(z^2 - zc(t4)^2)    -> s sqrt((z^2 - zc^2) / s^2),
// where (z^2 - zc^2)/s^2 stays near the positive constant 8 (muB + sqrt(mu))
// on the contour, so the principal square root never crosses its cut.
std::vector<cplx> scaling_contour_coeffs(double radius, double mu, double muB,
                                         int kmax) {
  const double t4c = -1.0 / 12.0;
  const double zc = std::sqrt(8.0);
  const int M = 512;
  std::vector<cplx> c(kmax + 1, 0.0);
  for (int j = 0; j < M; ++j) {
    const double th = 2.0 * kPi * j / M;
    const cplx s = radius * std::exp(kI * th);
    const cplx eps = s * s;
    const cplx t4 = t4c * (1.0 - eps * eps * mu);
    const cplx z = zc * (1.0 + eps * muB / 2.0);
    const cplx q = eps * std::sqrt(mu);  // sqrt(1 + 12 t4) on the scaling branch
    const cplx zc2 = 2.0 / (3.0 * t4) * (q - 1.0);
    const cplx ratio = (z * z - zc2) / (s * s);
    if (ratio.real() <= 0.0)
      throw std::runtime_error(
          "scaling_expand_quartic: branch unstable on contour (muB too close "
          "to -sqrt(mu) for this epsilon)");
    const cplx P = t4 * z * z + (2.0 + q) / 3.0;
    const cplx w = 0.5 * (t4 * z * z * z + z - P * s * std::sqrt(ratio));
    for (int k = 0; k <= kmax; ++k)
      c[k] += w * std::exp(-kI * (static_cast<double>(k) * th));
  }
  double rk = 1.0;
  for (int k = 0; k <= kmax; ++k) {
    c[k] /= static_cast<double>(M) * rk;
    rk *= radius;
  }
  return c;
}

}  // namespace

TruncatedSeries scaling_expand_quartic(double epsilon, double mu, double muB) {
  if (!(epsilon > 0.0) || epsilon > 0.1)
    throw std::invalid_argument("scaling_expand_quartic: epsilon in (0, 0.1]");
  if (!(mu > 0.0) || !(muB > -std::sqrt(mu)))
    throw std::invalid_argument(
        "scaling_expand_quartic: need mu > 0, muB > -sqrt(mu)");
  const int K = 10;
  const double r = std::sqrt(epsilon);
  const auto c = scaling_contour_coeffs(r, mu, muB, K);
  const auto c2 = scaling_contour_coeffs(0.8 * r, mu, muB, K);
  TruncatedSeries out;
  out.exponent_step = 0.5;  // Puiseux in eps: coefficient k multiplies eps^{k/2}
  out.exponent_offset = 0.0;
  out.coefficients.resize(K + 1);
  for (int k = 0; k <= K; ++k) {
    // Two-radius consistency and reality checks on the leading coefficients.
    if (k <= 4) {
      if (std::abs(c[k] - c2[k]) > 1e-9 * (1.0 + std::abs(c[k])) ||
          std::abs(c[k].imag()) > 1e-9 * (1.0 + std::abs(c[k])))
        throw std::runtime_error(
            "scaling_expand_quartic: contour extraction inconsistent");
    }
    out.coefficients[k] = c[k].real();
  }
  return out;
}

double scaling_cheb_residual(double mu, double muB, double c32) {
  const double zeta = muB / std::sqrt(mu);
  const double Q = 1.5 * std::pow(mu, -0.75) * c32;
  const double t3 = 4.0 * zeta * zeta * zeta - 3.0 * zeta;
  const double t2v = 2.0 * Q * Q - 1.0;
  return std::abs(t3 - t2v);
}

}  // namespace randsurf::freeprob
