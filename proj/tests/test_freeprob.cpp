// Tests for planar-limit analytics and free convolution.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "randsurf/freeprob.hpp"
#include "randsurf/maps.hpp"
#include "randsurf/specfun.hpp"

using namespace randsurf::freeprob;

namespace {
constexpr double kPi = 3.14159265358979323846;

double l1_distance(const SpectralDensity& f, const SpectralDensity& g,
                   double lo, double hi, int n = 2000) {
  double acc = 0.0;
  const double h = (hi - lo) / n;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + i * h;
    const double fa = (x >= f.a && x <= f.b) ? f.evaluate(x) : 0.0;
    const double ga = (x >= g.a && x <= g.b) ? g.evaluate(x) : 0.0;
    acc += std::abs(fa - ga) * h * ((i == 0 || i == n) ? 0.5 : 1.0);
  }
  return acc;
}

SpectralDensity point_mass(double a) {
  SpectralDensity d;
  d.a = d.b = a;
  d.evaluate = [](double) { return 0.0; };
  return d;
}

}  // namespace

TEST_CASE("semicircle density: normalization and nonnegativity") {
  for (double t2 : {0.5, 1.0, 2.0}) {
    const auto rho = semicircle(t2);
    double mass = 0.0;
    const int n = 2000;
    for (int i = 0; i <= n; ++i) {
      const double x = rho.a + (rho.b - rho.a) * i / n;
      const double v = rho.evaluate(x);
      CHECK(v >= 0.0);
      mass += v * (rho.b - rho.a) / n * ((i == 0 || i == n) ? 0.5 : 1.0);
    }
    // Trapezoid error at the sqrt edges is O(h^{3/2}).
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-4));
  }
}

TEST_CASE("stieltjes_of_density: semicircle closed form") {
  const auto rho = semicircle(1.0);
  // W(z) = (z - sqrt(z^2-4))/2 at z = 3 -> (3 - sqrt 5)/2.
  const cplx w = stieltjes_of_density(rho, cplx(3.0, 0.0));
  CHECK(std::abs(w - cplx((3.0 - std::sqrt(5.0)) / 2.0)) < 1e-9);
  // Normalization tail 1/z at large z.
  const cplx wf = stieltjes_of_density(rho, cplx(1e6, 0.0));
  CHECK(std::abs(wf - cplx(1e-6)) < 1e-9 * 1e-6 + 1e-15);
  CHECK_THROWS(stieltjes_of_density(rho, cplx(0.5, 0.0)));
}

TEST_CASE("density_from_stieltjes") {
  auto W = [](cplx z) { return 0.5 * (z - z * std::sqrt(1.0 - 4.0 / (z * z))); };
  CHECK(density_from_stieltjes(W, 0.0) == doctest::Approx(1.0 / kPi).epsilon(1e-4));
  CHECK(std::abs(density_from_stieltjes(W, 3.5)) < 1e-6);
  // Matches quartic_disk formula value at the origin for small t4.
  auto Wq = [](cplx z) { return quartic_disk(1.0, 0.1, z); };
  const double zc2 = quartic_zc2(1.0, 0.1);
  const double P0 = (2.0 + std::sqrt(1.0 + 1.2)) / 3.0;
  const double expect = P0 * std::sqrt(zc2) / (2.0 * kPi);
  CHECK(density_from_stieltjes(Wq, 0.0) == doctest::Approx(expect).epsilon(1e-4));
}

TEST_CASE("r_transform_series") {
  // Point mass at a: m_k = a^k -> R(z) = a.
  TruncatedSeries m;
  m.coefficients = {1, 0.7, 0.49, 0.343, 0.2401, 0.16807};
  auto R = r_transform_series(m);
  CHECK(R.coefficients[0] == doctest::Approx(0.7).epsilon(1e-12));
  for (size_t k = 1; k < R.coefficients.size(); ++k)
    CHECK(std::abs(R.coefficients[k]) < 1e-12);

  // Semicircle with variance s2: Catalan moments -> R(z) = s2 z.
  const double s2 = 1.7;
  TruncatedSeries cat;
  cat.coefficients.resize(9, 0.0);
  const double catalan[5] = {1, 1, 2, 5, 14};
  for (int k = 0; k <= 4; ++k)
    cat.coefficients[2 * k] = catalan[k] * std::pow(s2, k);
  auto Rc = r_transform_series(cat);
  CHECK(Rc.coefficients[1] == doctest::Approx(s2).epsilon(1e-12));
  for (size_t k = 0; k < Rc.coefficients.size(); ++k)
    if (k != 1) CHECK(std::abs(Rc.coefficients[k]) < 1e-10);

  // Truncation contract: order-2 input gives order-2 output.
  TruncatedSeries small;
  small.coefficients = {1.0, 0.3, 0.8};
  CHECK(r_transform_series(small).coefficients.size() == 2);

  CHECK_THROWS(r_transform_series(TruncatedSeries{1.0, 0.0, {2.0, 0.0, 1.0}}));

  // Round trip on random coefficient sets.
  std::srand(7);
  for (int trial = 0; trial < 20; ++trial) {
    TruncatedSeries mm;
    mm.coefficients.resize(10);
    mm.coefficients[0] = 1.0;
    for (size_t k = 1; k < 10; ++k)
      mm.coefficients[k] = (std::rand() % 2000 - 1000) / 500.0;
    const auto r = r_transform_series(mm);
    const auto back = moments_from_r(r, 9);
    for (size_t k = 0; k < 10; ++k)
      CHECK(back.coefficients[k] ==
            doctest::Approx(mm.coefficients[k]).epsilon(1e-9));
  }
}

TEST_CASE("free_convolve: semicircle + semicircle = wider semicircle") {
  const auto sc1 = semicircle(1.0);  // variance 1
  const auto out = free_convolve(sc1, sc1, 16);
  const auto sc2 = semicircle(0.5);  // variance 2, support [-2 sqrt2, 2 sqrt2]
  CHECK(l1_distance(out, sc2, -4.0, 4.0) < 0.02);
  CHECK(std::abs(out.a + 2.0 * std::sqrt(2.0)) < 0.15);
  CHECK(std::abs(out.b - 2.0 * std::sqrt(2.0)) < 0.15);
}

TEST_CASE("free_convolve: delta shift and identity element") {
  const auto sc = semicircle(1.0);
  const auto shifted = free_convolve(point_mass(0.8), sc, 16);
  // Translated semicircle.
  SpectralDensity expect;
  expect.a = sc.a + 0.8;
  expect.b = sc.b + 0.8;
  expect.evaluate = [&sc](double x) { return sc.evaluate(x - 0.8); };
  CHECK(l1_distance(shifted, expect, -3.0, 4.0) < 0.02);

  const auto same = free_convolve(sc, point_mass(0.0), 16);
  CHECK(l1_distance(same, sc, -3.0, 3.0) < 0.02);
}

TEST_CASE("free_convolve: commutative and associative") {
  const auto a = semicircle(1.0), b = semicircle(2.0);
  const auto ab = free_convolve(a, b, 16);
  const auto ba = free_convolve(b, a, 16);
  CHECK(l1_distance(ab, ba, -5.0, 5.0) < 1e-9);

  const auto c = semicircle(0.7);
  const auto ab_c = free_convolve(free_convolve(a, b, 8), c, 8);
  const auto a_bc = free_convolve(a, free_convolve(b, c, 8), 8);
  CHECK(l1_distance(ab_c, a_bc, -7.0, 7.0) < 1e-3);
}

TEST_CASE("quartic_disk") {
  // Critical point: zc^2 = 8 at (t2,t4) = (1, -1/12).
  CHECK(quartic_zc2(1.0, -1.0 / 12.0) == doctest::Approx(8.0).epsilon(1e-13));
  // t4 = 0 reduces to the semicircle transform.
  for (double zr : {2.5, 4.0, -3.0}) {
    const cplx z(zr, 0.3);
    const cplx wsc = 0.5 * (z - z * std::sqrt(1.0 - 4.0 / (z * z)));
    CHECK(std::abs(quartic_disk(1.0, 0.0, z) - wsc) < 1e-12);
  }
  // Large-z behaviour 1/z.
  const cplx far(250.0, 0.0);
  CHECK(std::abs(quartic_disk(1.0, 0.05, far) - 1.0 / far) < 1e-4 / std::abs(far));
  CHECK_THROWS(quartic_disk(1.0, -0.2, cplx(3.0)));
}

TEST_CASE("moments_of_disk vs exact fatgraph counts") {
  auto Wsc = [](cplx z) { return quartic_disk(1.0, 0.0, z); };
  // Catalan C_2 = 2 = planar pairing count of tr X^4.
  const auto wick = randsurf::maps::wick_enumerate({4}, true);
  double planar4 = 0.0;
  for (const auto& fc : wick)
    if (fc.genus == 0) planar4 = fc.symmetry_weight.convert_to<double>();
  CHECK(moments_of_disk(Wsc, 4, 3.0) == doctest::Approx(planar4).epsilon(1e-8));
  // Odd moments of an even density vanish.
  CHECK(std::abs(moments_of_disk(Wsc, 3, 3.0)) < 1e-9);
  CHECK(std::abs(moments_of_disk(Wsc, 5, 3.0)) < 1e-9);

  // The disk moments expand in powers of (-t4) (the quartic coupling enters
  // the weight as exp(-N t4 tr X^4 / 4)), so d<tr X^4>/dt4 at t4 = 0 is minus
  // the weighted connected genus-0 count of two quadrangle vertices
  // (tutte 2 quadrangles = 9).
  const double dt = 1e-5;
  auto m4 = [&](double t4) {
    auto W = [&](cplx z) { return quartic_disk(1.0, t4, z); };
    return moments_of_disk(W, 4, 3.5);
  };
  const double deriv = (m4(dt) - m4(-dt)) / (2.0 * dt);
  const auto wick2 = randsurf::maps::wick_enumerate({4, 4}, true);
  double w2 = 0.0;
  for (const auto& fc : wick2)
    if (fc.genus == 0) w2 = fc.symmetry_weight.convert_to<double>();
  CHECK(deriv == doctest::Approx(-w2).epsilon(1e-4));

  // First four coefficients of the quadrangulation series from the disk
  // moments at small negative t4, against the exact formula.
  const double t4 = 1e-3;
  auto W = [&](cplx z) { return quartic_disk(1.0, -t4, z); };
  const double m = moments_of_disk(W, 4, 3.5);
  double series = 0.0;
  for (long n = 1; n <= 4; ++n)
    series += randsurf::maps::tutte_formula(n).convert_to<double>() *
              std::pow(t4, n - 1);
  CHECK(m == doctest::Approx(series).epsilon(1e-5));
}

TEST_CASE("scaling_expand_quartic: printed coefficients and Chebyshev curve") {
  const double mu = 1.3, muB = 0.4;
  const auto fit = scaling_expand_quartic(0.01, mu, muB);
  REQUIRE(fit.exponent_step == 0.5);
  const double c0 = fit.coefficients[0];
  const double c_half = fit.coefficients[1];
  const double c1 = fit.coefficients[2];
  const double c32 = fit.coefficients[3];
  CHECK(c0 == doctest::Approx(std::sqrt(2.0) / 3.0).epsilon(1e-9));
  CHECK(std::abs(c_half) < 1e-8);
  CHECK(c1 == doctest::Approx(-muB / std::sqrt(2.0)).epsilon(1e-10));
  const double expected32 = std::sqrt(2.0) / 3.0 * (2.0 * muB - std::sqrt(mu)) *
                            std::sqrt(muB + std::sqrt(mu));
  CHECK(c32 == doctest::Approx(expected32).epsilon(1e-9));
  // Dimensionless variables solve T_3(zeta) = T_2(Q).
  CHECK(scaling_cheb_residual(mu, muB, c32) < 1e-9);

  CHECK_THROWS(scaling_expand_quartic(0.5, 1.0, 0.0));
  CHECK_THROWS(scaling_expand_quartic(0.01, 1.0, -2.0));
}
