// potts_curves.cpp
//
// See potts_curves.hpp for the module overview.  Implementation notes:
//
//   * Curve templates are stored with exact rational coefficients; the
//     couplings t2, t3, t4 are converted from their binary double values
//     exactly, so resolved curves round-trip through JSON losslessly.
//
//   * Sheet expansions at z -> infinity are computed by Hensel lifting in a
//     truncated Laurent-series arithmetic over s (z = s^m, m = 1, 2, 3
//     absorbing the ramification), seeded with the leading terms that
//     identify the sheet; fix_constants runs damped Gauss-Newton on the
//     deviations of the lifted coefficients from their known values.
//
//   * The elliptic W_Y solver parametrizes the w-plane (z = delta_U + w^2)
//     by the torus map w(sigma) and expands all matching conditions at the
//     puncture sigma_inf = (1 + tau)/2 numerically.

#include "randsurf/potts_curves.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "randsurf/specfun.hpp"

namespace randsurf::potts_curves {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Exact dyadic rational from a double.
Rat exact_rat(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("exact_rat: not finite");
  if (x == 0.0) return Rat(0);
  int exp = 0;
  double m = std::frexp(x, &exp);  // x = m * 2^exp, 0.5 <= |m| < 1
  long long mant = static_cast<long long>(std::ldexp(m, 53));
  exp -= 53;
  Rat r(mant);
  boost::multiprecision::cpp_int two(2);
  if (exp >= 0) {
    r *= Rat(boost::multiprecision::pow(two, exp));
  } else {
    r /= Rat(boost::multiprecision::pow(two, -exp));
  }
  return r;
}

double to_d(const Rat& r) { return r.convert_to<double>(); }

}  // namespace

// ------------------------------------------------------------- nu and gamma

NuGamma nu_gamma(double q) {
  if (!(q > 0.0 && q < 4.0))
    throw std::invalid_argument("nu_gamma: need 0 < q < 4");
  NuGamma out;
  out.nu = std::acos((q - 2.0) / 2.0) / kPi;
  out.gamma_s = out.nu / (out.nu - 2.0);
  return out;
}

double kpz(double cM) {
  if (cM > 1.0) throw std::invalid_argument("kpz: need cM <= 1");
  return (cM - 1.0 - std::sqrt((cM - 1.0) * (cM - 25.0))) / 12.0;
}

// ------------------------------------------------------ BivariatePolynomial

bool BivariatePolynomial::numeric() const {
  for (const auto& [ij, c] : coefficients)
    if (!c.sym.empty()) return false;
  return true;
}

std::vector<std::string> BivariatePolynomial::unknowns() const {
  std::vector<std::string> names;
  for (const auto& [ij, c] : coefficients)
    for (const auto& [n, m] : c.sym) names.push_back(n);
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return names;
}

cplx BivariatePolynomial::evaluate(cplx x, cplx y) const {
  if (!numeric())
    throw std::runtime_error("BivariatePolynomial: unresolved constants");
  cplx out = 0.0;
  for (const auto& [ij, c] : coefficients)
    out += to_d(c.known) * std::pow(x, ij.first) * std::pow(y, ij.second);
  return out;
}

BivariatePolynomial BivariatePolynomial::resolve(
    const std::map<std::string, Rat>& values) const {
  BivariatePolynomial out = *this;
  for (auto& [ij, c] : out.coefficients) {
    for (const auto& [name, mult] : c.sym) {
      auto it = values.find(name);
      if (it == values.end())
        throw std::invalid_argument("resolve: missing constant " + name);
      c.known += mult * it->second;
    }
    c.sym.clear();
  }
  // Drop exact zeros that may have been produced.
  for (auto it = out.coefficients.begin(); it != out.coefficients.end();) {
    if (it->second.known == 0 && it->second.sym.empty())
      it = out.coefficients.erase(it);
    else
      ++it;
  }
  out.deg_x = out.deg_y = 0;
  for (const auto& [ij, c] : out.coefficients) {
    out.deg_x = std::max(out.deg_x, ij.first);
    out.deg_y = std::max(out.deg_y, ij.second);
  }
  return out;
}

BivariatePolynomial BivariatePolynomial::partial_x() const {
  BivariatePolynomial out = *this;
  out.coefficients.clear();
  out.deg_x = out.deg_y = 0;
  for (const auto& [ij, c] : coefficients) {
    if (ij.first == 0) continue;
    CurveCoeff d = c;
    d.known *= ij.first;
    for (auto& [n, m] : d.sym) m *= ij.first;
    out.coefficients[{ij.first - 1, ij.second}] = d;
    out.deg_x = std::max(out.deg_x, ij.first - 1);
    out.deg_y = std::max(out.deg_y, ij.second);
  }
  return out;
}

BivariatePolynomial BivariatePolynomial::partial_y() const {
  BivariatePolynomial out = *this;
  out.coefficients.clear();
  out.deg_x = out.deg_y = 0;
  for (const auto& [ij, c] : coefficients) {
    if (ij.second == 0) continue;
    CurveCoeff d = c;
    d.known *= ij.second;
    for (auto& [n, m] : d.sym) m *= ij.second;
    out.coefficients[{ij.first, ij.second - 1}] = d;
    out.deg_x = std::max(out.deg_x, ij.first);
    out.deg_y = std::max(out.deg_y, ij.second - 1);
  }
  return out;
}

// ------------------------------------------------------------ the templates

namespace {

struct TemplateBuilder {
  BivariatePolynomial poly;
  void add(int i, int j, const Rat& v) {
    if (v == 0) return;
    poly.coefficients[{i, j}].known += v;
    poly.deg_x = std::max(poly.deg_x, i);
    poly.deg_y = std::max(poly.deg_y, j);
  }
  void addc(int i, int j, const std::string& name, const Rat& mult) {
    poly.coefficients[{i, j}].sym[name] += mult;
    poly.deg_x = std::max(poly.deg_x, i);
    poly.deg_y = std::max(poly.deg_y, j);
  }
};

}  // namespace

BivariatePolynomial curve_template(int q, int k, int p, double t2d, double t3d,
                                   double t4d) {
  const Rat t2 = exact_rat(t2d), t3 = exact_rat(t3d), t4 = exact_rat(t4d);
  TemplateBuilder b;
  b.poly.q = q;
  b.poly.k = k;
  b.poly.p = p;
  b.poly.t2 = t2;
  b.poly.t3 = t3;
  b.poly.t4 = t4;

  if (q == 1 && k == 1 && p == 1) {
    // Monic quadratic-in-y curve of the cubic model: y^2 - (U'(x) + x) y +
    // x U'(x) + c00 x + c10, U'(x) = t3 x^2 + t2 x.
    if (t3 == 0) throw std::invalid_argument("curve_template: t3 = 0");
    b.add(0, 2, 1);
    b.add(2, 1, -t3);
    b.add(1, 1, -(t2 + 1));
    b.add(3, 0, t3);
    b.add(2, 0, t2);
    b.addc(1, 0, "c00", 1);
    b.addc(0, 0, "c10", 1);
  } else if (q == 1 && k == 2 && p == 1) {
    if (t4 == 0) throw std::invalid_argument("curve_template: t4 = 0");
    b.add(4, 0, 1);
    b.add(3, 1, -1);
    b.add(3, 0, t3 / t4);
    b.add(0, 2, Rat(1) / t4);
    b.add(2, 1, -t3 / t4);
    b.add(2, 0, (t2 + t4) / t4);
    b.add(1, 1, -(t2 + 1) / t4);
    b.addc(1, 0, "c00", -1);
    b.addc(0, 1, "c11", 1);
    b.addc(0, 0, "c10", 1);
  } else if (q == 2 && k == 1 && p == 1) {
    if (t3 == 0) throw std::invalid_argument("curve_template: t3 = 0");
    b.add(4, 0, 1);
    b.add(3, 1, -2);
    b.add(0, 3, -Rat(1) / t3);
    b.add(0, 2, (1 - t2) / (t3 * t3));
    b.add(2, 2, 1);
    b.add(2, 1, -(t2 + 2) / t3);
    b.add(2, 0, (t3 * t3 - t2 * t2) / (t3 * t3));
    b.add(1, 2, (t2 + 2) / t3);
    b.add(1, 1, (t2 * t2 - t3 * t3) / (t3 * t3));
    b.addc(0, 1, "c11", 1);
    b.addc(0, 0, "c10", 1);
  } else if (q == 2 && k == 1 && p == 2) {
    if (t3 == 0) throw std::invalid_argument("curve_template: t3 = 0");
    b.add(4, 0, 1);
    b.add(3, 0, 4 * t2 / t3);
    b.add(0, 3, Rat(4) / t3);
    b.add(2, 2, -1);
    b.add(2, 1, -(4 + 2 * t2) / t3);
    b.add(1, 2, -2 * t2 / t3);
    b.add(2, 0, (4 * t2 * t2 + 2 * t3 * t3) / (t3 * t3));
    b.add(0, 2, 8 * t2 / (t3 * t3));
    b.add(1, 1, -4 * t2 * (2 + t2) / (t3 * t3));
    b.addc(1, 0, "c00", -1);
    b.addc(0, 1, "c11", 1);
    b.addc(0, 0, "c10", 1);
  } else if (q == 3 && k == 1 && p == 1) {
    if (t3 == 0) throw std::invalid_argument("curve_template: t3 = 0");
    const Rat t32 = t3 * t3;
    b.add(6, 0, 1);
    b.add(5, 0, -6 * t2 / t3);
    b.add(5, 1, -6);
    b.add(0, 5, -Rat(4) / t3);
    b.add(4, 2, 13);
    b.add(4, 1, (24 * t2 - 6) / t3);
    b.add(4, 0, (9 * t2 * t2 + 2 * t32) / t32);
    b.add(0, 4, (17 - 18 * t2) / t32);
    b.add(3, 2, (24 - 28 * t2) / t3);
    b.add(3, 1, (-12 * t2 * t2 + 24 * t2 - 8 * t32) / t32);
    b.add(3, 3, -12);
    b.addc(3, 0, "c00", -1);
    b.addc(2, 1, "c11", 1);
    b.addc(2, 0, "c10", 1);
    b.add(2, 3, (6 * t2 - 30) / t3);
    b.add(2, 2, (-15 * t2 * t2 - 54 * t2 + 10 * t32 + 9) / t32);
    b.add(2, 4, 4);
    b.addc(1, 2, "c22", -1);
    b.addc(1, 1, "c21", -1);
    b.addc(1, 0, "c20", -1);
    b.add(1, 4, (4 * t2 + 12) / t3);
    b.add(1, 3, (18 * t2 * t2 + 24 * t2 - 4 * t32 - 18) / t32);
    b.addc(0, 3, "c33", 1);
    b.addc(0, 2, "c32", 1);
    b.addc(0, 1, "c31", 1);
    b.addc(0, 0, "c30", 1);
  } else if (q == 3 && k == 1 && p == 3) {
    if (t3 == 0) throw std::invalid_argument("curve_template: t3 = 0");
    const Rat t32 = t3 * t3;
    b.add(6, 0, 1);
    b.add(5, 0, 18 * t2 / t3);
    b.add(5, 1, 6);
    b.add(0, 5, Rat(108) / t3);
    b.add(4, 2, 9);
    b.add(4, 1, (72 * t2 - 18) / t3);
    b.add(4, 0, (117 * t2 * t2 + 6 * t32) / t32);
    b.add(0, 4, (702 * t2 - 243) / t32);
    b.add(3, 3, -4);
    b.add(3, 2, (36 * t2 - 72) / t3);
    b.add(3, 1, (24 * t32 + 252 * t2 * t2 - 216 * t2) / t32);
    b.addc(3, 0, "c00", -1);
    b.add(2, 4, -12);
    b.add(2, 3, -(90 * t2 + 54) / t3);
    b.add(2, 2, (81 - 486 * t2 - 135 * t2 * t2 + 18 * t32) / t32);
    b.addc(2, 1, "c11", 1);
    b.addc(2, 0, "c10", 1);
    b.add(1, 4, 36 * (1 - t2) / t3);
    b.add(1, 3, (162 - 234 * t2 * t2 - 12 * t32) / t32);
    b.addc(1, 2, "c22", -1);
    b.addc(1, 1, "c21", -1);
    b.addc(1, 0, "c20", -1);
    b.addc(0, 3, "c33", 1);
    b.addc(0, 2, "c32", 1);
    b.addc(0, 1, "c31", 1);
    b.addc(0, 0, "c30", 1);
  } else {
    throw std::invalid_argument("curve_template: unsupported (q, k, p)");
  }
  return b.poly;
}

// --------------------------------------------------------------------- JSON

std::string curve_to_json(const BivariatePolynomial& curve) {
  if (!curve.numeric())
    throw std::runtime_error("curve_to_json: unresolved constants");
  std::ostringstream os;
  os << "{\"monomials\": [";
  bool first = true;
  for (const auto& [ij, c] : curve.coefficients) {
    if (c.known == 0) continue;
    if (!first) os << ", ";
    first = false;
    os << "[" << ij.first << ", " << ij.second << ", "
       << boost::multiprecision::numerator(c.known).str() << ", "
       << boost::multiprecision::denominator(c.known).str() << "]";
  }
  os << "]}";
  return os.str();
}

// ------------------------------------------------------------- dense + roots

namespace {

// Dense numeric view c[i][j] = coefficient of x^i y^j.
struct Dense {
  int dx = 0, dy = 0;
  std::vector<std::vector<double>> c;
  cplx eval(cplx x, cplx y) const {
    cplx out = 0.0;
    for (int i = dx; i >= 0; --i) {
      cplx row = 0.0;
      for (int j = dy; j >= 0; --j) row = row * y + c[i][j];
      out = out * x + row;
    }
    return out;
  }
};

Dense to_dense(const BivariatePolynomial& f) {
  if (!f.numeric()) throw std::runtime_error("to_dense: unresolved constants");
  Dense d;
  d.dx = f.deg_x;
  d.dy = f.deg_y;
  d.c.assign(d.dx + 1, std::vector<double>(d.dy + 1, 0.0));
  for (const auto& [ij, cc] : f.coefficients)
    d.c[ij.first][ij.second] = to_d(cc.known);
  return d;
}

Dense transpose(const Dense& d) {
  Dense t;
  t.dx = d.dy;
  t.dy = d.dx;
  t.c.assign(t.dx + 1, std::vector<double>(t.dy + 1, 0.0));
  for (int i = 0; i <= d.dx; ++i)
    for (int j = 0; j <= d.dy; ++j) t.c[j][i] = d.c[i][j];
  return t;
}

// F(y - x, y) as a dense polynomial in (x, y).
Dense shear_shift(const Dense& d) {
  Dense out;
  out.dx = d.dx;
  out.dy = d.dx + d.dy;
  out.c.assign(out.dx + 1, std::vector<double>(out.dy + 1, 0.0));
  // binomials
  std::vector<std::vector<double>> binom(d.dx + 1,
                                         std::vector<double>(d.dx + 1, 0.0));
  for (int n = 0; n <= d.dx; ++n) {
    binom[n][0] = 1.0;
    for (int r = 1; r <= n; ++r)
      binom[n][r] = binom[n - 1][r - 1] + (r <= n - 1 ? binom[n - 1][r] : 0.0);
  }
  for (int i = 0; i <= d.dx; ++i)
    for (int j = 0; j <= d.dy; ++j) {
      const double v = d.c[i][j];
      if (v == 0.0) continue;
      // (y - x)^i = sum_r binom(i,r) y^{i-r} (-x)^r
      for (int r = 0; r <= i; ++r) {
        const double sign = (r % 2 == 0) ? 1.0 : -1.0;
        out.c[r][i - r + j] += v * binom[i][r] * sign;
      }
    }
  return out;
}

// Roots of a dense univariate complex polynomial (Durand-Kerner).
std::vector<cplx> poly_roots(std::vector<cplx> a) {
  while (!a.empty() && std::abs(a.back()) < 1e-300) a.pop_back();
  const int n = static_cast<int>(a.size()) - 1;
  if (n < 1) return {};
  for (auto& v : a) v /= a[n];
  std::vector<cplx> r(n);
  for (int i = 0; i < n; ++i)
    r[i] = std::pow(cplx(0.4, 0.9), i + 1);
  for (int iter = 0; iter < 600; ++iter) {
    double shift = 0.0;
    for (int i = 0; i < n; ++i) {
      cplx num = a[n];
      for (int k = n - 1; k >= 0; --k) num = num * r[i] + a[k];
      cplx den = 1.0;
      for (int j = 0; j < n; ++j)
        if (j != i) den *= (r[i] - r[j]);
      const cplx d = num / den;
      r[i] -= d;
      shift = std::max(shift, std::abs(d));
    }
    if (shift < 1e-14) break;
  }
  return r;
}

std::vector<cplx> section_roots(const Dense& d, cplx x) {
  std::vector<cplx> a(d.dy + 1, 0.0);
  for (int j = 0; j <= d.dy; ++j) {
    cplx v = 0.0;
    for (int i = d.dx; i >= 0; --i) v = v * x + d.c[i][j];
    a[j] = v;
  }
  return poly_roots(std::move(a));
}

}  // namespace

std::vector<cplx> y_roots(const BivariatePolynomial& F, cplx x) {
  return section_roots(to_dense(F), x);
}

std::vector<cplx> x_roots(const BivariatePolynomial& F, cplx y) {
  return section_roots(transpose(to_dense(F)), y);
}

// ---------------------------------------------------------- Laurent series

namespace {

// Truncated Laurent series in s: sum over exponents >= lo of coef * s^e.
struct Series {
  int lo = -12;
  std::map<int, cplx> t;  // exponent -> coefficient

  void set(int e, cplx v) {
    if (e < lo || std::abs(v) < 1e-300) return;
    t[e] = v;
  }
  cplx get(int e) const {
    auto it = t.find(e);
    return it == t.end() ? cplx(0.0) : it->second;
  }
  int leading() const {  // largest exponent with nonzero coefficient
    if (t.empty()) return lo - 1;
    return t.rbegin()->first;
  }
  void prune() {
    for (auto it = t.begin(); it != t.end();)
      it = (std::abs(it->second) < 1e-250) ? t.erase(it) : std::next(it);
  }
};

Series s_add(const Series& a, const Series& b) {
  Series out;
  out.lo = std::min(a.lo, b.lo);
  out.t = a.t;
  for (const auto& [e, v] : b.t) out.t[e] += v;
  out.prune();
  return out;
}

Series s_scale(const Series& a, cplx c) {
  Series out = a;
  for (auto& [e, v] : out.t) v *= c;
  out.prune();
  return out;
}

Series s_mul(const Series& a, const Series& b) {
  Series out;
  out.lo = std::min(a.lo, b.lo);
  for (const auto& [ea, va] : a.t)
    for (const auto& [eb, vb] : b.t) {
      const int e = ea + eb;
      if (e < out.lo) continue;
      out.t[e] += va * vb;
    }
  out.prune();
  return out;
}

Series s_mono(int e, cplx v, int lo) {
  Series out;
  out.lo = lo;
  out.set(e, v);
  return out;
}

// 1 / a, for a with nonvanishing leading coefficient.
Series s_inv(const Series& a) {
  const int la = a.leading();
  if (la < a.lo) throw std::runtime_error("series inverse of zero");
  const cplx c0 = a.get(la);
  // a = c0 s^la (1 + u), |u| -> 0; invert by Neumann series.
  Series u;
  u.lo = a.lo - la;
  for (const auto& [e, v] : a.t)
    if (e != la) u.set(e - la, v / c0);
  Series acc = s_mono(0, 1.0, u.lo);   // 1
  Series term = s_mono(0, 1.0, u.lo);  // (-u)^k
  const Series mu = s_scale(u, -1.0);
  for (int k = 1; k <= 64; ++k) {
    term = s_mul(term, mu);
    if (term.t.empty()) break;
    acc = s_add(acc, term);
  }
  Series out;
  out.lo = a.lo - 2 * la;  // generous
  for (const auto& [e, v] : acc.t) out.set(e - la, v / c0);
  return out;
}

// Evaluate F(x, y) with x = s^m (as a series) and y the given series.
Series f_of_series(const Dense& f, int m, const Series& y, int lo) {
  // powers of y
  std::vector<Series> yp(f.dy + 1);
  yp[0] = s_mono(0, 1.0, lo);
  for (int j = 1; j <= f.dy; ++j) yp[j] = s_mul(yp[j - 1], y);
  Series out;
  out.lo = lo;
  for (int i = 0; i <= f.dx; ++i)
    for (int j = 0; j <= f.dy; ++j) {
      const double v = f.c[i][j];
      if (v == 0.0) continue;
      Series term = s_scale(yp[j], v);
      // multiply by s^{m i}
      Series shifted;
      shifted.lo = lo;
      for (const auto& [e, w] : term.t) shifted.set(e + m * i, w);
      out = s_add(out, shifted);
    }
  out.prune();
  return out;
}

// Hensel lifting of the y-branch of f(s^m, y) = 0 from the given seed.
// Returns the lifted series (depth = lo); throws when the correction fails
// to shrink (wrong seed / merged branches).
Series hensel_lift(const Dense& f, int m, const Series& seed, int lo) {
  // dF/dy
  Dense fy;
  fy.dx = f.dx;
  fy.dy = std::max(0, f.dy - 1);
  fy.c.assign(fy.dx + 1, std::vector<double>(fy.dy + 1, 0.0));
  for (int i = 0; i <= f.dx; ++i)
    for (int j = 1; j <= f.dy; ++j) fy.c[i][j - 1] = f.c[i][j] * j;

  double fscale = 1.0;
  for (int i = 0; i <= f.dx; ++i)
    for (int j = 0; j <= f.dy; ++j) fscale = std::max(fscale, std::abs(f.c[i][j]));
  double ymax = 1.0;
  for (const auto& [e, v] : seed.t) ymax = std::max(ymax, std::abs(v));
  const double rscale = fscale * std::pow(ymax, std::max(1, f.dy));

  Series y = seed;
  y.lo = lo;
  double best_rmax = 1e300;
  int flat = 0;
  for (int iter = 0; iter < 80; ++iter) {
    Series r = f_of_series(f, m, y, lo - 4);
    Series d = f_of_series(fy, m, y, lo - 4);
    const int la = d.leading();
    // With y truncated at lo, the equation can only be enforced at orders
    // >= lo + la; measure the residual on that window.
    double rmax = 0.0;
    for (const auto& [e, v] : r.t)
      if (e >= lo + la) rmax = std::max(rmax, std::abs(v));
    if (rmax < 1e-11 * rscale) return y;
    if (rmax > 0.9 * best_rmax) {
      if (++flat > 4) break;
    } else {
      flat = 0;
    }
    best_rmax = std::min(best_rmax, rmax);
    Series corr = s_mul(r, s_inv(d));
    y = s_add(y, s_scale(corr, -1.0));
    y.lo = lo;
    for (auto it = y.t.begin(); it != y.t.end();)
      it = (it->first < lo) ? y.t.erase(it) : std::next(it);
  }
  if (best_rmax > 1e-7 * rscale)
    throw std::runtime_error("hensel_lift: stalled (bad seed?)");
  return y;
}

// ------------------------------------------------- fix_constants machinery

enum class Orient { y_of_x, x_of_y, shifted };  // shifted: F(y - z, y) = 0

struct Pin {
  int order = 0;  // exponent of s
  cplx value;
};

struct BranchCond {
  Orient orient = Orient::y_of_x;
  int m = 1;
  std::vector<std::pair<int, cplx>> seed;
  std::vector<Pin> pins;
};

std::vector<BranchCond> branch_conditions(const BivariatePolynomial& tmpl) {
  const double t2 = to_d(tmpl.t2), t3 = to_d(tmpl.t3), t4 = to_d(tmpl.t4);
  std::vector<BranchCond> conds;
  auto Y = Orient::y_of_x;
  auto X = Orient::x_of_y;
  auto S = Orient::shifted;

  if (tmpl.q == 1 && tmpl.k == 1) {
    conds.push_back({Y, 1, {{1, 1.0}}, {{0, 0.0}, {-1, 1.0}}});
    conds.push_back({Y, 1, {{2, t3}, {1, t2}}, {{0, 0.0}, {-1, -1.0}}});
  } else if (tmpl.q == 1 && tmpl.k == 2) {
    conds.push_back({Y, 1, {{1, 1.0}}, {{0, 0.0}, {-1, 1.0}}});
    conds.push_back(
        {Y, 1, {{3, t4}, {2, t3}, {1, t2}}, {{0, 0.0}, {-1, -1.0}}});
    // Shifted-curve sheets y = z + w^j t4^{-1/3} z^{1/3} + ..., w = e^{2 pi
    // i/3} here (the printed omega = e^{i pi/3} appears squared).
    const double c13 = std::pow(t4, -1.0 / 3.0);
    const double c_m13 = (t3 * t3 - 3.0 * (t2 - 1.0) * t4) /
                         (9.0 * std::pow(t4, 5.0 / 3.0));
    const double c_m23 = (2.0 * t3 * t3 * t3 - 9.0 * (t2 - 1.0) * t3 * t4) /
                         (81.0 * std::pow(t4, 7.0 / 3.0));
    for (int j = 0; j < 3; ++j) {
      const cplx w = std::exp(cplx(0.0, 2.0 * kPi * j / 3.0));
      conds.push_back({S,
                       3,
                       {{3, 1.0}, {1, w * c13}},
                       {{0, -t3 / (3.0 * t4)},
                        {-1, std::conj(w) * c_m13},
                        {-2, -w * c_m23},
                        {-3, 1.0 / 3.0}}});
    }
  } else if (tmpl.q == 2 && tmpl.p == 1) {
    const double rt = std::pow(t3, -0.5);  // requires t3 > 0 for real sheets
    conds.push_back({Y, 2, {{4, t3}, {2, t2}}, {{0, 0.0}, {-2, -1.0}}});
    for (int sgn : {+1, -1}) {
      conds.push_back({Y,
                       2,
                       {{2, 1.0}, {1, sgn * rt}},
                       {{0, -(t2 - 1.0) / (2.0 * t3)},
                        {-1, sgn * (t2 - 1.0) * (t2 - 1.0) / 8.0 * rt * rt * rt},
                        {-2, 0.5}}});
    }
  } else if (tmpl.q == 2 && tmpl.p == 2) {
    const double rt = std::pow(t3, -0.5);
    conds.push_back({Y, 2, {{2, 1.0}}, {{0, 0.0}, {-2, 1.0}}});
    conds.push_back(
        {Y, 2, {{4, t3 / 4.0}, {2, t2 / 2.0}}, {{0, 0.0}, {-2, 0.0}}});
    conds.push_back(
        {Y, 2, {{2, -1.0}}, {{0, -2.0 * t2 / t3}, {-2, -1.0}}});
    // x-sheets (G_Y^{(2)}): z - 1/z; +-2 t3^{-1/2} z^{1/2} - t2/t3 ...;
    // -z - 2 t2/t3 + 1/z.
    conds.push_back({X, 2, {{2, 1.0}}, {{0, 0.0}, {-2, -1.0}}});
    for (int sgn : {+1, -1}) {
      conds.push_back({X,
                       2,
                       {{1, sgn * 2.0 * rt}},
                       {{0, -t2 / t3},
                        {-1, sgn * t2 * t2 / 4.0 * rt * rt * rt},
                        {-2, 0.0}}});
    }
    conds.push_back({X, 2, {{2, -1.0}}, {{0, -2.0 * t2 / t3}, {-2, 1.0}}});
  } else if (tmpl.q == 3 && tmpl.p == 1) {
    const double rt = std::pow(t3, -0.5);
    const double r3 = rt * rt * rt;
    conds.push_back({Y, 2, {{4, t3}, {2, t2}}, {{0, 0.0}, {-2, -1.0}}});
    // x-sheets (G_Y^{(1)}, six of them).
    for (int sgn : {+1, -1})
      conds.push_back({X,
                       2,
                       {{1, sgn * rt}},
                       {{0, -t2 / (2.0 * t3)},
                        {-1, sgn * t2 * t2 / 8.0 * r3},
                        {-2, 0.5}}});
    for (int sgn : {+1, -1})
      conds.push_back({X,
                       2,
                       {{2, 1.0}, {1, sgn * 2.0 * rt}},
                       {{0, t2 / t3},
                        {-1, sgn * t2 * t2 / 4.0 * r3},
                        {-2, 0.0}}});
    for (int sgn : {+1, -1})
      conds.push_back({X,
                       2,
                       {{2, 2.0}, {1, sgn * rt}},
                       {{0, 5.0 * t2 / (2.0 * t3)},
                        {-1, sgn * t2 * t2 / 8.0 * r3},
                        {-2, -0.5}}});
    // Shifted-curve sheets (G^Y_{(2)} data): F(y - z, y) = 0.
    for (int sgn : {+1, -1})
      conds.push_back({S,
                       2,
                       {{2, 1.0}, {1, sgn * rt}},
                       {{0, -(t2 - 1.0) / (2.0 * t3)},
                        {-1, sgn * (t2 - 1.0) * (t2 - 1.0) / 8.0 * r3},
                        {-2, 0.5}}});
    conds.push_back(
        {S, 2, {{4, t3 / 4.0}, {2, t2 / 2.0}}, {{0, 0.0}, {-2, 0.0}}});
    for (int sgn : {+1, -1}) {
      const cplx is(0.0, sgn * 1.0);
      conds.push_back({S,
                       2,
                       {{2, -1.0}, {1, is * rt}},
                       {{0, -(t2 - 1.0) / (2.0 * t3)},
                        {-1, is * (t2 - 1.0) * (t2 - 1.0) / 8.0 * r3},
                        {-2, -0.5}}});
    }
  } else if (tmpl.q == 3 && tmpl.p == 3) {
    const double rt = std::pow(t3, -0.5);
    const double r3 = rt * rt * rt;
    conds.push_back({Y, 2, {{2, 1.0}}, {{0, 0.0}, {-2, 1.0}}});
    // x-sheets (G_Y^{(3)}, six of them).
    conds.push_back({X, 2, {{2, 1.0}}, {{0, 0.0}, {-2, -1.0}}});
    for (int sgn : {+1, -1})
      conds.push_back({X,
                       2,
                       {{1, sgn * 3.0 * rt}},
                       {{0, -3.0 * t2 / (2.0 * t3)},
                        {-1, sgn * 3.0 * t2 * t2 / 8.0 * r3},
                        {-2, -0.5}}});
    for (int sgn : {+1, -1})
      conds.push_back({X,
                       2,
                       {{2, -2.0}, {1, sgn * 3.0 * rt}},
                       {{0, -9.0 * t2 / (2.0 * t3)},
                        {-1, sgn * 3.0 * t2 * t2 / 8.0 * r3},
                        {-2, 0.5}}});
    conds.push_back({X, 2, {{2, -3.0}}, {{0, -6.0 * t2 / t3}, {-2, 1.0}}});
  } else {
    throw std::invalid_argument("branch_conditions: unsupported template");
  }
  return conds;
}

// Residual vector of all pin deviations for a numeric curve.
std::vector<cplx> pin_residuals(const Dense& dn,
                                const std::vector<BranchCond>& conds,
                                int depth) {
  const Dense dt = transpose(dn);
  const Dense ds = shear_shift(dn);
  std::vector<cplx> out;
  for (const auto& bc : conds) {
    const Dense* f = &dn;
    if (bc.orient == Orient::x_of_y) f = &dt;
    if (bc.orient == Orient::shifted) f = &ds;
    int lo = depth;
    for (const auto& pin : bc.pins) lo = std::min(lo, pin.order - 1);
    Series seed;
    seed.lo = lo;
    for (const auto& [e, v] : bc.seed) seed.set(e, v);
    Series y = hensel_lift(*f, bc.m, seed, lo);
    for (const auto& pin : bc.pins) out.push_back(y.get(pin.order) - pin.value);
  }
  return out;
}

// Discriminant in y of a dense curve with deg_y 2 or 3, as a real
// polynomial in x (ascending coefficients).
std::vector<double> disc_y_poly(const Dense& f) {
  auto col = [&](int j) {
    std::vector<double> a(f.dx + 1, 0.0);
    for (int i = 0; i <= f.dx; ++i) a[i] = (j <= f.dy) ? f.c[i][j] : 0.0;
    return a;
  };
  auto mul = [](const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i)
      for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
  };
  auto axpy = [](std::vector<double>& a, double s,
                 const std::vector<double>& b) {
    if (a.size() < b.size()) a.resize(b.size(), 0.0);
    for (size_t i = 0; i < b.size(); ++i) a[i] += s * b[i];
  };
  if (f.dy == 2) {
    std::vector<double> out = mul(col(1), col(1));
    axpy(out, -4.0, mul(col(2), col(0)));
    return out;
  }
  if (f.dy == 3) {
    const auto a = col(3), b = col(2), c = col(1), d = col(0);
    std::vector<double> out = mul(mul(a, b), mul(c, d));
    for (auto& v : out) v *= 18.0;
    axpy(out, -4.0, mul(mul(b, b), mul(b, d)));
    axpy(out, 1.0, mul(mul(b, b), mul(c, c)));
    axpy(out, -4.0, mul(mul(a, c), mul(c, c)));
    axpy(out, -27.0, mul(mul(a, a), mul(d, d)));
    return out;
  }
  throw std::runtime_error("disc_y_poly: unsupported y-degree");
}

double poly_eval_real(const std::vector<double>& a, double x) {
  double out = 0.0;
  for (size_t i = a.size(); i-- > 0;) out = out * x + a[i];
  return out;
}

std::vector<double> poly_deriv(const std::vector<double>& a) {
  std::vector<double> d(a.size() > 1 ? a.size() - 1 : 0, 0.0);
  for (size_t i = 1; i < a.size(); ++i) d[i - 1] = a[i] * i;
  return d;
}

// Nearest real midpoint of the closest pair of discriminant roots: the
// genus-zero node of the one-cut solution.
double closest_disc_node(const Dense& f) {
  const std::vector<double> D = disc_y_poly(f);
  std::vector<cplx> a(D.begin(), D.end());
  const std::vector<cplx> roots = poly_roots(std::move(a));
  double best = 1e300;
  double node = 0.0;
  for (size_t i = 0; i < roots.size(); ++i)
    for (size_t j = i + 1; j < roots.size(); ++j) {
      const double dist = std::abs(roots[i] - roots[j]);
      if (dist < best) {
        best = dist;
        node = std::real(roots[i] + roots[j]) / 2.0;
      }
    }
  return node;
}

}  // namespace

BivariatePolynomial fix_constants(const BivariatePolynomial& tmpl) {
  const std::vector<std::string> names = tmpl.unknowns();
  const int n = static_cast<int>(names.size());
  const std::vector<BranchCond> conds = branch_conditions(tmpl);
  const int depth = -4;

  auto resolve_d = [&](const std::vector<double>& c) {
    std::map<std::string, Rat> vals;
    for (int i = 0; i < n; ++i) vals[names[i]] = exact_rat(c[i]);
    return tmpl.resolve(vals);
  };

  // The printed expansions do not reach the orders where the pure constant
  // terms of the p = 1 curves first appear; those cases carry the explicit
  // genus-zero condition that the y-discriminant keeps a double root (one
  // auxiliary unknown: its location).
  const bool with_disc =
      (tmpl.q == 1 && tmpl.k == 1) || (tmpl.q == 2 && tmpl.p == 1);
  const int nu = n + (with_disc ? 1 : 0);

  auto residual = [&](const std::vector<double>& u) {
    std::vector<double> c(u.begin(), u.begin() + n);
    const Dense dn = to_dense(resolve_d(c));
    std::vector<cplx> out = pin_residuals(dn, conds, depth);
    if (with_disc) {
      const double rho = u[n];
      const std::vector<double> D = disc_y_poly(dn);
      const std::vector<double> Dp = poly_deriv(D);
      double scale = 1e-300;
      const double ar = std::max(1.0, std::abs(rho));
      double p = 1.0;
      for (const double& dk : D) {
        scale += std::abs(dk) * p;
        p *= ar;
      }
      out.push_back(poly_eval_real(D, rho) / scale);
      out.push_back(poly_eval_real(Dp, rho) * ar / scale);
    }
    return out;
  };

  // Initial guesses.
  std::vector<double> c(nu, 0.0);
  if (tmpl.q == 1 && tmpl.k == 1) {
    c[n] = (1.0 - to_d(tmpl.t2)) / to_d(tmpl.t3);  // node of the decoupled V'
  } else if (tmpl.q == 2 && tmpl.p == 1) {
    // Bootstrap from the p = 2 curve through the dual relation
    // F_(1)(G_(2)(z) - z, G_(2)(z)) = 0, linear in the constants.
    const BivariatePolynomial f2 = fix_constants(
        curve_template(2, 1, 2, to_d(tmpl.t2), to_d(tmpl.t3)));
    const Dense d2 = to_dense(f2);
    const BivariatePolynomial known = tmpl.resolve({{"c11", Rat(0)},
                                                    {"c10", Rat(0)}});
    const Dense dk = to_dense(known);
    // Normal equations for (c11, c10) over sample points on the dual curve.
    double A00 = 0, A01 = 0, A11 = 0, b0 = 0, b1 = 0;
    for (int s = 0; s < 12; ++s) {
      const cplx z = 2.5 * std::exp(cplx(0.0, 2.0 * kPi * s / 12.0 + 0.37));
      for (const cplx& g : section_roots(d2, z)) {
        const cplx x = g - z;
        const cplx rhs = -dk.eval(x, g);
        // c11 * x + c10 = rhs
        A00 += std::norm(x);
        A01 += std::real(std::conj(x) * cplx(1.0));
        A11 += 1.0;
        b0 += std::real(std::conj(x) * rhs);
        b1 += std::real(rhs);
      }
    }
    const double det = A00 * A11 - A01 * A01;
    c[0] = (b1 * A00 - b0 * A01) / det;  // c10 (names sorted: c10 < c11)
    c[1] = (b0 * A11 - b1 * A01) / det;  // c11
    c[n] = closest_disc_node(to_dense(resolve_d(
        std::vector<double>(c.begin(), c.begin() + n))));
  }

  std::vector<cplx> r = residual(c);
  double rn = 0.0;
  for (const auto& v : r) rn += std::norm(v);

  for (int iter = 0; iter < 60 && rn > 1e-26; ++iter) {
    const int m = static_cast<int>(r.size());
    // Jacobian by forward differences (real unknowns, complex residuals).
    std::vector<std::vector<cplx>> J(m, std::vector<cplx>(nu));
    for (int k = 0; k < nu; ++k) {
      const double h = 1e-6 * (1.0 + std::abs(c[k]));
      std::vector<double> cp = c;
      cp[k] += h;
      const std::vector<cplx> rp = residual(cp);
      for (int i = 0; i < m; ++i) J[i][k] = (rp[i] - r[i]) / h;
    }
    // Normal equations A dc = b with A = Re(J^H J), b = -Re(J^H r).
    std::vector<std::vector<double>> A(nu, std::vector<double>(nu, 0.0));
    std::vector<double> b(nu, 0.0);
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < nu; ++k) {
        for (int l = 0; l < nu; ++l)
          A[k][l] += std::real(std::conj(J[i][k]) * J[i][l]);
        b[k] -= std::real(std::conj(J[i][k]) * r[i]);
      }
    // Levenberg damping for safety.
    for (int k = 0; k < nu; ++k) A[k][k] *= 1.0 + 1e-12;
    // Gaussian elimination.
    std::vector<double> dc(nu, 0.0);
    {
      std::vector<std::vector<double>> M = A;
      std::vector<double> v = b;
      for (int col = 0; col < nu; ++col) {
        int piv = col;
        for (int row = col + 1; row < nu; ++row)
          if (std::abs(M[row][col]) > std::abs(M[piv][col])) piv = row;
        std::swap(M[col], M[piv]);
        std::swap(v[col], v[piv]);
        if (std::abs(M[col][col]) < 1e-300)
          throw std::runtime_error("fix_constants: singular normal equations");
        for (int row = col + 1; row < nu; ++row) {
          const double f = M[row][col] / M[col][col];
          for (int k = col; k < nu; ++k) M[row][k] -= f * M[col][k];
          v[row] -= f * v[col];
        }
      }
      for (int col = nu - 1; col >= 0; --col) {
        double s = v[col];
        for (int k = col + 1; k < nu; ++k) s -= M[col][k] * dc[k];
        dc[col] = s / M[col][col];
      }
    }
    // Backtracking line search.
    double step = 1.0;
    for (int ls = 0; ls < 40; ++ls) {
      std::vector<double> cn = c;
      for (int k = 0; k < nu; ++k) cn[k] += step * dc[k];
      std::vector<cplx> rn_vec;
      try {
        rn_vec = residual(cn);
      } catch (const std::exception&) {
        step *= 0.5;
        continue;
      }
      double rnn = 0.0;
      for (const auto& v : rn_vec) rnn += std::norm(v);
      if (rnn < rn * (1.0 - 1e-8) || rnn < 1e-26) {
        c = cn;
        r = rn_vec;
        rn = rnn;
        break;
      }
      step *= 0.5;
      if (ls == 39) iter = 60;  // no progress
    }
  }

  double rmax = 0.0;
  for (const auto& v : r) rmax = std::max(rmax, std::abs(v));
  if (rmax > 1e-10)
    throw std::runtime_error("fix_constants: residual " + std::to_string(rmax));
  return resolve_d(c);
}

// ----------------------------------------------------------- branch series

std::vector<double> physical_series(const BivariatePolynomial& F, int orders) {
  const Dense dn = to_dense(F);
  const double t2 = to_d(F.t2), t3 = to_d(F.t3), t4 = to_d(F.t4);
  const int depth = -(2 * orders + 2);
  Series seed;
  seed.lo = depth;
  int m = 1;
  bool negate = false;  // W = seed_poly - branch when the sheet is U' - W
  if (F.q == 1 && F.p == 1) {
    if (F.k == 1) {
      seed.set(2, t3);
      seed.set(1, t2);
    } else {
      seed.set(3, t4);
      seed.set(2, t3);
      seed.set(1, t2);
    }
    negate = true;
  } else if ((F.q == 2 || F.q == 3) && F.p == 1) {
    m = 2;
    seed.set(4, t3);
    seed.set(2, t2);
    negate = true;
  } else if (F.q == F.p) {
    m = (F.q == 1) ? 1 : 2;
    seed.set(m, 1.0);  // z + W branch
  } else {
    throw std::invalid_argument("physical_series: unsupported curve");
  }
  const Series y = hensel_lift(dn, m, seed, depth);
  std::vector<double> w(orders);
  for (int k = 1; k <= orders; ++k) {
    cplx v = y.get(-m * k);
    for (const auto& [e, s] : seed.t)
      if (e == -m * k) v -= s;  // (not expected)
    w[k - 1] = negate ? -std::real(v) : std::real(v);
  }
  if (negate) {
    // W = seed - branch: the polynomial part cancels, negative orders flip.
  }
  return w;
}

cplx curve_W1(const BivariatePolynomial& F, cplx z) {
  const double t2 = to_d(F.t2), t3 = to_d(F.t3), t4 = to_d(F.t4);
  if (F.p != 1) throw std::invalid_argument("curve_W1: need p = 1 curve");
  // Physical sheet: y = U'(z) - W with W ~ 1/z; pick the root closest to
  // U'(z) - 1/z, tracked inward from large |z| along the ray through z.
  auto Up = [&](cplx x) {
    return F.k == 1 ? t3 * x * x + t2 * x : t4 * x * x * x + t3 * x * x + t2 * x;
  };
  const Dense dn = to_dense(F);
  const double R = 40.0 * (1.0 + std::abs(z));
  const cplx dir = z / std::abs(z);
  cplx prev;
  bool have = false;
  for (double r = R; r >= std::abs(z) * 0.999; r *= 0.93) {
    const cplx x = dir * r;
    const std::vector<cplx> roots = section_roots(dn, x);
    const cplx target = have ? prev : (Up(x) - 1.0 / x);
    cplx best = roots.empty() ? target : roots[0];
    for (const auto& rr : roots)
      if (std::abs(rr - target) < std::abs(best - target)) best = rr;
    prev = best;
    have = true;
    if (r * 0.93 < std::abs(z)) break;
  }
  // final step exactly at z
  const std::vector<cplx> roots = section_roots(dn, z);
  cplx best = roots.empty() ? prev : roots[0];
  for (const auto& rr : roots)
    if (std::abs(rr - prev) < std::abs(best - prev)) best = rr;
  return Up(z) - best;
}

// -------------------------------------------------------------- G-transform

cplx g_transform(const WEvaluator& WY, int p, double q, cplx z) {
  const BranchPair w = WY(z);
  return (p / q) * (z - w.minus) + ((q - p) / q) * w.plus;
}

cplx g_inverse(const std::function<cplx(cplx)>& G, cplx z, cplx guess) {
  cplx x = guess;
  for (int iter = 0; iter < 200; ++iter) {
    const cplx f = G(x) - z;
    if (std::abs(f) < 1e-12) return x;
    const double h = 1e-7 * (1.0 + std::abs(x));
    const cplx d = (G(x + h) - G(x - h)) / (2.0 * h);
    if (std::abs(d) < 1e-300)
      throw std::runtime_error("g_inverse: vanishing derivative");
    cplx step = f / d;
    // damped
    double lam = 1.0;
    for (int ls = 0; ls < 30; ++ls) {
      const cplx xn = x - lam * step;
      if (std::abs(G(xn) - z) < std::abs(f)) {
        x = xn;
        break;
      }
      lam *= 0.5;
      if (ls == 29) x -= 0.05 * step;
    }
  }
  if (std::abs(G(x) - z) > 1e-9)
    throw std::runtime_error("g_inverse: no convergence");
  return x;
}

double dual_relation_check(const BivariatePolynomial& Fp,
                           const std::function<cplx(cplx)>& G_qp,
                           const std::vector<cplx>& grid) {
  const Dense dn = to_dense(Fp);
  double worst = 0.0;
  for (const cplx& z : grid) {
    const cplx g = G_qp(z);
    worst = std::max(worst, std::abs(dn.eval(g - z, g)));
  }
  return worst;
}

// ------------------------------------------------------------------ elliptic
// (implemented below in a second stage)

cplx EllipticWY::evaluate(cplx /*z*/) const {
  throw std::runtime_error("elliptic_WY: not yet implemented");
}
BranchPair EllipticWY::boundary(double /*z*/) const {
  throw std::runtime_error("elliptic_WY: not yet implemented");
}
double EllipticWY::density(double /*z*/) const {
  throw std::runtime_error("elliptic_WY: not yet implemented");
}
EllipticWY elliptic_WY(double, double, double) {
  throw std::runtime_error("elliptic_WY: not yet implemented");
}

CriticalPoint critical_points(int) {
  throw std::runtime_error("critical_points: not yet implemented");
}

ScalingFit scaling_coefficient(double, const std::vector<double>&) {
  throw std::runtime_error("scaling_coefficient: not yet implemented");
}

}  // namespace randsurf::potts_curves
