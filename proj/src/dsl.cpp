// Exact symbolic algebra for the double-scaled operator pairs.  See dsl.hpp
// for conventions; everything here is straightforward sparse-polynomial
// bookkeeping over cpp_rational plus the g_s-weighted normal-ordering rule.

#include "randsurf/dsl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "randsurf/specfun.hpp"

namespace randsurf::dsl {

namespace {

// Generator id layout: kind * 2^40 + m * 2^20 + k.  The kind order fixes
// the canonical printing order (couplings first, then variables, then the
// potential symbols).
constexpr GenId kShiftKind = GenId(1) << 40;
constexpr GenId kShiftM = GenId(1) << 20;
enum Kind : int {
  kGs = 1, kT, kZeta, kEta, kQvar, kPvar, kZvar, kU, kV,
};

int kind_of(GenId g) { return static_cast<int>(g / kShiftKind); }
int m_of(GenId g) { return static_cast<int>((g / kShiftM) % kShiftM); }
int k_of(GenId g) { return static_cast<int>(g % kShiftM); }

GenId make_id(int kind, int m, int k) {
  return GenId(kind) * kShiftKind + GenId(m) * kShiftM + GenId(k);
}

Rat pow2(int n) {
  Rat r = 1;
  for (int i = 0; i < n; ++i) r *= 2;
  return r;
}

Rat binomial(int n, int j) {
  Rat r = 1;
  for (int i = 0; i < j; ++i) r *= Rat(n - i, i + 1);
  return r;
}

}  // namespace

GenId gen_gs() { return make_id(kGs, 0, 0); }
GenId gen_t() { return make_id(kT, 0, 0); }
GenId gen_zeta() { return make_id(kZeta, 0, 0); }
GenId gen_eta() { return make_id(kEta, 0, 0); }
GenId gen_Q() { return make_id(kQvar, 0, 0); }
GenId gen_P() { return make_id(kPvar, 0, 0); }
GenId gen_z() { return make_id(kZvar, 0, 0); }

GenId gen_u(int m, int k) {
  if (m < 2 || k < 0) throw std::invalid_argument("gen_u: need m >= 2, k >= 0");
  return make_id(kU, m, k);
}

GenId gen_v(int m, int k) {
  if (m < 2 || k < 0) throw std::invalid_argument("gen_v: need m >= 2, k >= 0");
  return make_id(kV, m, k);
}

std::string gen_name(GenId g) {
  switch (kind_of(g)) {
    case kGs: return "gs";
    case kT: return "t";
    case kZeta: return "zeta";
    case kEta: return "eta";
    case kQvar: return "Q";
    case kPvar: return "P";
    case kZvar: return "z";
    case kU:
    case kV: {
      std::ostringstream os;
      os << (kind_of(g) == kU ? 'u' : 'v') << m_of(g);
      const int k = k_of(g);
      if (k > 0 && k <= 3)
        os << std::string(k, '\'');
      else if (k > 3)
        os << "^(" << k << ")";
      return os.str();
    }
    default: throw std::invalid_argument("gen_name: unknown generator id");
  }
}

// --------------------------------------------------------------- RingElem

RingElem::RingElem(long value) {
  if (value != 0) terms_[{}] = Rat(value);
}

RingElem::RingElem(const Rat& value) {
  if (value != 0) terms_[{}] = value;
}

RingElem RingElem::generator(GenId g, int exponent) {
  gen_name(g);  // validates the id
  RingElem e;
  if (exponent < 0) throw std::invalid_argument("generator: negative exponent");
  if (exponent == 0)
    e.terms_[{}] = 1;
  else
    e.terms_[{{g, exponent}}] = 1;
  return e;
}

void RingElem::prune() {
  for (auto it = terms_.begin(); it != terms_.end();)
    it = (it->second == 0) ? terms_.erase(it) : std::next(it);
}

RingElem& RingElem::operator+=(const RingElem& o) {
  for (const auto& [mono, c] : o.terms_) terms_[mono] += c;
  prune();
  return *this;
}

RingElem& RingElem::operator-=(const RingElem& o) {
  for (const auto& [mono, c] : o.terms_) terms_[mono] -= c;
  prune();
  return *this;
}

RingElem RingElem::operator+(const RingElem& o) const {
  RingElem r = *this;
  return r += o;
}

RingElem RingElem::operator-(const RingElem& o) const {
  RingElem r = *this;
  return r -= o;
}

RingElem RingElem::operator-() const {
  RingElem r = *this;
  for (auto& [mono, c] : r.terms_) c = -c;
  return r;
}

RingElem RingElem::operator*(const RingElem& o) const {
  RingElem out;
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : o.terms_) {
      // Merge the two sorted exponent lists.
      Monomial mono;
      mono.reserve(ma.size() + mb.size());
      size_t i = 0, j = 0;
      while (i < ma.size() || j < mb.size()) {
        if (j == mb.size() || (i < ma.size() && ma[i].first < mb[j].first)) {
          mono.push_back(ma[i++]);
        } else if (i == ma.size() || mb[j].first < ma[i].first) {
          mono.push_back(mb[j++]);
        } else {
          mono.emplace_back(ma[i].first, ma[i].second + mb[j].second);
          ++i, ++j;
        }
      }
      out.terms_[mono] += ca * cb;
    }
  }
  out.prune();
  return out;
}

RingElem& RingElem::operator*=(const RingElem& o) { return *this = *this * o; }

bool RingElem::operator==(const RingElem& o) const {
  return terms_ == o.terms_;
}

RingElem RingElem::pow(int n) const {
  if (n < 0) throw std::invalid_argument("pow: negative exponent");
  RingElem acc = RingElem(1), base = *this;
  while (n > 0) {
    if (n & 1) acc *= base;
    base = (n >>= 1) ? base * base : base;
  }
  return acc;
}

RingElem RingElem::derive() const {
  RingElem out;
  for (const auto& [mono, c] : terms_) {
    for (size_t i = 0; i < mono.size(); ++i) {
      const auto [g, e] = mono[i];
      RingElem dg;  // D of the single generator
      if (kind_of(g) == kU || kind_of(g) == kV)
        dg = generator(make_id(kind_of(g), m_of(g), k_of(g) + 1));
      else if (kind_of(g) == kT)
        dg = RingElem(1);
      else
        continue;
      // e * (mono with one factor of g removed) * dg
      RingElem rest;
      Monomial reduced = mono;
      if (--reduced[i].second == 0) reduced.erase(reduced.begin() + i);
      rest.terms_[reduced] = c * e;
      out += rest * dg;
    }
  }
  return out;
}

RingElem RingElem::partial(GenId g) const {
  gen_name(g);  // validates the id
  RingElem out;
  for (const auto& [mono, c] : terms_) {
    for (size_t i = 0; i < mono.size(); ++i) {
      if (mono[i].first != g) continue;
      const int e = mono[i].second;
      Monomial reduced = mono;
      if (--reduced[i].second == 0) reduced.erase(reduced.begin() + i);
      out.terms_[reduced] += c * e;
    }
  }
  out.prune();
  return out;
}

RingElem RingElem::substitute(const std::map<GenId, RingElem>& base_subs) const {
  // Cache derived images of the substituted bases.
  std::map<GenId, RingElem> cache;
  auto image = [&](GenId g) -> const RingElem* {
    auto hit = cache.find(g);
    if (hit != cache.end()) return &hit->second;
    const int kind = kind_of(g);
    if (kind == kU || kind == kV) {
      const GenId base = make_id(kind, m_of(g), 0);
      auto it = base_subs.find(base);
      if (it == base_subs.end()) return nullptr;
      RingElem e = it->second;
      for (int k = 0; k < k_of(g); ++k) e = e.derive();
      return &cache.emplace(g, std::move(e)).first->second;
    }
    auto it = base_subs.find(g);
    if (it == base_subs.end()) return nullptr;
    return &cache.emplace(g, it->second).first->second;
  };

  RingElem out;
  for (const auto& [mono, c] : terms_) {
    RingElem term{c};
    for (const auto& [g, e] : mono) {
      const RingElem* img = image(g);
      term *= img ? img->pow(e) : generator(g, e);
    }
    out += term;
  }
  return out;
}

RingElem RingElem::coefficient_of(GenId g, int k) const {
  RingElem out;
  for (const auto& [mono, c] : terms_) {
    int e = 0;
    Monomial reduced;
    for (const auto& f : mono)
      if (f.first == g)
        e = f.second;
      else
        reduced.push_back(f);
    if (e == k) out.terms_[reduced] += c;
  }
  out.prune();
  return out;
}

int RingElem::degree_in(GenId g) const {
  int deg = 0;
  for (const auto& [mono, c] : terms_)
    for (const auto& f : mono)
      if (f.first == g) deg = std::max(deg, f.second);
  return deg;
}

double RingElem::evaluate(const std::map<GenId, double>& values) const {
  double acc = 0.0;
  for (const auto& [mono, c] : terms_) {
    double term = c.convert_to<double>();
    for (const auto& [g, e] : mono) {
      auto it = values.find(g);
      if (it == values.end())
        throw std::invalid_argument("evaluate: no value for " + gen_name(g));
      term *= std::pow(it->second, e);
    }
    acc += term;
  }
  return acc;
}

Rat RingElem::evaluate_exact(const std::map<GenId, Rat>& values) const {
  Rat acc = 0;
  for (const auto& [mono, c] : terms_) {
    Rat term = c;
    for (const auto& [g, e] : mono) {
      auto it = values.find(g);
      if (it == values.end())
        throw std::invalid_argument("evaluate: no value for " + gen_name(g));
      for (int i = 0; i < e; ++i) term *= it->second;
    }
    acc += term;
  }
  return acc;
}

std::string RingElem::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [mono, c] : terms_) {
    const bool neg = c < 0;
    const Rat mag = neg ? Rat(-c) : c;
    if (first)
      os << (neg ? "-" : "");
    else
      os << (neg ? " - " : " + ");
    first = false;
    bool printed = false;
    if (mag != 1 || mono.empty()) {
      os << mag;
      printed = true;
    }
    for (const auto& [g, e] : mono) {
      if (printed) os << "*";
      os << gen_name(g);
      if (e > 1) os << "^" << e;
      printed = true;
    }
  }
  return os.str();
}

// ----------------------------------------------------------------- DiffOp

void DiffOp::prune() {
  for (auto it = coeffs_.begin(); it != coeffs_.end();)
    it = it->second.is_zero() ? coeffs_.erase(it) : std::next(it);
}

DiffOp DiffOp::partial(int order) {
  if (order < 0) throw std::invalid_argument("partial: negative order");
  DiffOp d;
  d.coeffs_[order] = RingElem(1);
  return d;
}

DiffOp DiffOp::multiplication(const RingElem& f) {
  DiffOp d;
  if (!f.is_zero()) d.coeffs_[0] = f;
  return d;
}

DiffOp DiffOp::operator+(const DiffOp& o) const {
  DiffOp r = *this;
  for (const auto& [k, f] : o.coeffs_) r.coeffs_[k] += f;
  r.prune();
  return r;
}

DiffOp DiffOp::operator-(const DiffOp& o) const {
  DiffOp r = *this;
  for (const auto& [k, f] : o.coeffs_) r.coeffs_[k] -= f;
  r.prune();
  return r;
}

DiffOp DiffOp::operator-() const {
  DiffOp r = *this;
  for (auto& [k, f] : r.coeffs_) f = -f;
  return r;
}

DiffOp DiffOp::operator*(const DiffOp& o) const {
  // (f d^a)(h d^b) = f sum_j C(a,j) g_s^j D^j(h) d^{a+b-j}.
  const RingElem gs = RingElem::generator(gen_gs());
  DiffOp out;
  for (const auto& [a, f] : coeffs_) {
    RingElem h_deriv;  // g_s^j D^j(h), built incrementally
    for (const auto& [b, h] : o.coeffs_) {
      h_deriv = h;
      RingElem gs_pow{1};
      for (int j = 0; j <= a; ++j) {
        out.coeffs_[a + b - j] += f * RingElem(binomial(a, j)) * gs_pow * h_deriv;
        if (j < a) {
          h_deriv = h_deriv.derive();
          gs_pow *= gs;
        }
      }
    }
  }
  out.prune();
  return out;
}

bool DiffOp::operator==(const DiffOp& o) const { return coeffs_ == o.coeffs_; }

int DiffOp::order() const {
  return coeffs_.empty() ? -1 : coeffs_.rbegin()->first;
}

RingElem DiffOp::coefficient(int k) const {
  auto it = coeffs_.find(k);
  return it == coeffs_.end() ? RingElem() : it->second;
}

void DiffOp::set_coefficient(int k, const RingElem& f) {
  if (k < 0) throw std::invalid_argument("set_coefficient: negative order");
  if (f.is_zero())
    coeffs_.erase(k);
  else
    coeffs_[k] = f;
}

DiffOp DiffOp::transpose() const {
  // (f d^n)^T = (-d)^n f = (-1)^n sum_j C(n,j) g_s^j D^j(f) d^{n-j}.
  const RingElem gs = RingElem::generator(gen_gs());
  DiffOp out;
  for (const auto& [n, f] : coeffs_) {
    const Rat sign = (n % 2 == 0) ? 1 : -1;
    RingElem f_deriv = f, gs_pow{1};
    for (int j = 0; j <= n; ++j) {
      out.coeffs_[n - j] +=
          RingElem(sign * binomial(n, j)) * gs_pow * f_deriv;
      if (j < n) {
        f_deriv = f_deriv.derive();
        gs_pow *= gs;
      }
    }
  }
  out.prune();
  return out;
}

DiffOp DiffOp::substitute(const std::map<GenId, RingElem>& base_subs) const {
  DiffOp out;
  for (const auto& [k, f] : coeffs_) out.coeffs_[k] = f.substitute(base_subs);
  out.prune();
  return out;
}

std::string DiffOp::to_string() const {
  if (coeffs_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    if (!first) os << " + ";
    first = false;
    os << "(" << it->second.to_string() << ")";
    if (it->first == 1)
      os << "*d";
    else if (it->first > 1)
      os << "*d^" << it->first;
  }
  return os.str();
}

DiffOp commutator(const DiffOp& a, const DiffOp& b) { return a * b - b * a; }

DiffOp make_P(int p) {
  if (p < 1) throw std::invalid_argument("make_P: need p >= 1");
  DiffOp P = DiffOp::multiplication(RingElem(pow2(p - 1))) * DiffOp::partial(p);
  for (int n = 2; n <= p; ++n)
    P.set_coefficient(p - n, RingElem::generator(gen_u(n, 0)));
  return P;
}

DiffOp make_Q(int pprime, const Rat& beta) {
  if (pprime < 1) throw std::invalid_argument("make_Q: need p' >= 1");
  if (beta == 0) throw std::invalid_argument("make_Q: beta must be nonzero");
  DiffOp Q = DiffOp::multiplication(RingElem(beta * pow2(pprime - 1))) *
             DiffOp::partial(pprime);
  for (int n = 2; n <= pprime; ++n)
    Q.set_coefficient(pprime - n,
                      RingElem(beta) * RingElem::generator(gen_v(n, 0)));
  return Q;
}

// ------------------------------------------------------------- string eqn

StringResidual string_residual(int p, int pprime,
                               const std::map<GenId, RingElem>& substitutions,
                               const Rat& beta) {
  if (p < 1 || pprime < 1 || p == pprime || std::gcd(p, pprime) != 1)
    throw std::invalid_argument("string_residual: (p, p') must be coprime");
  const DiffOp P = make_P(p).substitute(substitutions);
  const DiffOp Q = make_Q(pprime, beta).substitute(substitutions);
  StringResidual out;
  out.residual = commutator(P, Q) -
                 DiffOp::multiplication(RingElem::generator(gen_gs()));
  for (auto it = out.residual.coefficients().rbegin();
       it != out.residual.coefficients().rend(); ++it)
    out.constraints.push_back(it->second);
  return out;
}

// ------------------------------------------------------------- transforms

std::pair<DiffOp, DiffOp> transform(TransformKind kind, const DiffOp& P,
                                    const DiffOp& Q,
                                    const TransformParams& params) {
  switch (kind) {
    case TransformKind::linear_canonical: {
      if (params.a * params.d - params.b * params.c != 1)
        throw std::invalid_argument("linear_canonical: ad - bc must be 1");
      auto scale = [](const Rat& r, const DiffOp& op) {
        return DiffOp::multiplication(RingElem(r)) * op;
      };
      return {scale(params.a, P) - scale(params.c, Q),
              scale(params.d, Q) - scale(params.b, P)};
    }
    case TransformKind::charge_conjugation:
      return {P.transpose(), -Q.transpose()};
    case TransformKind::duality: {
      if (params.beta == 0)
        throw std::invalid_argument("duality: beta must be nonzero");
      const Rat sign = (params.pprime % 2 == 0) ? 1 : -1;
      auto scale = [](const Rat& r, const DiffOp& op) {
        return DiffOp::multiplication(RingElem(r)) * op;
      };
      return {scale(sign / params.beta, Q.transpose()),
              scale(sign * params.beta, P.transpose())};
    }
  }
  throw std::invalid_argument("transform: unknown kind");
}

// ----------------------------------------------------------------- curves

RingElem ring_determinant(const std::vector<std::vector<RingElem>>& m) {
  const size_t n = m.size();
  for (const auto& row : m)
    if (row.size() != n)
      throw std::invalid_argument("ring_determinant: matrix must be square");
  if (n == 0) return RingElem(1);
  if (n > 16) throw std::invalid_argument("ring_determinant: n > 16");
  // Subset dynamic program: D[mask] is the determinant of the top popcount
  // rows restricted to the column set `mask`.
  std::vector<RingElem> D(size_t(1) << n);
  D[0] = RingElem(1);
  for (size_t mask = 1; mask < D.size(); ++mask) {
    const int r = __builtin_popcountll(mask) - 1;  // row being expanded
    int parity = r;  // cofactor sign (-1)^{r + position of j within mask}
    RingElem acc;
    for (size_t j = 0; j < n; ++j) {
      if (!(mask >> j & 1)) continue;
      if (!m[r][j].is_zero()) {
        RingElem term = m[r][j] * D[mask ^ (size_t(1) << j)];
        acc += (parity % 2 == 0) ? term : -term;
      }
      ++parity;
    }
    D[mask] = std::move(acc);
  }
  return D.back();
}

CompanionSystem companion_system(const DiffOp& A, const DiffOp& C,
                                 GenId spectral) {
  const int d = A.order();
  if (d < 2) throw std::invalid_argument("companion_system: need order >= 2");
  const RingElem lead = A.coefficient(d);
  const auto& lead_terms = lead.terms();
  if (lead_terms.size() != 1 || !lead_terms.begin()->first.empty())
    throw std::invalid_argument(
        "companion_system: leading coefficient must be a nonzero constant");
  const Rat lead_c = lead_terms.begin()->second;
  const RingElem gs = RingElem::generator(gen_gs());

  // Reduction of d^d psi from A psi = s psi.
  std::vector<RingElem> red(d);
  for (int k = 0; k < d; ++k) {
    red[k] = -A.coefficient(k);
    if (k == 0) red[k] += RingElem::generator(spectral);
    red[k] = RingElem(Rat(1) / lead_c) * red[k];
  }

  using State = std::vector<RingElem>;  // coordinates in (psi .. d^{d-1} psi)
  auto apply_d = [&](const State& s) {
    State out(d);
    RingElem top;  // coefficient of d^d psi before reduction
    for (int k = 0; k < d; ++k) {
      out[k] += gs * s[k].derive();
      if (k + 1 < d)
        out[k + 1] += s[k];
      else
        top = s[k];
    }
    for (int k = 0; k < d; ++k) out[k] += top * red[k];
    return out;
  };

  CompanionSystem sys;
  sys.B.assign(d, std::vector<RingElem>(d));
  for (int j = 0; j + 1 < d; ++j) sys.B[j][j + 1] = RingElem(1);
  sys.B[d - 1] = red;

  // States of d^o psi for o up to (d-1) + ord(C).
  const int omax = (d - 1) + std::max(C.order(), 0);
  std::vector<State> S(omax + 1, State(d));
  for (int o = 0; o <= omax; ++o) {
    if (o < d)
      S[o][o] = RingElem(1);
    else
      S[o] = apply_d(S[o - 1]);
  }

  // Row j: expansion of d_s d^j psi = d^j (C psi) in the basis.
  sys.Q.assign(d, std::vector<RingElem>(d));
  for (int j = 0; j < d; ++j) {
    const DiffOp R = DiffOp::partial(j) * C;
    for (const auto& [o, c] : R.coefficients())
      for (int k = 0; k < d; ++k) sys.Q[j][k] += c * S[o][k];
  }
  return sys;
}

std::vector<std::vector<RingElem>> companion_matrix_Q(
    int p, int pprime, const std::map<GenId, RingElem>& substitutions,
    const Rat& beta) {
  if (p < 2) throw std::invalid_argument("companion_matrix_Q: need p >= 2");
  const DiffOp P = make_P(p).substitute(substitutions);
  const DiffOp Q = make_Q(pprime, beta).substitute(substitutions);
  return companion_system(P, Q, gen_zeta()).Q;
}

RingElem companion_curve(int p, int pprime,
                         const std::map<GenId, RingElem>& substitutions,
                         const Rat& beta) {
  const auto M = companion_matrix_Q(p, pprime, substitutions, beta);
  const RingElem Q = RingElem::generator(gen_Q());
  std::vector<std::vector<RingElem>> A(p, std::vector<RingElem>(p));
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) A[i][j] = (i == j ? Q : RingElem()) - M[i][j];
  return ring_determinant(A);
}

RingElem cheb_T(int n, const RingElem& x) {
  if (n < 0) throw std::invalid_argument("cheb_T: negative degree");
  RingElem prev{1};
  if (n == 0) return prev;
  RingElem cur = x;
  for (int k = 2; k <= n; ++k) {
    RingElem next = RingElem(2) * x * cur - prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

RingElem semiclassical_curve(int p, int pprime) {
  if (p < 1 || pprime < 1 || std::gcd(p, pprime) != 1)
    throw std::invalid_argument("semiclassical_curve: (p, p') must be coprime");
  const RingElem tp = cheb_T(p, RingElem::generator(gen_Q()));
  const RingElem tq = cheb_T(pprime, RingElem::generator(gen_zeta()));
  return RingElem(Rat(1) / pow2(p - 1)) * (tp - tq);
}

// ------------------------------------------------------------- Airy check

double airy_residual(double g_s, const std::vector<double>& t_grid,
                     double zeta) {
  if (!(g_s > 0.0)) throw std::invalid_argument("airy_residual: g_s > 0");
  if (t_grid.empty()) throw std::invalid_argument("airy_residual: empty grid");
  const double a = std::pow(g_s, -2.0 / 3.0);
  auto psi = [&](double t) { return specfun::airy_eval(a * (zeta + t)); };

  double worst = 0.0;
  for (double t : t_grid) {
    const double x = a * (zeta + t);
    // Step chosen so the Richardson-extrapolated central difference stays
    // well below 1e-8 against the local curvature scale of Ai.
    const double h = 0.01 / (a * std::sqrt(1.0 + std::abs(x)));
    auto d2 = [&](double hh) {
      return (psi(t + hh) - 2.0 * psi(t) + psi(t - hh)) / (hh * hh);
    };
    auto rich = [&](double hh) {
      return (4.0 * d2(hh / 2.0) - d2(hh)) / 3.0;
    };
    const double e1 = rich(h), e2 = rich(h / 2.0);
    if (std::abs(e2 - e1) > 1e-4 * (1.0 + std::abs(e2)))
      throw std::runtime_error(
          "airy_residual: finite differences failed to converge");
    const double psi_tt = e2 + (e2 - e1) / 15.0;
    // 2 d^2 psi - t psi - zeta psi with d = (g_s / sqrt 2) d/dt.
    const double r = g_s * g_s * psi_tt - (t + zeta) * psi(t);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

}  // namespace randsurf::dsl
