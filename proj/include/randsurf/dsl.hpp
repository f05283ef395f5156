// dsl.hpp
//
// Double-scaling operator formalism: an exact symbolic layer for the
// noncommutative algebra of ordinary differential operators
//
//   P = 2^{p-1} d^p + sum_{n=2}^{p}  u_n(t) d^{p-n},
//   Q = beta (2^{p'-1} d^{p'} + sum_{n=2}^{p'} v_n(t) d^{p'-n}),
//
// where d = g_s d/dt and the coefficients solve the string equation
// [P, Q] = g_s.  Everything is computed over the commutative ring of
// polynomials with exact rational coefficients in the generators
//
//   { u_m^{(k)}, v_m^{(k)} : m >= 2, k >= 0 }  u  { t, zeta, g_s, Q, z },
//
// where the superscript (k) marks the k-th plain d/dt-derivative symbol.
// Operators are kept normal-ordered (coefficients left of d^k) via the
// g_s-weighted commutation rule [d, f] = g_s D(f), D(u_m^{(k)}) = u_m^{(k+1)},
// D(t) = 1.  NOTE on dots: one source of printed formulas writes time
// derivatives with d = g_s d/dt absorbed (so "v-dot" = g_s v^{(1)}) while
// another writes plain d/dt; this layer only ever tracks plain derivative
// symbols, with every g_s emitted explicitly by the commutation rule, so the
// grading is unambiguous.
//
// Provided operations: normal-ordered product and commutator, transposition
// (f d^n)^T = (-d)^n f, the string-equation residual [P,Q] - g_s with its
// coefficient-wise constraint ideal, the symmetry transforms (linear
// canonical, charge conjugation, duality), the p x p companion system of the
// ODE P psi = zeta psi and its spectral curve det(Q I - calQ), the
// semiclassical curve (T_p(Q) - T_{p'}(zeta))/2^{p-1}, and a numerical check
// that the Airy function solves the (2,1) system.

#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace randsurf::dsl {

using Rat = boost::multiprecision::cpp_rational;

// ------------------------------------------------------------- generators

// A generator is encoded as a 64-bit id; ordering of ids fixes the canonical
// monomial order used for printing and comparison.
using GenId = std::int64_t;

GenId gen_gs();              // string coupling g_s
GenId gen_t();               // scaling variable t
GenId gen_zeta();            // spectral parameter zeta
GenId gen_Q();               // curve variable Q (eigenvalue of calQ)
GenId gen_z();               // curve variable z (eigenvalue of calB)
GenId gen_eta();             // dual spectral parameter eta
GenId gen_P();               // dual curve variable P
GenId gen_u(int m, int k);   // u_m^{(k)}
GenId gen_v(int m, int k);   // v_m^{(k)}

std::string gen_name(GenId g);

// ------------------------------------------------------------- ring elements

// Sparse multivariate polynomial with exact rational coefficients.  The
// monomial is a sorted list of (generator, positive exponent).
class RingElem {
 public:
  using Monomial = std::vector<std::pair<GenId, int>>;

  RingElem() = default;
  RingElem(long value);                       // NOLINT: implicit by design
  explicit RingElem(const Rat& value);
  static RingElem generator(GenId g, int exponent = 1);

  RingElem operator+(const RingElem& o) const;
  RingElem operator-(const RingElem& o) const;
  RingElem operator-() const;
  RingElem operator*(const RingElem& o) const;
  RingElem& operator+=(const RingElem& o);
  RingElem& operator-=(const RingElem& o);
  RingElem& operator*=(const RingElem& o);
  bool operator==(const RingElem& o) const;

  bool is_zero() const { return terms_.empty(); }
  RingElem pow(int n) const;

  // Leibniz derivation: D(u_m^{(k)}) = u_m^{(k+1)} (same for v), D(t) = 1,
  // all other generators constant.
  RingElem derive() const;

  // Formal partial derivative treating every generator (including each
  // u_m^{(k)}) as an independent variable.
  RingElem partial(GenId g) const;

  // Substitute base symbols (k = 0 generators or plain generators like t,
  // zeta, g_s) by expressions; u_m^{(k)} is replaced by the k-th derivation
  // of the expression given for u_m^{(0)}, so substitutions commute with D.
  RingElem substitute(const std::map<GenId, RingElem>& base_subs) const;

  // Coefficient extraction: view the element as a polynomial in `g` and
  // return the coefficient of g^k (an element not containing g).
  RingElem coefficient_of(GenId g, int k) const;
  int degree_in(GenId g) const;

  // Numeric evaluation; throws if a generator has no assigned value.
  double evaluate(const std::map<GenId, double>& values) const;
  Rat evaluate_exact(const std::map<GenId, Rat>& values) const;

  // Canonical text form with sorted monomials, e.g. "3/2*gs*v2' + t".
  std::string to_string() const;

  const std::map<Monomial, Rat>& terms() const { return terms_; }

 private:
  void prune();
  std::map<Monomial, Rat> terms_;
};

// ------------------------------------------------------- differential ops

// Normal-ordered operator sum_k f_k(t) d^k with RingElem coefficients.
class DiffOp {
 public:
  DiffOp() = default;
  static DiffOp partial(int order = 1);         // d^order
  static DiffOp multiplication(const RingElem& f);

  DiffOp operator+(const DiffOp& o) const;
  DiffOp operator-(const DiffOp& o) const;
  DiffOp operator-() const;
  DiffOp operator*(const DiffOp& o) const;      // normal-ordered product
  bool operator==(const DiffOp& o) const;
  bool is_zero() const { return coeffs_.empty(); }

  int order() const;
  RingElem coefficient(int k) const;            // zero when absent
  void set_coefficient(int k, const RingElem& f);

  DiffOp transpose() const;                     // (f d^n)^T = (-d)^n f
  DiffOp substitute(const std::map<GenId, RingElem>& base_subs) const;
  std::string to_string() const;

  const std::map<int, RingElem>& coefficients() const { return coeffs_; }

 private:
  void prune();
  std::map<int, RingElem> coeffs_;
};

DiffOp commutator(const DiffOp& a, const DiffOp& b);

// The canonical operators of the (p, p') pair; beta scales Q.
DiffOp make_P(int p);
DiffOp make_Q(int pprime, const Rat& beta = 1);

// ------------------------------------------------------------- string eqn

struct StringResidual {
  DiffOp residual;                    // [P, Q] - g_s after substitutions
  std::vector<RingElem> constraints;  // nonzero coefficients, high order first
};

// Builds P, Q for the pair, applies the base substitutions and returns the
// residual of the string equation.  Supported pairs: (2,1), (3,2), (4,3),
// (5,2).
StringResidual string_residual(int p, int pprime,
                               const std::map<GenId, RingElem>& substitutions,
                               const Rat& beta = 1);

// ------------------------------------------------------------- transforms

enum class TransformKind { linear_canonical, charge_conjugation, duality };

struct TransformParams {
  // linear canonical (a P - c Q, d Q - b P), requires ad - bc = 1.
  Rat a = 1, b = 0, c = 0, d = 1;
  // duality needs the beta_{p,p'} constant of the input pair and the parity
  // (-1)^{p'}.
  Rat beta = 1;
  int pprime = 1;
};

std::pair<DiffOp, DiffOp> transform(TransformKind kind, const DiffOp& P,
                                    const DiffOp& Q,
                                    const TransformParams& params = {});

// ------------------------------------------------------------- curves

// Determinant of a square matrix of ring elements (subset dynamic program;
// exact).
RingElem ring_determinant(const std::vector<std::vector<RingElem>>& m);

// Companion system of P psi = zeta psi in the basis (psi, d psi, ...,
// d^{p-1} psi): returns det(Q I - calQ) where d_zeta psi-vec = calQ psi-vec
// is induced by d_zeta psi = Q psi.  Substitutions are applied to the
// operator coefficients first.
RingElem companion_curve(int p, int pprime,
                         const std::map<GenId, RingElem>& substitutions,
                         const Rat& beta = 1);

// The companion matrix itself (used by the Wronskian layer as the n = 1 Lax
// matrix).
std::vector<std::vector<RingElem>> companion_matrix_Q(
    int p, int pprime, const std::map<GenId, RingElem>& substitutions,
    const Rat& beta = 1);

// General companion system for an arbitrary operator pair: given A psi =
// s psi (s the spectral generator, A of order d with constant leading
// coefficient) and d_s psi = C psi, returns the d x d matrices of the
// d-action (row j expands d e_j) and the d_s-action in the basis
// (psi, d psi, ..., d^{d-1} psi).
struct CompanionSystem {
  std::vector<std::vector<RingElem>> B;  // d_t-action (times 1/g_s)
  std::vector<std::vector<RingElem>> Q;  // d_spectral-action
};
CompanionSystem companion_system(const DiffOp& A, const DiffOp& C,
                                 GenId spectral);

// (T_p(Q) - T_{p'}(zeta)) / 2^{p-1}.
RingElem semiclassical_curve(int p, int pprime);

// Chebyshev T_n of an arbitrary ring element.
RingElem cheb_T(int n, const RingElem& x);

// ------------------------------------------------------------- Airy check

// Max over the grid of |2 d^2 psi + u_2 psi - zeta psi| for the (2,1) pair
// with u_2 = -t, d = (g_s/sqrt 2) d/dt and psi = Ai(g_s^{-2/3}(zeta + t)),
// second derivative by Richardson-extrapolated central differences.  Throws
// if the finite-difference estimate does not converge under step refinement.
double airy_residual(double g_s, const std::vector<double>& t_grid,
                     double zeta);

}  // namespace randsurf::dsl
