// wronskian.hpp
//
// Generalized-Wronskian machinery for the (p, p') isomonodromy systems.
//
// The n-th Wronskian functions W^{(n)}_lambda(t; zeta) are indexed by Young
// diagrams lambda in Lambda_{p,n} (at most n rows, each row <= p - n) and
// span a C(p, n)-dimensional module over the ring of symmetric Schur
// operators S_lambda(d).  Concretely we realize the module as the n-th
// exterior power of the companion module of P psi = zeta psi: the basis
// diagram lambda corresponds to the wedge of the states d^{m} psi with
// exponents {lambda_a + n - a}.  In this representation
//
//   * the Schur action S_mu(d) W_lambda expands through the
//     Littlewood-Richardson rule followed by companion reduction of
//     out-of-range exponents (schur_reduce),
//   * the t- and zeta-flows become the C(p,n) x C(p,n) Lax matrices
//     B^{(n)}, Q^{(n)} with d_t W-vec = B W-vec, d_zeta W-vec = Q W-vec
//     (lax_matrices; d = g_s d/dt),
//   * the spectral curves are the characteristic polynomials
//     F^{(n)} = det(z I - B), G^{(n)} = det(Q I - calQ) (char_polys).
//
// On top of that the module provides the charge-conjugation map
// W_lambda -> (-1)^{|lambda|} W_{(lambda^perp)^vee} between levels n and
// p - n, the Chebyshev-product factorization of the semiclassical n = 2
// curve, quantum dimensions and the boundary-entropy / Kac-branch
// identities of the cosh parametrization, and the spectral-duality check
// comparing the curve of the Laplace-dual (chi-side) system against the
// level-(p-n) curve with the roles of the spectral parameter and the
// eigenvalue exchanged.

#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "randsurf/dsl.hpp"

namespace randsurf::wronskian {

using dsl::DiffOp;
using dsl::GenId;
using dsl::Rat;
using dsl::RingElem;

// -------------------------------------------------------------- diagrams

// Weakly decreasing non-negative rows; trailing zeros are trimmed in the
// canonical form (the empty diagram is {}).
using Diagram = std::vector<int>;

std::string diagram_to_string(const Diagram& d);

// All of Lambda_{p,n}, sorted by (|lambda|, ascending positional key with
// lambda_1 least significant in base p - n); size C(p, n).
std::vector<Diagram> young_basis(int p, int n);

// Littlewood-Richardson coefficients: s_mu * s_lambda = sum c^nu s_nu.
std::map<Diagram, long> littlewood_richardson(const Diagram& mu,
                                              const Diagram& lambda);

// ---------------------------------------------------------------- module

struct ModuleElem {
  std::map<Diagram, RingElem> coeff;  // keys in Lambda_{p,n}, canonical form
};

// S_mu(d) applied to `target`, expanded on the Lambda_{p,n} basis: LR
// expansion followed by reduction of diagrams with rows exceeding p - n
// through the companion relations of P psi = zeta psi (with the optional
// background substitutions applied to the operator coefficients first).
ModuleElem schur_reduce(int p, int pprime, int n, const Diagram& mu,
                        const ModuleElem& target,
                        const std::map<GenId, RingElem>& substitutions = {},
                        const Rat& beta = 1);

// ----------------------------------------------------------- Lax matrices

using Matrix = std::vector<std::vector<RingElem>>;

struct LaxPair {
  std::vector<Diagram> basis;  // young_basis(p, n)
  Matrix B;                    // d_t-action: d W_a = sum_b B[a][b] W_b
  Matrix Q;                    // d_zeta-action
};

// Supported pairs: (3,2), (4,3), (5,2) (any 1 <= n <= p).
LaxPair lax_matrices(int p, int pprime, int n,
                     const std::map<GenId, RingElem>& substitutions = {},
                     const Rat& beta = 1);

// Zero-curvature residual g_s dB/dzeta - g_s dQ/dt + [B, Q]; vanishes
// modulo the string-equation constraints.
Matrix zero_curvature(const LaxPair& lp, GenId spectral = dsl::gen_zeta());

// ----------------------------------------------------- charge conjugation

struct SignedDiagram {
  Diagram diagram;  // (lambda^perp)^vee in Lambda_{p,p-n}
  int sign;         // (-1)^{|lambda|}
};

SignedDiagram charge_conjugate_diagram(int p, int n, const Diagram& lambda);
ModuleElem charge_conjugate(int p, int n, const ModuleElem& elem);

// The matrix of the conjugation map in the young_basis orderings of
// Lambda_{p,n} (rows) and Lambda_{p,p-n} (columns).
Matrix conjugation_matrix(int p, int n);

// ----------------------------------------------------------------- curves

// F^{(n)}(z, zeta) = det(z I - B^{(n)}), G^{(n)}(Q, zeta) = det(Q I - calQ).
std::pair<RingElem, RingElem> char_polys(
    int p, int pprime, int n,
    const std::map<GenId, RingElem>& substitutions = {}, const Rat& beta = 1);

// Chebyshev-product factorization of the semiclassical n = 2 curve:
//   G^{(2)}_cl(zeta, Q) = Q^{p/2 if p even} *
//       prod_a [ T_p(Q / (2 cos(pi p' a / p))) - T_{p'}((-1)^a zeta) ],
// a = 1 .. floor((p-1)/2), up to an overall constant.
struct ChebFactor {
  double scale;  // 2 cos(pi p' a / p)
  int sign;      // (-1)^a, the argument flip of T_{p'}
};
struct SemiclassicalFactorization {
  int p = 0, pprime = 0;
  int q_power = 0;  // exponent of the bare Q factor (p/2 for even p)
  std::vector<ChebFactor> factors;
  double evaluate(double zeta, double Q) const;
};
SemiclassicalFactorization semiclassical_factor(int p, int pprime);

// Max residual between the factorization and the parametrized product
// prod_{j1<j2} (Q - Q^{(j1)}(tau) - Q^{(j2)}(tau)) at zeta = cosh(p tau),
// after fixing the overall constant; grid over tau and Q.
double factorization_residual(int p, int pprime);

// ------------------------------------------------- semiclassical identities

// d_{r,s} = S_{(r,s)(1,1)} / S_{(1,1)(1,1)} from the modular S-matrix.
double quantum_dimension(int p, int pprime, int r, int s);

// Max over tau of |sum_k Q^{(j_k)} - [sin(pi n p'/p)/sin(pi p'/p)] Q^{(0)}|
// on the branch j_k = k - (n+1)/2 (20 tau values).
double kac_branch_check(int p, int pprime, int n);

// Max residual of the two boundary-entropy sums against their closed forms
// over the full Kac ranges 1 <= s <= p'-1, 1 <= r <= p-1 and several tau.
double boundary_entropy_residual(int p, int pprime);

// --------------------------------------------------------- spectral duality

// Builds the Laplace-dual (chi-side) level-n system from the duality
// transform of (P, Q), computes its curve G-tilde^{(n)}(eta, P) and compares
// against G^{(p-n)}(zeta, Q) with spectral parameter and eigenvalue
// exchanged, allowing an overall constant and a bare power of the eigenvalue
// on either side.  Returns a relative residual (0 when the match is exact).
// Supported pairs: (3,2) symbolically, (4,3) semiclassically at the
// conformal background.
double spectral_duality_check(int p, int pprime, int n);

}  // namespace randsurf::wronskian
