// ensembles.hpp
//
// Monte Carlo oracle for the coupled Hermitian matrix chain
//
//   dmu(X_1..X_q) ~ prod_{i<j} exp(N tr X_i X_j) prod_i exp(-N tr V_i(X_i)),
//
// with polynomial potentials V(x) = sum_m t_m x^m / m.  Provides
//
//   * sample():            entrywise Metropolis over Hermitian rank-<=2
//                          perturbations, one chain strictly sequential,
//                          deterministic per seed; eigenvalue draws are
//                          recorded for each matrix and for the partial sums
//                          X_1 + ... + X_p (p = 2..q).
//   * empirical_resolvent: (1/N) <tr 1/(z - X)> with a standard error.
//   * char_poly_average:   <det(x - X)>_{n x n} over minors of the Gaussian
//                          (optionally coupled, q = 2) ensemble by direct
//                          sampling; the reference value is
//                          (1/(2 t2))^{n/2} H_n(x sqrt(t2/2)), i.e. the n x n
//                          minor measure carries weight exp(-t2 tr X^2 / 2).
//   * morozov_check:       residual of the determinant formula
//                          <prod_k det(x_k-X)>_{n x n} =
//                          det[alpha_{n+k-1}(x_l)] / det[x_k^{l-1}], all
//                          averages taken over one common sample stream,
//                          normalized by the combined standard error.
//
// Sampler design: one Hermitian entry perturbation per step.  For Gaussian
// potentials the action difference is O(1) per entry; degree-3/4 terms are
// evaluated in O(N) per entry from a maintained copy of X^2.  Cubic
// potentials are only accepted with a stabilizing positive quartic tail
// (regularized sampling); purely cubic actions are unbounded below.

#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace randsurf::ensembles {

using cplx = std::complex<double>;

struct EnsembleConfig {
  int N = 64;                  // matrix size
  int q = 1;                   // number of matrices, q in {1,2,3}
  // potential_coeffs[i][m-1] = t_m of V_i(x) = sum_m t_m x^m / m.
  std::vector<std::vector<double>> potential_coeffs;
  bool coupling_on = false;    // exp(N tr X_i X_j) factors over all pairs
  std::uint64_t seed = 1;
  long steps = 200;            // Metropolis sweeps after burn-in
  long burn_in = 100;          // sweeps before recording
  long thinning = 5;           // sweeps between recorded draws
  double proposal_scale = 1.0; // in units of 1/sqrt(N); auto-tuned in burn-in
};

struct SampleBatch {
  // Sorted eigenvalue vectors per draw, keyed by "X1".."Xq" and
  // "X1+..+Xp" for p = 2..q (e.g. "X1+X2").
  std::map<std::string, std::vector<std::vector<double>>> eigenvalue_draws;
  double acceptance_rate = 0.0;
  long effective_samples = 0;
};

struct ResolventEstimate {
  cplx value;
  double std_error = 0.0;  // sqrt(var(Re) + var(Im)) of the mean
};

struct HistogramRow {
  double bin_center = 0.0, density = 0.0, stderr_density = 0.0;
};

// Runs one Metropolis chain.  Throws std::invalid_argument on an unstable
// coefficient choice (leading even coefficient must be positive, or the
// chain purely Gaussian with t2 > q-1 when the coupling is on) and
// std::runtime_error if the action drifts to -infinity during burn-in.
SampleBatch sample(const EnsembleConfig& config);

// Pure reducer merging independently sampled chains (e.g. run concurrently
// with distinct seeds).
SampleBatch merge_batches(const std::vector<SampleBatch>& batches);

// Mean over draws of (1/N) sum_i 1/(z - x_i) for the given label.  Throws if
// the label is unknown, or if z lies on the real axis within three bin widths
// (support range / 100) of an eigenvalue.
ResolventEstimate empirical_resolvent(const SampleBatch& batch,
                                      const std::string& which, cplx z);

// Normalized eigenvalue histogram with per-bin standard errors across draws.
std::vector<HistogramRow> histogram(const SampleBatch& batch,
                                    const std::string& which, int bins);

// MC mean of det(x - X) over n x n minors of the Gaussian (q=1) or
// Gaussian-coupled (q=2) ensemble, by direct sampling of config.steps draws.
// n <= 6.  Throws when the standard error exceeds 20% of max(|mean|, 1).
double char_poly_average(const EnsembleConfig& config, int n, double x);

// Residual of the determinant formula for <prod_k det(x_k - X)>, n <= 4,
// M <= 3, in units of the combined standard error of both sides (0 means
// exact agreement on the common sample stream).  Throws on coincident xs.
double morozov_check(const EnsembleConfig& config, int n, int M,
                     const std::vector<double>& xs);

}  // namespace randsurf::ensembles
