// ensembles.cpp -- Monte Carlo oracle for the coupled matrix chain; see
// ensembles.hpp.

#include "randsurf/ensembles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "randsurf/specfun.hpp"

namespace randsurf::ensembles {

namespace {

constexpr double kPi = 3.14159265358979323846;

using Matrix = Eigen::MatrixXcd;

// Deterministic normal deviates (Box-Muller on mt19937_64 uniforms), so the
// "bit-identical per seed" contract does not depend on the standard library's
// normal_distribution implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform() {
    return (gen_() >> 11) * 0x1.0p-53;  // [0, 1)
  }
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * kPi * u2);
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

int potential_degree(const std::vector<double>& tm) {
  int deg = 0;
  for (int m = 1; m <= static_cast<int>(tm.size()); ++m)
    if (tm[m - 1] != 0.0) deg = m;
  return deg;
}

void validate(const EnsembleConfig& c) {
  if (c.N < 2) throw std::invalid_argument("ensembles: N >= 2 required");
  if (c.q < 1 || c.q > 3)
    throw std::invalid_argument("ensembles: q must be in {1, 2, 3}");
  if (static_cast<int>(c.potential_coeffs.size()) != c.q)
    throw std::invalid_argument("ensembles: need one coefficient list per matrix");
  if (c.steps < 1 || c.burn_in < 0 || c.thinning < 1)
    throw std::invalid_argument("ensembles: bad chain lengths");
  bool all_gaussian = true;
  for (const auto& tm : c.potential_coeffs) {
    if (tm.size() > 4)
      throw std::invalid_argument("ensembles: potentials up to degree 4");
    const int deg = potential_degree(tm);
    if (deg == 0) throw std::invalid_argument("ensembles: empty potential");
    if (deg % 2 != 0 || tm[deg - 1] <= 0.0)
      throw std::invalid_argument(
          "ensembles: unstable action (leading even coefficient must be "
          "positive; cubic terms need a quartic tail)");
    if (deg > 2) all_gaussian = false;
  }
  if (c.coupling_on && all_gaussian) {
    // Quadratic form sum t2 x_i^2 / 2 - sum_{i<j} x_i x_j is positive
    // definite iff t2 exceeds the top eigenvalue q-1 of the coupling graph.
    for (const auto& tm : c.potential_coeffs)
      if (tm.size() < 2 || tm[1] <= static_cast<double>(c.q - 1))
        throw std::invalid_argument(
            "ensembles: coupled Gaussian chain needs t2 > q - 1");
  }
}

// Action difference for the Hermitian perturbation Delta with
// Delta_{ij} = d, Delta_{ji} = conj(d) (or Delta_{ii} = d real), for the
// potential part N tr V(X) with V = sum_m t_m X^m / m.  X2 and X3 row
// products are taken from the maintained square when degree > 2.
struct Chain {
  const EnsembleConfig* cfg;
  std::vector<Matrix> X;
  std::vector<Matrix> X2;       // maintained only when needed
  std::vector<bool> need_sq;

  double potential_delta(int a, int i, int j, cplx d) const {
    const auto& tm = cfg->potential_coeffs[a];
    const int deg = potential_degree(tm);
    const Matrix& x = X[a];
    const int N = cfg->N;
    double ds = 0.0;
    const bool diag = (i == j);
    const double ad2 = std::norm(d);
    if (diag) {
      const double dr = d.real();
      const double xii = x(i, i).real();
      if (tm.size() >= 1 && tm[0] != 0.0) ds += tm[0] * dr;
      if (tm.size() >= 2 && tm[1] != 0.0)
        ds += tm[1] * (xii * dr + 0.5 * dr * dr);
      if (deg > 2) {
        const Matrix& x2 = X2[a];
        const double x2ii = x2(i, i).real();
        if (tm.size() >= 3 && tm[2] != 0.0) {
          ds += tm[2] * (x2ii * dr + xii * dr * dr + dr * dr * dr / 3.0);
        }
        if (tm.size() >= 4 && tm[3] != 0.0) {
          const double x3ii = (x.row(i) * x2.col(i))(0, 0).real();
          ds += tm[3] * (x3ii * dr + (x2ii + 0.5 * xii * xii) * dr * dr +
                         xii * dr * dr * dr + 0.25 * dr * dr * dr * dr);
        }
      }
    } else {
      // tr Delta = 0; odd-in-Delta single-entry terms use 2 Re(X_{ji} d).
      const double trXD = 2.0 * std::real(x(j, i) * d);
      if (tm.size() >= 2 && tm[1] != 0.0) ds += tm[1] * (trXD + ad2);
      if (deg > 2) {
        const Matrix& x2 = X2[a];
        const double xii = x(i, i).real(), xjj = x(j, j).real();
        const double trX2D = 2.0 * std::real(x2(j, i) * d);
        if (tm.size() >= 3 && tm[2] != 0.0)
          ds += tm[2] * (trX2D + ad2 * (xii + xjj));
        if (tm.size() >= 4 && tm[3] != 0.0) {
          const double trX3D =
              2.0 * std::real((x.row(j) * x2.col(i))(0, 0) * d);
          const double x2ii = x2(i, i).real(), x2jj = x2(j, j).real();
          const double trX2D2 = ad2 * (x2ii + x2jj);
          const double trXDXD =
              2.0 * std::real(d * d * x(j, i) * x(j, i)) + 2.0 * ad2 * xii * xjj;
          const double trXD3 = ad2 * trXD;
          ds += tm[3] * (trX3D + trX2D2 + 0.5 * trXDXD + trXD3 + 0.5 * ad2 * ad2);
        }
      }
    }
    return N * ds;
  }

  double coupling_delta(int a, int i, int j, cplx d) const {
    if (!cfg->coupling_on || cfg->q == 1) return 0.0;
    double tr = 0.0;
    for (int b = 0; b < cfg->q; ++b) {
      if (b == a) continue;
      if (i == j)
        tr += X[b](i, i).real() * d.real();
      else
        tr += 2.0 * std::real(X[b](j, i) * d);
    }
    return -static_cast<double>(cfg->N) * tr;  // coupling enters with +N tr
  }

  void apply(int a, int i, int j, cplx d) {
    if (need_sq[a]) {
      Matrix& x2 = X2[a];
      const Matrix& x = X[a];
      const int N = cfg->N;
      if (i == j) {
        const double dr = d.real();
        for (int r = 0; r < N; ++r) {
          x2(r, i) += x(r, i) * dr;  // X Delta
          x2(i, r) += dr * x(i, r);  // Delta X
        }
        x2(i, i) += dr * dr;
      } else {
        const cplx dc = std::conj(d);
        for (int r = 0; r < N; ++r) {
          x2(r, j) += x(r, i) * d;
          x2(r, i) += x(r, j) * dc;
        }
        for (int cidx = 0; cidx < N; ++cidx) {
          x2(i, cidx) += d * x(j, cidx);
          x2(j, cidx) += dc * x(i, cidx);
        }
        x2(i, i) += std::norm(d);
        x2(j, j) += std::norm(d);
      }
    }
    if (i == j) {
      X[a](i, i) += d.real();
    } else {
      X[a](i, j) += d;
      X[a](j, i) += std::conj(d);
    }
  }
};

std::vector<double> sorted_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  std::vector<double> ev(es.eigenvalues().data(),
                         es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.begin(), ev.end());
  return ev;
}

// Integrated autocorrelation estimate of a scalar series (window truncated
// at the first non-positive autocorrelation).
long effective_count(const std::vector<double>& s) {
  const long n = static_cast<long>(s.size());
  if (n < 4) return n;
  double mean = 0.0;
  for (double v : s) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : s) var += (v - mean) * (v - mean);
  if (var <= 0.0) return n;
  double tau = 1.0;
  for (long lag = 1; lag < n / 2; ++lag) {
    double c = 0.0;
    for (long k = 0; k + lag < n; ++k)
      c += (s[k] - mean) * (s[k + lag] - mean);
    c /= var;
    if (c <= 0.0) break;
    tau += 2.0 * c;
  }
  return std::max(1L, static_cast<long>(static_cast<double>(n) / tau));
}

}  // namespace

SampleBatch sample(const EnsembleConfig& config) {
  validate(config);
  const int N = config.N, q = config.q;
  Rng rng(config.seed);
  Chain chain;
  chain.cfg = &config;
  chain.X.assign(q, Matrix::Zero(N, N));
  chain.need_sq.resize(q);
  chain.X2.resize(q);
  for (int a = 0; a < q; ++a) {
    chain.need_sq[a] = potential_degree(config.potential_coeffs[a]) > 2;
    if (chain.need_sq[a]) chain.X2[a] = Matrix::Zero(N, N);
  }

  double scale = config.proposal_scale / std::sqrt(static_cast<double>(N));
  double action = 0.0;  // running total of accepted increments
  long accepted = 0, proposed = 0;

  auto sweep = [&](bool tuning) {
    long acc = 0, tot = 0;
    for (int a = 0; a < q; ++a)
      for (int i = 0; i < N; ++i)
        for (int j = i; j < N; ++j) {
          cplx d;
          if (i == j)
            d = cplx(scale * rng.normal(), 0.0);
          else
            d = scale * cplx(rng.normal(), rng.normal()) / std::sqrt(2.0);
          const double ds = chain.potential_delta(a, i, j, d) +
                            chain.coupling_delta(a, i, j, d);
          ++tot;
          if (ds <= 0.0 || rng.uniform() < std::exp(-ds)) {
            chain.apply(a, i, j, d);
            action += ds;
            ++acc;
          }
        }
    if (tuning) {
      const double rate = static_cast<double>(acc) / static_cast<double>(tot);
      if (rate < 0.2) scale *= 0.8;
      if (rate > 0.6) scale *= 1.25;
    } else {
      accepted += acc;
      proposed += tot;
    }
  };

  for (long s = 0; s < config.burn_in; ++s) {
    sweep(true);
    if (action < -10.0 * static_cast<double>(N) * N)
      throw std::runtime_error(
          "ensembles: action drifting to -infinity (unstable regime)");
  }

  SampleBatch batch;
  std::vector<double> tr2_series;  // mixing diagnostic
  const long draws = config.steps / config.thinning;
  if (draws < 1)
    throw std::invalid_argument("ensembles: steps < thinning gives no draws");
  for (long dr = 0; dr < draws; ++dr) {
    for (long s = 0; s < config.thinning; ++s) sweep(false);
    Matrix partial = Matrix::Zero(N, N);
    for (int a = 0; a < q; ++a) {
      batch.eigenvalue_draws["X" + std::to_string(a + 1)].push_back(
          sorted_eigenvalues(chain.X[a]));
      partial += chain.X[a];
      if (a >= 1) {
        std::string label = "X1";
        for (int b = 1; b <= a; ++b) label += "+X" + std::to_string(b + 1);
        batch.eigenvalue_draws[label].push_back(sorted_eigenvalues(partial));
      }
    }
    tr2_series.push_back(chain.X[0].squaredNorm() / static_cast<double>(N));
  }
  batch.acceptance_rate =
      static_cast<double>(accepted) / static_cast<double>(proposed);
  batch.effective_samples = effective_count(tr2_series);
  return batch;
}

SampleBatch merge_batches(const std::vector<SampleBatch>& batches) {
  SampleBatch out;
  double acc = 0.0;
  for (const auto& b : batches) {
    for (const auto& [label, draws] : b.eigenvalue_draws) {
      auto& dst = out.eigenvalue_draws[label];
      dst.insert(dst.end(), draws.begin(), draws.end());
    }
    acc += b.acceptance_rate;
    out.effective_samples += b.effective_samples;
  }
  if (!batches.empty()) out.acceptance_rate = acc / batches.size();
  return out;
}

namespace {

const std::vector<std::vector<double>>& draws_for(const SampleBatch& batch,
                                                  const std::string& which) {
  const auto it = batch.eigenvalue_draws.find(which);
  if (it == batch.eigenvalue_draws.end() || it->second.empty())
    throw std::invalid_argument("ensembles: unknown or empty label " + which);
  return it->second;
}

}  // namespace

ResolventEstimate empirical_resolvent(const SampleBatch& batch,
                                      const std::string& which, cplx z) {
  const auto& draws = draws_for(batch, which);
  double lo = draws[0][0], hi = draws[0][0];
  for (const auto& ev : draws) {
    lo = std::min(lo, ev.front());
    hi = std::max(hi, ev.back());
  }
  if (std::abs(z.imag()) < 1e-12) {
    const double bin = (hi - lo) / 100.0;
    double dist = std::numeric_limits<double>::max();
    for (const auto& ev : draws)
      for (double x : ev) dist = std::min(dist, std::abs(z.real() - x));
    if (dist < 3.0 * bin)
      throw std::invalid_argument(
          "empirical_resolvent: z within 3 bin widths of eigenvalues");
  }
  cplx mean = 0.0;
  std::vector<cplx> per;
  per.reserve(draws.size());
  for (const auto& ev : draws) {
    cplx s = 0.0;
    for (double x : ev) s += 1.0 / (z - x);
    s /= static_cast<double>(ev.size());
    per.push_back(s);
    mean += s;
  }
  mean /= static_cast<double>(per.size());
  double var = 0.0;
  for (cplx v : per) var += std::norm(v - mean);
  var /= std::max<size_t>(1, per.size() - 1) * per.size();
  return {mean, std::sqrt(var)};
}

std::vector<HistogramRow> histogram(const SampleBatch& batch,
                                    const std::string& which, int bins) {
  if (bins < 2) throw std::invalid_argument("histogram: bins >= 2");
  const auto& draws = draws_for(batch, which);
  double lo = draws[0][0], hi = draws[0][0];
  for (const auto& ev : draws) {
    lo = std::min(lo, ev.front());
    hi = std::max(hi, ev.back());
  }
  const double w = (hi - lo) / bins;
  if (!(w > 0.0)) throw std::runtime_error("histogram: degenerate support");
  // Per-draw normalized histograms; mean and s.e. across draws.
  std::vector<std::vector<double>> per(draws.size(),
                                       std::vector<double>(bins, 0.0));
  for (size_t d = 0; d < draws.size(); ++d) {
    for (double x : draws[d]) {
      int b = static_cast<int>((x - lo) / w);
      b = std::clamp(b, 0, bins - 1);
      per[d][b] += 1.0;
    }
    for (double& v : per[d]) v /= draws[d].size() * w;
  }
  std::vector<HistogramRow> rows(bins);
  for (int b = 0; b < bins; ++b) {
    double mean = 0.0;
    for (const auto& h : per) mean += h[b];
    mean /= per.size();
    double var = 0.0;
    for (const auto& h : per) var += (h[b] - mean) * (h[b] - mean);
    var /= std::max<size_t>(1, per.size() - 1) * per.size();
    rows[b] = {lo + (b + 0.5) * w, mean, std::sqrt(var)};
  }
  return rows;
}

// ----------------------------------------------- characteristic polynomials

namespace {

// Direct sampler for the n x n Gaussian minor measure with weight
// exp(-tr[t2a X^2/2 (+ t2b Y^2/2 - X Y)]); returns per-draw matrices.
struct GaussianMinorSampler {
  int n;
  bool coupled;
  double t2a, t2b;
  Rng rng;

  GaussianMinorSampler(const EnsembleConfig& c, int n_in)
      : n(n_in), coupled(c.q == 2), rng(c.seed) {
    if (c.q != 1 && c.q != 2)
      throw std::invalid_argument("char_poly_average: q must be 1 or 2");
    for (const auto& tm : c.potential_coeffs)
      if (potential_degree(tm) != 2)
        throw std::invalid_argument("char_poly_average: Gaussian only");
    t2a = c.potential_coeffs[0][1];
    t2b = coupled ? c.potential_coeffs[1][1] : 0.0;
    if (coupled && !c.coupling_on)
      throw std::invalid_argument("char_poly_average: q=2 requires coupling");
    if (coupled && t2a * t2b <= 1.0)
      throw std::invalid_argument("char_poly_average: need t2a t2b > 1");
  }

  // Draws (X, Y); Y unused when q = 1.  `prec_diag` is the precision matrix
  // [[t2a, -1], [-1, t2b]] of a diagonal pair; off-diagonal components carry
  // twice that precision.
  void draw(Matrix& X, Matrix& Y) {
    X.resize(n, n);
    if (coupled) Y.resize(n, n);
    const double det = coupled ? (t2a * t2b - 1.0) : t2a;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const double mult = (i == j) ? 1.0 : 2.0;
        if (!coupled) {
          const double sd = 1.0 / std::sqrt(mult * t2a);
          if (i == j) {
            X(i, i) = sd * rng.normal();
          } else {
            X(i, j) = cplx(sd * rng.normal(), sd * rng.normal());
            X(j, i) = std::conj(X(i, j));
          }
        } else {
          // Covariance of (x, y) is [[t2b, 1], [1, t2a]] / (mult det).
          auto pair_draw = [&](double& x, double& y) {
            const double c11 = t2b / (mult * det);
            const double c12 = 1.0 / (mult * det);
            const double c22 = t2a / (mult * det);
            const double l11 = std::sqrt(c11);
            const double l21 = c12 / l11;
            const double l22 = std::sqrt(std::max(1e-300, c22 - l21 * l21));
            const double g1 = rng.normal(), g2 = rng.normal();
            x = l11 * g1;
            y = l21 * g1 + l22 * g2;
          };
          if (i == j) {
            double x, y;
            pair_draw(x, y);
            X(i, i) = x;
            Y(i, i) = y;
          } else {
            double xr, yr, xi, yi;
            pair_draw(xr, yr);
            pair_draw(xi, yi);
            X(i, j) = cplx(xr, xi);
            X(j, i) = std::conj(X(i, j));
            Y(i, j) = cplx(yr, yi);
            Y(j, i) = std::conj(Y(i, j));
          }
        }
      }
  }
};

double leading_minor_det(const Matrix& X, double x, int k) {
  if (k == 0) return 1.0;
  Matrix m = x * Matrix::Identity(k, k) - X.topLeftCorner(k, k);
  return m.determinant().real();
}

}  // namespace

double char_poly_average(const EnsembleConfig& config, int n, double x) {
  if (n < 0 || n > 6)
    throw std::invalid_argument("char_poly_average: 0 <= n <= 6");
  if (n == 0) return 1.0;
  GaussianMinorSampler sampler(config, n);
  const long draws = std::max(1L, config.steps);
  double sum = 0.0, sumsq = 0.0;
  Matrix X, Y;
  for (long d = 0; d < draws; ++d) {
    sampler.draw(X, Y);
    const double v = leading_minor_det(X, x, n);
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / draws;
  const double var = std::max(0.0, sumsq / draws - mean * mean);
  const double se = std::sqrt(var / draws);
  if (se > 0.2 * std::max(std::abs(mean), 1.0))
    throw std::runtime_error("char_poly_average: variance blow-up");
  return mean;
}

double morozov_check(const EnsembleConfig& config, int n, int M,
                     const std::vector<double>& xs) {
  if (n < 0 || n > 4) throw std::invalid_argument("morozov_check: n <= 4");
  if (M < 1 || M > 3) throw std::invalid_argument("morozov_check: M <= 3");
  if (static_cast<int>(xs.size()) != M)
    throw std::invalid_argument("morozov_check: xs must have M entries");
  for (int k = 0; k < M; ++k)
    for (int l = k + 1; l < M; ++l)
      if (std::abs(xs[k] - xs[l]) < 1e-6)
        throw std::invalid_argument("morozov_check: xs too close");

  // Determinant formula (Brezin-Hikami / Morozov):
  //   <prod_{k=1}^M det(x_k - X)>_{n x n}
  //     = det_{1<=k,l<=M}[alpha_{n+k-1}(x_l)] / det_{1<=k,l<=M}[x_k^{l-1}],
  // with alpha_j(x) = <det(x - X)>_{j x j} the monic orthogonal polynomials
  // of the weight.  The row degrees ascend from n (the alternative index
  // n+1-k fails the degree count: the left side has degree n per variable).
  // One common stream of (n+M-1)-minors supplies every average: leading
  // minors of a Gaussian ensemble are marginally the smaller ensemble.
  GaussianMinorSampler sampler(config, n + M - 1);
  const long draws = std::max(1L, config.steps);
  double lhs_sum = 0.0, lhs_sq = 0.0;
  std::vector<std::vector<double>> a_sum(M, std::vector<double>(M, 0.0));
  std::vector<std::vector<double>> a_sq(M, std::vector<double>(M, 0.0));
  Matrix X, Y;
  for (long d = 0; d < draws; ++d) {
    sampler.draw(X, Y);
    double prod = 1.0;
    for (int k = 0; k < M; ++k) prod *= leading_minor_det(X, xs[k], n);
    lhs_sum += prod;
    lhs_sq += prod * prod;
    for (int k = 0; k < M; ++k)
      for (int l = 0; l < M; ++l) {
        const double v = leading_minor_det(X, xs[l], n + k);
        a_sum[k][l] += v;
        a_sq[k][l] += v * v;
      }
  }
  const double lhs = lhs_sum / draws;
  const double lhs_se =
      std::sqrt(std::max(0.0, lhs_sq / draws - lhs * lhs) / draws);

  Eigen::MatrixXd num(M, M), den(M, M);
  double a_se2 = 0.0;
  for (int k = 0; k < M; ++k)
    for (int l = 0; l < M; ++l) {
      const double mean = a_sum[k][l] / draws;
      num(k, l) = mean;  // alpha_{n+k}(x_l), 0-based k
      a_se2 += std::max(0.0, a_sq[k][l] / draws - mean * mean) / draws;
      den(k, l) = std::pow(xs[k], l);
    }
  const double rhs = num.determinant() / den.determinant();
  const double se = lhs_se + std::sqrt(a_se2) + 1e-300;
  return std::abs(lhs - rhs) / se;
}

}  // namespace randsurf::ensembles
