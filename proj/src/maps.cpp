// maps.cpp -- Wick-pairing fatgraph enumeration and quadrangulation counts.

#include "randsurf/maps.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace randsurf::maps {

namespace {

// Union-find over vertices.
struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

struct Enumerator {
  int H = 0;                      // number of half-edges
  std::vector<int> vertex_of;     // half-edge -> vertex
  std::vector<int> sigma;         // next half-edge counterclockwise at vertex
  std::vector<int> match;         // pairing under construction (-1 = free)
  bool connected_only = false;
  int n_vertices = 0;
  std::map<int, BigInt> by_genus;

  void finish() {
    // Connectivity of vertices through pairing edges.
    UnionFind uf(n_vertices);
    for (int h = 0; h < H; ++h)
      if (match[h] > h) uf.unite(vertex_of[h], vertex_of[match[h]]);
    int comps = 0;
    for (int v = 0; v < n_vertices; ++v)
      if (uf.find(v) == v) ++comps;
    if (connected_only && comps != 1) return;

    // Faces: cycles of h -> sigma[match[h]].
    std::vector<char> seen(H, 0);
    // Per-component face and half-edge tallies.
    std::vector<int> faces(n_vertices, 0), hedges(n_vertices, 0),
        verts(n_vertices, 0);
    for (int h = 0; h < H; ++h) ++hedges[uf.find(vertex_of[h])];
    for (int v = 0; v < n_vertices; ++v) ++verts[uf.find(v)];
    for (int h = 0; h < H; ++h) {
      if (seen[h]) continue;
      int cur = h;
      do {
        seen[cur] = 1;
        cur = sigma[match[cur]];
      } while (cur != h);
      ++faces[uf.find(vertex_of[h])];
    }
    int genus = 0;
    for (int v = 0; v < n_vertices; ++v) {
      if (uf.find(v) != v) continue;
      const int chi = verts[v] - hedges[v] / 2 + faces[v];  // V - E + F
      genus += (2 - chi) / 2;
    }
    by_genus[genus] += 1;
  }

  void recurse(int h) {
    while (h < H && match[h] != -1) ++h;
    if (h == H) {
      finish();
      return;
    }
    for (int k = h + 1; k < H; ++k) {
      if (match[k] != -1) continue;
      match[h] = k;
      match[k] = h;
      recurse(h + 1);
      match[h] = -1;
      match[k] = -1;
    }
  }
};

}  // namespace

std::vector<FatgraphCount> wick_enumerate(const std::vector<int>& vertex_profile,
                                          bool connected_only) {
  int total = 0;
  for (int d : vertex_profile) {
    if (d < 1) throw std::invalid_argument("wick_enumerate: degree must be >= 1");
    total += d;
  }
  if (total > 16) throw std::invalid_argument("wick_enumerate: half-edge budget (16) exceeded");
  if (total % 2 != 0) return {};  // odd parity: no pairings

  Enumerator en;
  en.H = total;
  en.n_vertices = static_cast<int>(vertex_profile.size());
  en.connected_only = connected_only;
  en.match.assign(total, -1);
  en.vertex_of.resize(total);
  en.sigma.resize(total);
  int base = 0;
  for (int v = 0; v < en.n_vertices; ++v) {
    const int d = vertex_profile[v];
    for (int i = 0; i < d; ++i) {
      en.vertex_of[base + i] = v;
      en.sigma[base + i] = base + (i + 1) % d;
    }
    base += d;
  }
  en.recurse(0);

  // Symmetry factors: root vertex free; 1/m per non-root vertex, 1/k! per
  // class of identical non-root degrees.
  BigRat sym = 1;
  std::map<int, int> degree_multiplicity;
  for (size_t v = 1; v < vertex_profile.size(); ++v) {
    sym /= vertex_profile[v];
    ++degree_multiplicity[vertex_profile[v]];
  }
  for (const auto& [deg, k] : degree_multiplicity) {
    (void)deg;
    for (int i = 2; i <= k; ++i) sym /= i;
  }

  std::vector<FatgraphCount> out;
  for (const auto& [genus, count] : en.by_genus) {
    FatgraphCount fc;
    fc.vertex_profile = vertex_profile;
    fc.genus = genus;
    fc.count = count;
    fc.symmetry_weight = BigRat(count) * sym;
    out.push_back(std::move(fc));
  }
  return out;
}

BigRat tutte_formula(long n) {
  if (n < 1) throw std::invalid_argument("tutte_formula: n must be >= 1");
  BigInt num = 2;
  for (long i = 0; i < n; ++i) num *= 3;
  // (2n)! / (n! (n+2)!)
  BigInt f2n = 1, fn = 1, fn2 = 1;
  for (long i = 2; i <= 2 * n; ++i) f2n *= i;
  for (long i = 2; i <= n; ++i) fn *= i;
  for (long i = 2; i <= n + 2; ++i) fn2 *= i;
  return BigRat(num * f2n, fn * fn2);
}

std::pair<double, double> growth_fit(const std::vector<BigRat>& counts) {
  const size_t k = counts.size();
  if (k < 8) throw std::invalid_argument("growth_fit: need at least 8 counts");
  // Model: log c_n = n log(base) + exponent * log n + const, with 1/n^j
  // (j = 1..3) nuisance regressors that absorb the analytic subleading
  // corrections; without them the leading exponent is badly biased at the
  // modest n this oracle can reach.
  constexpr int M = 6;
  long double S[M][M] = {{0}}, rhs[M] = {0};
  for (size_t i = 0; i < k; ++i) {
    const long double n = static_cast<long double>(i + 1);
    const long double y = std::log(counts[i].convert_to<double>());
    const long double base_fns[M] = {n,         std::log(n),   1.0L,
                                     1.0L / n,  1.0L / (n * n), 1.0L / (n * n * n)};
    for (int r = 0; r < M; ++r) {
      rhs[r] += base_fns[r] * y;
      for (int c = 0; c < M; ++c) S[r][c] += base_fns[r] * base_fns[c];
    }
  }
  // Gaussian elimination with partial pivoting.
  int perm[M];
  std::iota(perm, perm + M, 0);
  for (int p = 0; p < M; ++p) {
    int piv = p;
    for (int r = p + 1; r < M; ++r)
      if (std::abs(S[r][p]) > std::abs(S[piv][p])) piv = r;
    for (int c = 0; c < M; ++c) std::swap(S[p][c], S[piv][c]);
    std::swap(rhs[p], rhs[piv]);
    for (int r = p + 1; r < M; ++r) {
      const long double f = S[r][p] / S[p][p];
      for (int c = p; c < M; ++c) S[r][c] -= f * S[p][c];
      rhs[r] -= f * rhs[p];
    }
  }
  long double sol[M];
  for (int p = M - 1; p >= 0; --p) {
    long double v = rhs[p];
    for (int c = p + 1; c < M; ++c) v -= S[p][c] * sol[c];
    sol[p] = v / S[p][p];
  }
  return {std::exp(static_cast<double>(sol[0])), static_cast<double>(sol[1])};
}

}  // namespace randsurf::maps
