// maps.hpp
//
// Exact combinatorial oracle for planar-map counting: brute-force enumeration
// of Wick pairings of trace-monomial half-edges (fatgraphs), binned by genus,
// plus the closed-form count of rooted planar quadrangulations and a
// power-law growth fit.
//
// Conventions for wick_enumerate:
//   * vertex_profile lists the degrees of the trace vertices; the FIRST entry
//     is the rooted observable vertex and carries weight 1.
//   * every remaining vertex of degree m carries the potential-insertion
//     factor 1/m, and each class of k identical non-root vertices carries an
//     additional 1/k!.
//   * genus is computed per pairing from the Euler characteristic of each
//     connected component (V - E + F = 2 - 2g) and summed over components.
//
// With these weights, the genus-0 totals for profiles {4}, {4,4}, {4,4,4}
// reproduce the rooted-quadrangulation counts 2, 9, 54 of tutte_formula.
//
// All counting is exact (big-integer / big-rational); no floating point.

#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <utility>
#include <vector>

namespace randsurf::maps {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

struct FatgraphCount {
  std::vector<int> vertex_profile;  // as passed in
  int genus = 0;                    // total genus over components
  BigInt count;                     // raw number of pairings at this genus
  BigRat symmetry_weight;           // count with 1/m and 1/k! factors applied
};

// Enumerate all pairings of the half-edges of the given vertex profile.
// Total half-edges must be even and <= 16.  Returns one entry per occurring
// genus, ordered by genus.  An odd-degree-sum profile yields an empty list.
std::vector<FatgraphCount> wick_enumerate(const std::vector<int>& vertex_profile,
                                          bool connected_only);

// Number of rooted planar quadrangulations with n faces:
//   2 * 3^n * (2n)! / (n! (n+2)!),  n >= 1   (exact arithmetic).
BigRat tutte_formula(long n);

// Least-squares fit of log c_n = n log(base) + exponent log(n) + const over
// counts c_1..c_k (k >= 8); 1/n^j (j <= 3) nuisance terms absorb subleading
// corrections so the leading pair is unbiased at small n.  Returns
// (base, exponent).
std::pair<double, double> growth_fit(const std::vector<BigRat>& counts);

}  // namespace randsurf::maps
