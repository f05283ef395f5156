// Tests for the exact fatgraph / quadrangulation counting oracle.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "randsurf/maps.hpp"

using namespace randsurf::maps;

namespace {

BigRat genus_weight(const std::vector<FatgraphCount>& list, int genus) {
  for (const auto& fc : list)
    if (fc.genus == genus) return fc.symmetry_weight;
  return 0;
}

BigInt total_count(const std::vector<FatgraphCount>& list) {
  BigInt t = 0;
  for (const auto& fc : list) t += fc.count;
  return t;
}

BigInt double_factorial(int m) {  // m!!
  BigInt r = 1;
  for (int i = m; i > 1; i -= 2) r *= i;
  return r;
}

}  // namespace

TEST_CASE("wick_enumerate: single quadrangle vertex") {
  const auto res = wick_enumerate({4}, true);
  REQUIRE(res.size() == 2);
  CHECK(genus_weight(res, 0) == BigRat(2));
  CHECK(genus_weight(res, 1) == BigRat(1));
  // Every pairing is connected here, 3 = 3!! in total.
  CHECK(total_count(res) == BigInt(3));
}

TEST_CASE("wick_enumerate: parity and budget") {
  CHECK(wick_enumerate({3}, true).empty());
  CHECK(wick_enumerate({3, 4}, true).empty());
  CHECK_THROWS(wick_enumerate({10, 8}, true));
  CHECK_THROWS(wick_enumerate({0}, true));
}

TEST_CASE("wick_enumerate: total pairing count is (2k-1)!!") {
  for (const auto& profile :
       {std::vector<int>{4}, {4, 4}, {6, 2}, {2, 2, 2}, {4, 4, 4}}) {
    int H = 0;
    for (int d : profile) H += d;
    const auto res = wick_enumerate(profile, false);
    CHECK(total_count(res) == double_factorial(H - 1));
  }
}

TEST_CASE("wick_enumerate: genus bounds per pairing") {
  for (const auto& profile : {std::vector<int>{4, 4}, {6, 4, 2}, {4, 4, 4}}) {
    for (bool conn : {false, true}) {
      for (const auto& fc : wick_enumerate(profile, conn)) {
        CHECK(fc.genus >= 0);
        CHECK(fc.count > 0);
      }
    }
  }
}

TEST_CASE("tutte_formula: closed form values") {
  CHECK(tutte_formula(1) == BigRat(2));
  CHECK(tutte_formula(2) == BigRat(9));
  CHECK(tutte_formula(3) == BigRat(54));
  CHECK(tutte_formula(4) == BigRat(378));
  CHECK_THROWS(tutte_formula(0));
}

TEST_CASE("wick vs tutte: quadrangulation profiles n = 1, 2, 3") {
  CHECK(genus_weight(wick_enumerate({4}, true), 0) == tutte_formula(1));
  CHECK(genus_weight(wick_enumerate({4, 4}, true), 0) == tutte_formula(2));
  CHECK(genus_weight(wick_enumerate({4, 4, 4}, true), 0) == tutte_formula(3));
}

TEST_CASE("growth_fit") {
  // Tutte counts n = 1..20: base 12, exponent -5/2.
  std::vector<BigRat> counts;
  for (long n = 1; n <= 20; ++n) counts.push_back(tutte_formula(n));
  auto [base, expo] = growth_fit(counts);
  CHECK(std::abs(base - 12.0) < 0.5);
  CHECK(std::abs(expo + 2.5) < 0.2);

  // Geometric sequence 2^n.
  std::vector<BigRat> geo;
  BigRat g = 1;
  for (int n = 1; n <= 12; ++n) {
    g *= 2;
    geo.push_back(g);
  }
  auto [b2, e2] = growth_fit(geo);
  CHECK(std::abs(b2 - 2.0) < 1e-9);
  CHECK(std::abs(e2) < 0.05);

  // Constant sequence -> base 1.
  std::vector<BigRat> cst(10, BigRat(7));
  auto [b3, e3] = growth_fit(cst);
  CHECK(std::abs(b3 - 1.0) < 1e-9);
  CHECK(std::abs(e3) < 1e-9);

  CHECK_THROWS(growth_fit(std::vector<BigRat>(5, BigRat(1))));
}
