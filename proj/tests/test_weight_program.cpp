#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ifsdim/bigrat.hpp"
#include "ifsdim/errors.hpp"
#include "ifsdim/rng.hpp"
#include "ifsdim/weight_program.hpp"

using namespace ifsdim;

namespace {

double closed_form_k2(double t1, double t2, double d, double s) {
  // valid for s <= 1: both exponent rows active at the optimum
  return (d - 1) * (d - 1) * s * s / ((d - 1) * s * t1 + t2 * (1 - s));
}

BigRat rational_objective(const std::vector<BigRat>& b, const BigRat& d, const BigRat& s) {
  BigRat prefix(0), best;
  bool first = true;
  for (const BigRat& bm : b) {
    const BigRat am = (d - 1) * s * bm + (d * s - 1) * prefix;
    if (first || am > best) best = am;
    first = false;
    prefix += bm;
  }
  return best;
}

}  // namespace

TEST_CASE("single exponent evaluation") {
  const std::vector<double> b{1.0 / 3, 1.0 / 3, 1.0 / 3};
  CHECK(a_component(2.0, 0.9, b, 1) == doctest::Approx(0.3).epsilon(1e-13));
  CHECK(a_component(2.0, 0.9, b, 2) == doctest::Approx(0.5666666666666667).epsilon(1e-13));
  CHECK(a_component(2.0, 0.9, b, 3) == doctest::Approx(0.8333333333333333).epsilon(1e-13));
  CHECK_THROWS_AS(a_component(2.0, 0.9, b, 0), ConfigError);
  CHECK_THROWS_AS(a_component(2.0, 0.9, b, 4), ConfigError);

  CHECK(a_objective({1, 1, 1}, 2.0, 0.9, b) ==
        doctest::Approx(0.8333333333333333).epsilon(1e-13));
  CHECK_THROWS_AS(a_objective({1, 1}, 2.0, 0.9, b), ConfigError);
}

TEST_CASE("one position has a closed form") {
  // A_1 = (d-1) s b_1 with t_1 b_1 = 1
  auto r = a_of_s({2.0}, 2.5, 0.7);
  CHECK(r.A == doctest::Approx(0.525).epsilon(1e-12));
  REQUIRE(r.b.size() == 1);
  CHECK(r.b[0] == doctest::Approx(0.5).epsilon(1e-12));

  auto q = a_of_s({1.0}, 2.0, 1.0);
  CHECK(q.A == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("two equal positions, d = 2") {
  // balanced optimum: b = (s, 1-s), A = s^2
  auto r = a_of_s({1.0, 1.0}, 2.0, 0.8);
  CHECK(r.A == doctest::Approx(0.64).epsilon(1e-11));
  REQUIRE(r.b.size() == 2);
  CHECK(r.b[0] == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(r.b[1] == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(r.pivots > 0);

  auto h = a_of_s({1.0, 1.0}, 2.0, 0.5);
  CHECK(h.A == doctest::Approx(0.25).epsilon(1e-11));
  CHECK(h.b[0] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("two positions, general weights") {
  const double d = 2.7, s = 0.6, t1 = 1.3, t2 = 0.7;
  auto r = a_of_s({t1, t2}, d, s);
  CHECK(r.A == doctest::Approx(closed_form_k2(t1, t2, d, s)).epsilon(1e-11));
  const double b1 = (d - 1) * s / ((d - 1) * s * t1 + t2 * (1 - s));
  CHECK(r.b[0] == doctest::Approx(b1).epsilon(1e-9));
  CHECK(r.b[1] == doctest::Approx((1 - t1 * b1) / t2).epsilon(1e-9));
}

TEST_CASE("three equal positions, d = 2") {
  // geometric profile b_{m+1}/b_m = (1-s)/s
  auto r = a_of_s({1.0, 1.0, 1.0}, 2.0, 0.8);
  CHECK(r.A == doctest::Approx(0.6095238095238096).epsilon(1e-11));
  REQUIRE(r.b.size() == 3);
  // the lexicographic passes run with a 1e-10 face slack, so b carries a
  // little more noise than A does
  CHECK(std::abs(r.b[0] - 0.7619047619047619) < 1e-6);
  CHECK(std::abs(r.b[1] - 0.19047619047619047) < 1e-6);
  CHECK(std::abs(r.b[2] - 0.047619047619047616) < 1e-6);
}

TEST_CASE("degenerate objective at s = 1 takes the lexicographic minimum") {
  // at s = 1 every exponent row sums to (d-1) sum b_j, so the objective is
  // flat on the simplex and the tie-break must push mass to the tail
  auto r = a_of_s({1.0, 1.0}, 2.0, 1.0);
  CHECK(r.A == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(r.b[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(std::abs(r.b[0]) < 1e-8);
  CHECK(r.b[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("exact rational solve pins the optimum") {
  std::vector<BigRat> t{BigRat(1), BigRat(1)};
  auto r = a_of_s_exact(t, BigRat(2), BigRat(4, 5));
  CHECK(r.A == BigRat(16, 25));
  REQUIRE(r.b.size() == 2);
  CHECK(r.b[0] == BigRat(4, 5));
  CHECK(r.b[1] == BigRat(1, 5));
  CHECK(rational_objective(r.b, BigRat(2), BigRat(4, 5)) == BigRat(16, 25));

  auto flat = a_of_s_exact(t, BigRat(2), BigRat(1));
  CHECK(flat.A == BigRat(1));
  CHECK(flat.b[0] == BigRat(0));
  CHECK(flat.b[1] == BigRat(1));
}

TEST_CASE("floating solve agrees with the exact one") {
  SplitRng rng(7u);
  for (int inst = 0; inst < 12; ++inst) {
    const std::size_t k = 1 + std::size_t(rng.next_below(3));
    std::vector<double> t(k);
    std::vector<BigRat> tq(k);
    for (std::size_t j = 0; j < k; ++j) {
      t[j] = 0.8 + 0.45 * rng.next_unit();
      tq[j] = rat_of_double(t[j]);
    }
    const double d = 1.5 + 1.5 * rng.next_unit();
    const double s = 0.4 + 0.6 * rng.next_unit();
    auto fd = a_of_s(t, d, s);
    auto fq = a_of_s_exact(tq, rat_of_double(d), rat_of_double(s));
    CHECK(fd.A == doctest::Approx(to_double(fq.A)).epsilon(1e-10));
    REQUIRE(fd.b.size() == fq.b.size());
    for (std::size_t j = 0; j < k; ++j)
      CHECK(std::abs(fd.b[j] - to_double(fq.b[j])) < 1e-6);
    // exact solution satisfies its own constraints exactly
    BigRat lhs(0);
    for (std::size_t j = 0; j < k; ++j) {
      CHECK(fq.b[j] >= BigRat(0));
      lhs += tq[j] * fq.b[j];
    }
    CHECK(lhs == BigRat(1));
    CHECK(rational_objective(fq.b, rat_of_double(d), rat_of_double(s)) == fq.A);
  }
}

TEST_CASE("scaling the weights rescales the optimum") {
  const std::vector<double> t{1.1, 0.6, 1.7};
  const double d = 2.3, s = 0.77, c = 4.0;
  std::vector<double> ct(t);
  for (double& w : ct) w *= c;
  auto base = a_of_s(t, d, s);
  auto scaled = a_of_s(ct, d, s);
  CHECK(scaled.A == doctest::Approx(base.A / c).epsilon(1e-11));
  for (std::size_t j = 0; j < t.size(); ++j)
    CHECK(scaled.b[j] == doctest::Approx(base.b[j] / c).epsilon(1e-8));

  // exact arithmetic: the ratio is exact
  std::vector<BigRat> tq{BigRat(11, 10), BigRat(3, 5), BigRat(17, 10)};
  std::vector<BigRat> ctq(tq);
  for (BigRat& w : ctq) w *= BigRat(4);
  auto bq = a_of_s_exact(tq, BigRat(23, 10), BigRat(77, 100));
  auto sq = a_of_s_exact(ctq, BigRat(23, 10), BigRat(77, 100));
  CHECK(sq.A * BigRat(4) == bq.A);
}

TEST_CASE("optimum is monotone in s and positive") {
  const std::vector<double> t{1.0, 1.2};
  double prev = 0.0;
  for (double s : {0.3, 0.5, 0.7, 0.9, 1.1, 1.3}) {
    auto r = a_of_s(t, 2.0, s);
    CHECK(r.A > 0.0);
    CHECK(r.A >= prev - 1e-12);
    prev = r.A;
  }
}

TEST_CASE("no feasible point beats the solver") {
  const std::vector<double> t{0.9, 1.3, 1.05};
  const double d = 2.2, s = 0.66;
  const double best = a_of_s(t, d, s).A;
  SplitRng rng(11u);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> b(t.size());
    double mass = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      b[j] = rng.next_unit();
      mass += t[j] * b[j];
    }
    for (double& v : b) v /= mass;  // now sum t_j b_j = 1
    CHECK(a_objective(t, d, s, b) >= best - 1e-9);
  }
}

TEST_CASE("lattice scan brackets the solver") {
  const std::vector<double> t{1.0, 1.0};
  auto lp = a_of_s(t, 2.0, 0.8);
  auto grid = a_of_s_grid(t, 2.0, 0.8, 1e-3);
  CHECK(grid.points == 1001);
  CHECK(grid.A >= lp.A - 1e-9);   // lattice is a subset of the simplex
  CHECK(grid.A - lp.A <= 2e-3);   // within one step of the optimum
  CHECK(grid.b[0] == doctest::Approx(0.8).epsilon(2e-3));

  auto g3 = a_of_s_grid({1.0, 1.0, 1.0}, 2.0, 0.8, 1e-2);
  CHECK(g3.points == 5151);  // triangular count, boundary included
  CHECK(g3.A >= 0.6095238095238096 - 1e-9);
  CHECK(g3.A - 0.6095238095238096 <= 3e-2);
}

TEST_CASE("lattice scan keeps the first minimiser in scan order") {
  // flat objective at s = 1: every lattice point ties, the first stays
  auto g = a_of_s_grid({1.0, 1.0}, 2.0, 1.0, 1e-2);
  CHECK(g.b[0] == 0.0);
  CHECK(g.b[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("lattice scan refuses oversized or malformed requests") {
  CHECK_THROWS_AS(a_of_s_grid({1, 1, 1, 1}, 2.0, 0.8, 1e-4), SizeCapError);
  CHECK_THROWS_AS(a_of_s_grid({1, 1}, 2.0, 0.8, 1e-6), ConfigError);
  CHECK_THROWS_AS(a_of_s_grid({1, 1}, 2.0, 0.8, 0.2), ConfigError);
}

TEST_CASE("program validation") {
  CHECK_THROWS_AS(a_of_s({}, 2.0, 0.8), ConfigError);
  CHECK_THROWS_AS(a_of_s(std::vector<double>(17, 1.0), 2.0, 0.8), ConfigError);
  CHECK_THROWS_AS(a_of_s({1.0, 0.0}, 2.0, 0.8), ConfigError);
  CHECK_THROWS_AS(a_of_s({1.0, -0.5}, 2.0, 0.8), ConfigError);
  CHECK_THROWS_AS(a_of_s({1.0}, 1.0, 0.8), ConfigError);
  CHECK_THROWS_AS(a_of_s({1.0}, 2.0, 0.0), ConfigError);
  CHECK_THROWS_AS(a_of_s({1.0}, 2.0, -0.3), ConfigError);
}

TEST_CASE("full width program stays tractable") {
  std::vector<double> t(16, 1.0);
  auto r = a_of_s(t, 2.0, 0.9);
  CHECK(r.A > 0.0);
  CHECK(r.pivots < 10000);
  double mass = 0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    CHECK(r.b[j] >= -1e-9);
    mass += t[j] * r.b[j];
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(a_objective(t, 2.0, 0.9, r.b) <= r.A + 1e-8);
}
