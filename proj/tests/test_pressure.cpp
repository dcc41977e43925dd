#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ifsdim/errors.hpp"
#include "ifsdim/pressure.hpp"

using namespace ifsdim;

TEST_CASE("method names") {
  CHECK(method_name(PressureMethod::exact_partition) == "exact-partition");
  CHECK(method_name(PressureMethod::transfer_eigenvalue) == "transfer-eigenvalue");
  CHECK(method_name(PressureMethod::tail_extrapolated) == "tail-extrapolated");
}

TEST_CASE("digit-weight series") {
  // telescoping: sum over a >= c of 1/(a(a+1)) = 1/c, exactly
  CHECK(lueroth_tail_sum(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(lueroth_tail_sum(1.0, 7.0) == doctest::Approx(1.0 / 7).epsilon(1e-14));
  CHECK(lueroth_tail_sum(1.0, 3000.0) == doctest::Approx(1.0 / 3000).epsilon(1e-12));
  CHECK(lueroth_tail_sum(1.0, 5000.0) == doctest::Approx(1.0 / 5000).epsilon(1e-12));
  // frozen reference values (30-digit arithmetic)
  CHECK(lueroth_tail_sum(0.8, 1.0) == doctest::Approx(1.6755578643993814).epsilon(1e-13));
  CHECK(lueroth_tail_sum(1.3, 7.0) == doctest::Approx(0.027763162918361287).epsilon(1e-13));
  CHECK_THROWS_AS(lueroth_tail_sum(0.5, 1.0), ConfigError);
  CHECK_THROWS_AS(lueroth_tail_sum(0.8, 0.0), ConfigError);

  CHECK(power_tail_sum(2.0, 1.0) == doctest::Approx(1.6449340668482264).epsilon(1e-13));
  CHECK(power_tail_sum(2.0, 5.0) == doctest::Approx(0.22132295573711525).epsilon(1e-13));
  CHECK(power_tail_sum(4.0, 1.0) == doctest::Approx(1.082323233711138).epsilon(1e-13));
  CHECK_THROWS_AS(power_tail_sum(1.0, 1.0), ConfigError);
}

TEST_CASE("level-1 weight sums") {
  auto l3 = make_lueroth(3);
  CHECK(std::log(level1_weight_sum(l3, 0.8)) ==
        doctest::Approx(-0.05147926591515287).epsilon(1e-13));
  auto lf = make_lueroth(kFullAlphabet);
  CHECK(level1_weight_sum(lf, 1.0) == doctest::Approx(1.0).epsilon(1e-13));
  // full gauss level-1 lengths coincide with lueroth's
  CHECK(level1_weight_sum(make_gauss(kFullAlphabet), 0.8) ==
        doctest::Approx(lueroth_tail_sum(0.8, 1.0)).epsilon(1e-13));
  // powerlaw weights are normalized: sum at s=1 is 1 up to rounding
  auto pf = make_powerlaw(2.0, kFullAlphabet);
  CHECK(level1_weight_sum(pf, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("partition sums match hand values") {
  auto g2 = make_gauss(2);
  auto e1 = partition_sum(g2, 1, 1.0);
  CHECK(e1.value == doctest::Approx(-0.40546510810816444).epsilon(1e-13));
  CHECK(e1.method == PressureMethod::exact_partition);
  CHECK(e1.n == 1);
  CHECK(e1.M == 2);
  CHECK(e1.lo <= e1.value);
  CHECK(e1.hi >= e1.value);

  // n = 2: sum of the four exact lengths is 29/84
  auto e2 = partition_sum(g2, 2, 1.0);
  CHECK(e2.value == doctest::Approx(-0.5317604844284198).epsilon(1e-13));

  auto e3 = partition_sum(g2, 3, 0.7);
  CHECK(e3.value == doctest::Approx(-0.18756128668996727).epsilon(1e-13));

  // affine kinds: the level value is n-independent
  auto l2 = make_lueroth(2);
  auto le1 = partition_sum(l2, 1, 1.0);
  auto le2 = partition_sum(l2, 2, 1.0);
  auto le5 = partition_sum(l2, 5, 1.0);
  CHECK(le1.value == doctest::Approx(std::log(2.0 / 3)).epsilon(1e-13));
  CHECK(le2.value == doctest::Approx(le1.value).epsilon(1e-13));
  CHECK(le5.value == doctest::Approx(le1.value).epsilon(1e-13));
}

TEST_CASE("multi-exponent partition shares the enumeration") {
  auto g = make_gauss(6);
  auto multi = partition_sum_multi(g, 3, {0.6, 0.8, 1.0});
  REQUIRE(multi.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    auto single = partition_sum(g, 3, multi[i].s);
    CHECK(multi[i].value == doctest::Approx(single.value).epsilon(1e-15));
  }
  CHECK(multi[0].value > multi[1].value);  // decreasing in s
  CHECK(multi[1].value > multi[2].value);
}

TEST_CASE("partition sandwich bracket holds") {
  for (auto sys : {make_gauss(8), make_lueroth(8), make_powerlaw(2.0, 8)}) {
    CAPTURE(kind_name(sys.kind));
    for (double s : {0.6, 1.0, 1.4}) {
      auto e = partition_sum(sys, 3, s);
      CHECK(e.lo <= e.value);
      CHECK(e.value <= e.hi);
    }
  }
}

TEST_CASE("partition guards") {
  auto g = make_gauss(100);
  CHECK_THROWS_AS(partition_sum(g, 6, 1.0), SizeCapError);  // 1e12 words
  CHECK_THROWS_AS(partition_sum(g, 0, 1.0), ConfigError);
  CHECK_THROWS_AS(partition_sum(g, 2, 0.05), ConfigError);  // below 1/d - 0.2
  CHECK_THROWS_AS(partition_sum(make_gauss(kFullAlphabet), 2, 1.0), ConfigError);
  // full-alphabet gauss level-1 delegates to the series
  auto e = partition_sum(make_gauss(kFullAlphabet), 1, 1.0);
  CHECK(e.value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("series pressure") {
  auto lf = make_lueroth(kFullAlphabet);
  auto e = pressure_series(lf, 1.0);
  CHECK(e.value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(e.method == PressureMethod::tail_extrapolated);
  CHECK(e.M == kFullAlphabet);
  CHECK(e.lo <= e.value);
  CHECK(e.hi >= e.value);
  CHECK(e.hi - e.lo <= 3e-12);

  CHECK(pressure_series(lf, 0.8).value ==
        doctest::Approx(std::log(1.6755578643993814)).epsilon(1e-13));
  CHECK_THROWS_AS(pressure_series(lf, 0.5), ConfigError);
  CHECK_THROWS_AS(pressure_series(make_gauss(kFullAlphabet), 1.0), ConfigError);
  CHECK_THROWS_AS(pressure_series(make_lueroth(30), 1.0), ConfigError);

  auto pf = make_powerlaw(2.0, kFullAlphabet);
  CHECK(pressure_series(pf, 1.0).value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("transfer eigenvalue") {
  // affine systems: the operator is rank-one on constants, so the
  // eigenvalue equals the level-1 weight sum to rounding
  auto l30 = make_lueroth(30);
  for (double s : {0.6, 0.8, 1.0}) {
    auto eig = pressure_eigenvalue(l30, s, 128);
    auto part = partition_sum(l30, 1, s);
    CHECK(eig.value == doctest::Approx(part.value).epsilon(1e-12));
    CHECK(eig.method == PressureMethod::transfer_eigenvalue);
    CHECK(eig.lo <= eig.value);
    CHECK(eig.value <= eig.hi);
    // affine zeta == lambda: the row-sum bracket pinches
    CHECK(eig.hi - eig.lo <= 1e-10);
  }

  auto p40 = make_powerlaw(2.5, 40);
  auto peig = pressure_eigenvalue(p40, 0.9, 128);
  auto ppart = partition_sum(p40, 1, 0.9);
  CHECK(peig.value == doctest::Approx(ppart.value).epsilon(1e-12));

  // gauss: compare against deep exact partitions
  auto g30 = make_gauss(30);
  auto eig = pressure_eigenvalue(g30, 1.0, 512);
  auto part = partition_sum(g30, 5, 1.0);
  CHECK(std::abs(eig.value - part.value) < 0.05);
  CHECK(eig.lo <= eig.value);
  CHECK(eig.value <= eig.hi);

  CHECK_THROWS_AS(pressure_eigenvalue(make_gauss(kFullAlphabet), 1.0, 128), ConfigError);
  CHECK_THROWS_AS(pressure_eigenvalue(g30, 1.0, 8), ConfigError);
  CHECK_THROWS_AS(pressure_eigenvalue(g30, -1.0, 128), ConfigError);
}

TEST_CASE("gauss eigenvalue near unit exponent") {
  // deep truncation leaves only the digit-tail deficit below 0
  auto e = pressure_eigenvalue(make_gauss(200), 1.0, 512);
  CHECK(e.value > -0.02);
  CHECK(e.value <= 0.0);
}

TEST_CASE("gauss level scaling stays within the distortion budget") {
  // |P_{M,kn} - P_{M,n}| <= rho_hat(n)/n with rho_hat <= 2 log 2
  auto g = make_gauss(8);
  const double rho = distortion_ceiling(g);
  auto p2 = partition_sum(g, 2, 0.9).value;
  auto p6 = partition_sum(g, 6, 0.9).value;
  auto p3 = partition_sum(g, 3, 0.9).value;
  CHECK(std::abs(p6 - p2) <= rho / 2 + 1e-12);
  CHECK(std::abs(p6 - p3) <= rho / 3 + 1e-12);
}

TEST_CASE("grid refinement tightens the gauss eigenvalue") {
  auto g = make_gauss(20);
  auto coarse = pressure_eigenvalue(g, 0.8, 64);
  auto fine = pressure_eigenvalue(g, 0.8, 512);
  auto finer = pressure_eigenvalue(g, 0.8, 1024);
  CHECK(std::abs(fine.value - finer.value) < std::abs(coarse.value - finer.value) + 1e-9);
  CHECK(std::abs(fine.value - finer.value) < 1e-5);
}

TEST_CASE("truncation tail bound") {
  auto g200 = make_gauss(200);
  CHECK(truncation_tail_bound(g200, 1.0) == doctest::Approx(2.0 / 201).epsilon(1e-12));
  CHECK_THROWS_AS(truncation_tail_bound(g200, 0.5), ConfigError);
  CHECK_THROWS_AS(truncation_tail_bound(g200, 1.2), ConfigError);  // gauss cert is s <= 1
  CHECK(truncation_tail_bound(make_gauss(kFullAlphabet), 1.0) == 0.0);

  // affine: bound must dominate the true full-minus-truncated deficit
  for (double s : {0.7, 0.9, 1.0, 1.3}) {
    for (std::uint64_t M : {50ull, 200ull}) {
      auto lM = make_lueroth(M);
      const double deficit =
          std::log(lueroth_tail_sum(s, 1.0)) - std::log(level1_weight_sum(lM, s));
      CHECK(deficit >= 0);
      CHECK(deficit <= truncation_tail_bound(lM, s));
    }
  }
}

TEST_CASE("gauss truncation bound dominates the observed deficit") {
  // eigenvalue at a deep truncation stands in for the full value
  auto ref = pressure_eigenvalue(make_gauss(3000), 1.0, 512);
  for (std::uint64_t M : {50ull, 100ull, 200ull}) {
    auto e = pressure_eigenvalue(make_gauss(M), 1.0, 512);
    const double deficit = ref.value - e.value;
    CHECK(deficit > 0);
    CHECK(deficit <= truncation_tail_bound(make_gauss(M), 1.0));
    // and the doubled bound is not wildly loose: deficit exceeds half of it
    CHECK(deficit >= 0.5 * truncation_tail_bound(make_gauss(M), 1.0) * 0.5);
  }
}

TEST_CASE("tail extrapolation") {
  auto l = make_lueroth(kFullAlphabet);
  auto ext = pressure_tail_extrapolate(l, 0.8, {50, 100, 200, 400});
  REQUIRE(ext.per_M.size() == 4);
  for (std::size_t i = 0; i + 1 < 4; ++i) CHECK(ext.per_M[i + 1].value >= ext.per_M[i].value);
  CHECK(ext.final.method == PressureMethod::tail_extrapolated);
  CHECK(ext.final.M == 400);
  // the certified bracket must contain the true full-alphabet value
  const double truth = std::log(lueroth_tail_sum(0.8, 1.0));
  CHECK(ext.final.lo <= truth);
  CHECK(truth <= ext.final.hi);

  auto g = make_gauss(kFullAlphabet);
  auto gext = pressure_tail_extrapolate(g, 1.0, {50, 100, 200});
  CHECK(gext.final.lo <= 0.0);  // true gauss value at s=1 is 0
  CHECK(0.0 <= gext.final.hi);
  CHECK(gext.final.hi - gext.final.lo <= 2.0 / 201 + 1e-12);

  CHECK_THROWS_AS(pressure_tail_extrapolate(l, 0.8, {50, 100}), ConfigError);
  CHECK_THROWS_AS(pressure_tail_extrapolate(l, 0.8, {100, 50, 200}), ConfigError);
  CHECK_THROWS_AS(pressure_tail_extrapolate(l, 0.8, {50, 100, kFullAlphabet}), ConfigError);
  // constant list: zero-width increments, still valid
  auto flat = pressure_tail_extrapolate(l, 0.8, {100, 100, 100});
  CHECK(flat.per_M[0].value == doctest::Approx(flat.per_M[2].value).epsilon(1e-15));
}

TEST_CASE("pressure shape checks") {
  std::vector<double> grid;
  for (int i = 0; i < 20; ++i) grid.push_back(0.55 + i * (0.75 / 19));
  auto rep = pressure_properties_check(make_gauss(12), grid, 3);
  CHECK(rep.decreasing);
  CHECK(rep.convex);
  CHECK(rep.lipschitz_ok);
  CHECK(rep.offending_s.empty());
  CHECK(rep.values.size() == grid.size());
  CHECK(rep.max_abs_slope <= rep.slope_bound);

  auto repl = pressure_properties_check(make_lueroth(kFullAlphabet), grid, 1);
  CHECK(repl.decreasing);
  CHECK(repl.convex);
  CHECK(repl.lipschitz_ok);

  CHECK_THROWS_AS(pressure_properties_check(make_gauss(12), {0.8, 0.6}, 3), ConfigError);
  CHECK_THROWS_AS(pressure_properties_check(make_gauss(12), {0.4, 0.8}, 3), ConfigError);
}

TEST_CASE("s-measure weights") {
  auto g = make_gauss(4);
  auto mu = s_measure_weights(g, 3, 0.9);
  REQUIRE(mu.weights.size() == 64);
  double tot = 0;
  for (double w : mu.weights) {
    CHECK(w > 0);
    tot += w;
  }
  CHECK(tot == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mu.log_normalization == doctest::Approx(3 * partition_sum(g, 3, 0.9).value).epsilon(1e-12));

  // index mapping is the lexicographic order
  Word first = mu.word_at(0);
  CHECK(first.digits == std::vector<std::uint64_t>{1, 1, 1});
  Word last = mu.word_at(63);
  CHECK(last.digits == std::vector<std::uint64_t>{4, 4, 4});
  for (std::size_t i : {0ul, 17ul, 42ul, 63ul}) CHECK(mu.index_of(mu.word_at(i)) == i);

  // spot-check one weight against the exact cylinder length
  Word w({2, 3, 1});
  auto cyl = cylinder_interval(g, w);
  CHECK(mu.weight_of(w) ==
        doctest::Approx(std::exp(0.9 * cyl.log_length - mu.log_normalization)).epsilon(1e-12));

  CHECK_THROWS_AS(s_measure_weights(make_gauss(100), 4, 0.9), SizeCapError);
  CHECK_THROWS_AS(s_measure_weights(make_gauss(kFullAlphabet), 2, 0.9), ConfigError);
}

TEST_CASE("auto dispatch") {
  auto full = pressure_auto(make_lueroth(kFullAlphabet), 0.9);
  CHECK(full.method == PressureMethod::tail_extrapolated);
  auto trunc = pressure_auto(make_lueroth(200), 0.9);
  CHECK(trunc.method == PressureMethod::exact_partition);
  auto gz = pressure_auto(make_gauss(50), 0.9);
  CHECK(gz.method == PressureMethod::transfer_eigenvalue);
  CHECK_THROWS_AS(pressure_auto(make_gauss(kFullAlphabet), 0.9), ConfigError);
}
