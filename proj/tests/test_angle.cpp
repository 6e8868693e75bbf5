#include "doctest.h"
#include "helpers.hpp"

#include "fracrenorm/error.hpp"

using namespace fr;
using frt::strs;

namespace {
AngleContext ctx(int n, int m, const char* t) { return AngleContext::make(n, m, parse_rational(t)); }
}  // namespace

TEST_CASE("rational parsing and reduction") {
  CHECK(parse_rational("2/4") == Rational{1, 2});
  CHECK(parse_rational("3") == Rational{3, 1});
  CHECK(parse_rational("-1/3") == Rational{-1, 3});
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
  CHECK_THROWS_AS(parse_rational("abc"), Error);
  CHECK(Rational::make(6, -4).to_string() == "-3/2");
}

TEST_CASE("context modulus and canonical theta") {
  auto c = ctx(2, 1, "1/12");
  CHECK(c.modulus() == 12);
  CHECK(c.theta().residue == 1);
  std::vector<std::string> warnings;
  auto c2 = AngleContext::make(2, 1, parse_rational("5/12"), &warnings);
  CHECK(c2.theta().to_string() == "1/12");
  CHECK(warnings.size() == 1);
  CHECK(ctx(2, 2, "3/16").modulus() == 16);
  CHECK(ctx(3, 2, "2/15").modulus() == 15);
  CHECK_THROWS_AS(AngleContext::make(1, 1, Rational{0, 1}), Error);
  CHECK_THROWS_AS(c.angle("1/5"), Error);
}

TEST_CASE("phi_n examples") {
  auto c = ctx(2, 1, "1/12");
  CHECK(phi_n(c.angle("1/12"), 2).to_string() == "1/6");
  CHECK(phi_n(c.angle("0"), 2).to_string() == "0/1");
  CHECK(phi_n(c.angle("0"), 5).residue == 0);
  auto c2 = ctx(2, 2, "3/16");
  CHECK(phi_n(c2.angle("3/16"), 2).to_string() == "3/8");
}

TEST_CASE("circle distance examples") {
  auto c = ctx(2, 1, "1/12");
  CHECK(circle_distance(c.angle("1/12"), c.angle("5/12")) == Rational{1, 3});
  CHECK(circle_distance(c.angle("0"), c.angle("1/2")) == Rational{1, 2});
  CHECK(circle_distance(c.angle("0"), c.angle("1/12")) == Rational{1, 12});
  CHECK(circle_distance(phi_n(c.angle("0"), 2), phi_n(c.angle("1/12"), 2)) == Rational{1, 6});
  CHECK_THROWS_AS(circle_distance(Angle{1, 12}, Angle{1, 16}), Error);
}

TEST_CASE("critical angles") {
  CHECK(strs(critical_angles(ctx(2, 1, "1/12"))) == std::vector<std::string>{"5/12", "3/4", "1/12"});
  CHECK(strs(critical_angles(ctx(2, 2, "3/16"))) == std::vector<std::string>{"7/16", "11/16", "15/16", "3/16"});
  CHECK(strs(critical_angles(ctx(2, 1, "1/6"))) == std::vector<std::string>{"1/2", "5/6", "1/6"});
  auto c = ctx(2, 1, "1/12");
  CHECK(critical_angle(c, 0) == critical_angle(c, 3));
  CHECK(critical_angle(c, -1) == critical_angle(c, 2));
}

TEST_CASE("post-critical sets") {
  CHECK(strs(post_critical_set(ctx(2, 1, "1/12"))) ==
        std::vector<std::string>{"0/1", "1/6", "1/3", "1/2", "2/3", "5/6"});
  CHECK(strs(post_critical_set(ctx(2, 2, "3/16"))) == std::vector<std::string>{"0/1", "3/8", "1/2", "3/4", "7/8"});
  CHECK(strs(post_critical_set(ctx(2, 1, "1/6"))) == std::vector<std::string>{"0/1", "1/3", "2/3"});
}

TEST_CASE("validity") {
  CHECK(validate_ms(ctx(2, 1, "1/12")).valid);
  CHECK(validate_ms(ctx(2, 1, "1/6")).valid);
  auto bad = validate_ms(ctx(2, 1, "1/3"));
  CHECK_FALSE(bad.valid);
  CHECK_FALSE(bad.violating_orbits.empty());
  CHECK_FALSE(bad.problems.empty());
}

TEST_CASE("cell index") {
  auto c = ctx(2, 1, "1/12");
  CHECK(cell_index(c, c.angle("0")) == 3);
  CHECK(cell_index(c, c.angle("1/6")) == 1);
  CHECK(cell_index(c, c.angle("1/2")) == 2);
  CHECK_THROWS_AS(cell_index(c, c.angle("1/12")), Error);
}

TEST_CASE("kappa") {
  CHECK(kappa(ctx(2, 1, "1/12")) == std::vector<int>{3, 2, 1});
  CHECK(kappa(ctx(2, 1, "1/6")) == std::vector<int>{3, 2, 1});
  CHECK(kappa(ctx(3, 1, "1/12")) == std::vector<int>{4, 3, 2, 1});
  try {
    kappa(ctx(2, 2, "3/16"));
    FAIL("expected NotAPermutation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotAPermutation);
  }
}

TEST_CASE("property: phi_n is a semigroup action") {
  for (int n = 2; n <= 5; ++n)
    for (Int M = 1; M <= 60; ++M)
      for (Int r = 0; r < M; ++r) {
        Angle a{r, M};
        REQUIRE(phi_n(phi_n(a, n), n) == phi_n(a, static_cast<Int>(n) * n));
      }
}

TEST_CASE("property: distance expansion rule on all pairs up to modulus 240") {
  // independent integer oracle: d = min(|a-b|, M-|a-b|) on residues
  long checked = 0;
  for (int n = 2; n <= 4; ++n)
    for (Int M = 1; M <= 240; ++M)
      for (Int a = 0; a < M; ++a)
        for (Int b = a + 1; b < M; ++b) {
          Int d = std::min(b - a, M - (b - a));
          if (n * d >= M) continue;  // need d < 1/n
          Int nd = n * d;
          Rational expect = Rational::make(std::min(nd, M - nd), M);
          Rational got = circle_distance(phi_n(Angle{a, M}, n), phi_n(Angle{b, M}, n));
          if (got != expect) {
            FAIL("rule fails at n=" << n << " M=" << M << " a=" << a << " b=" << b);
          }
          ++checked;
        }
  CHECK(checked > 1000000);
}

TEST_CASE("property: rotation compatibility of phi_n") {
  for (const auto& c : frt::valid_contexts(20)) {
    const int N = c.cells();
    for (Int r = 0; r < c.modulus(); ++r) {
      Angle a = c.from_residue(r);
      for (int l = 0; l < N; ++l)
        REQUIRE(phi_n(rotate(a, l, N), c.n()) == rotate(phi_n(a, c.n()), static_cast<Int>(c.n()) * l, N));
    }
  }
}

TEST_CASE("property: post-critical set is invariant and avoids critical angles iff valid") {
  for (int n = 2; n <= 3; ++n)
    for (int m = 1; m <= 3; ++m)
      for (int q = 2; q <= 40; ++q)
        for (int p = 0; p * (n + m) < q; ++p) {
          auto c = AngleContext::make(n, m, Rational::make(p, q));
          auto V = post_critical_set(c);
          for (const auto& v : V) REQUIRE(std::binary_search(V.begin(), V.end(), phi_n(v, n)));
          bool disjoint = std::none_of(V.begin(), V.end(), [&](const Angle& v) { return is_critical(c, v); });
          REQUIRE(disjoint == validate_ms(c).valid);
        }
}

TEST_CASE("property: cell arcs are bounded by consecutive critical angles") {
  for (const auto& c : frt::valid_contexts(20)) {
    auto crit = critical_angles(c);
    const int N = c.cells();
    for (Int r = 0; r < c.modulus(); ++r) {
      Angle a = c.from_residue(r);
      if (is_critical(c, a)) continue;
      int i = cell_index(c, a);
      // a lies strictly between c_{i-1} and c_i going counterclockwise
      Int lo = crit[(i - 2 + N) % N].residue, hi = crit[i - 1].residue, M = c.modulus();
      Int off = ((a.residue - lo) % M + M) % M, len = ((hi - lo) % M + M) % M;
      REQUIRE(off > 0);
      REQUIRE(off < len);
    }
  }
}

TEST_CASE("property: kappa inverse shifts by one when m = 1") {
  for (const auto& c : frt::valid_contexts(40)) {
    if (c.m() != 1) continue;
    std::vector<int> k;
    try {
      k = kappa(c);
    } catch (const Error&) {
      continue;
    }
    const int N = c.cells();
    std::vector<int> inv(N + 1);
    for (int i = 1; i <= N; ++i) inv[k[i - 1]] = i;
    for (int i = 1; i <= N; ++i) {
      int prev = i == 1 ? N : i - 1;
      REQUIRE(((inv[prev] - 1 - inv[i]) % N + N) % N == 0);
    }
  }
}
