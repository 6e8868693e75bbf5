#include "doctest.h"
#include "helpers.hpp"

#include "fracrenorm/error.hpp"
#include "fracrenorm/renormalization.hpp"

using namespace fr;
using doctest::Approx;
using frt::ms;

TEST_CASE("replicate examples") {
  auto G = ms(2, 1, "1/6");
  auto R = replicate(G, ConductanceForm::complete(3));
  CHECK(R.size() == 6);
  int edges = 0;
  for (int x = 0; x < 6; ++x)
    for (int y = x + 1; y < 6; ++y)
      if (R.weight(x, y) > 0) {
        ++edges;
        CHECK(R.weight(x, y) == Approx(1));
      }
  CHECK(edges == 9);
  auto S = ms(2, 1, "1/12");
  CHECK(replicate(S, ConductanceForm::complete(6)).size() == 15);
  CHECK(replicate(S, ConductanceForm(6)).max_weight() == 0);
  CHECK_THROWS_AS(replicate(S, ConductanceForm::complete(5)), Error);
}

TEST_CASE("replicate energy identity") {
  auto S = ms(3, 1, "1/12");
  std::mt19937_64 rng(3);
  const int b = static_cast<int>(S.boundary.size());
  auto D = frt::random_form(b, rng);
  auto R = replicate(S, D);
  std::uniform_real_distribution<double> u(-1, 1);
  Eigen::VectorXd f(R.size());
  for (int v = 0; v < R.size(); ++v) f(v) = u(rng);
  double sum = 0;
  for (const auto& copy : S.level1.copies) {
    Eigen::VectorXd g(b);
    for (int x = 0; x < b; ++x) g(x) = f(copy[x]);
    sum += energy(D, g);
  }
  CHECK(energy(R, f) == Approx(sum));
}

TEST_CASE("renorm_T examples") {
  auto G = ms(2, 1, "1/6");
  auto T = renorm_T(G, ConductanceForm::complete(3));
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) CHECK(T.weight(a, b) == Approx(0.6));
  auto S = ms(2, 1, "1/12");
  std::mt19937_64 rng(4);
  auto D = frt::random_form(6, rng);
  CHECK((renorm_T(S, D.scaled(7)).weights() - renorm_T(S, D).weights() * 7).norm() < 1e-10);
  CHECK(renorm_T(S, ConductanceForm(6)).max_weight() == 0);
  auto H = solve_eigenform(S);
  CHECK((renorm_T(S, H.form).weights() - H.form.weights() / H.eta).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(1 / H.eta == Approx(0.64735).epsilon(2e-5));
}

TEST_CASE("symmetrize examples") {
  auto G = ms(2, 1, "1/6");
  auto U = ConductanceForm::complete(3);
  CHECK((symmetrize(G, U).weights() - U.weights()).norm() < 1e-15);
  auto P = U;
  P.set_weight(0, 1, 1.3);
  auto Q = symmetrize(G, P);
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) CHECK(Q.weight(a, b) == Approx(1.1));
  CHECK(symmetrize(G, ConductanceForm(3)).max_weight() == 0);
  CHECK_THROWS_AS(symmetrize(ms(2, 2, "3/16", false), ConductanceForm::complete(5)), Error);
  // idempotent
  std::mt19937_64 rng(8);
  auto S = ms(2, 1, "1/12");
  auto D = symmetrize(S, frt::random_form(6, rng));
  CHECK((symmetrize(S, D).weights() - D.weights()).norm() < 1e-14);
}

TEST_CASE("solve_eigenform examples") {
  auto G = solve_eigenform(ms(2, 1, "1/6"));
  CHECK(G.eta == Approx(5.0 / 3).epsilon(1e-10));
  CHECK(G.form.weight(0, 1) == Approx(G.form.weight(1, 2)).epsilon(1e-10));
  CHECK(G.form.weight(0, 2) == Approx(G.form.weight(1, 2)).epsilon(1e-10));
  CHECK(G.form.mass() == Approx(1));
  auto H = solve_eigenform(ms(3, 2, "2/15"));
  CHECK(H.eta == Approx(2).epsilon(1e-10));
  CHECK(std::abs(H.eta - H.eta_rayleigh) < 1e-9 * H.eta);
}

TEST_CASE("non-convergence reports diagnostics") {
  SolverOptions o;
  o.max_iter = 3;
  o.tol = 1e-15;
  try {
    solve_eigenform(ms(2, 1, "1/12"), o);
    FAIL("expected NonConvergence");
  } catch (const NonConvergence& e) {
    CHECK(e.code() == ErrorCode::NonConvergence);
    CHECK(e.info().iterations == 3);
    CHECK_FALSE(e.info().last_iterates.empty());
  }
}

TEST_CASE("verify_harmonic_structure") {
  auto S = ms(2, 1, "1/6");
  auto H = solve_eigenform(S);
  auto r = verify_harmonic_structure(S, H.form, H.eta);
  CHECK(r.residual <= 1e-10);
  CHECK(r.extension_consistency <= 1e-10);
  auto P = H.form;
  P.set_weight(0, 1, P.weight(0, 1) * 1.01);
  auto rp = verify_harmonic_structure(S, P, H.eta);
  CHECK(rp.residual > 3e-3);
  CHECK(rp.residual < 3e-2);
  auto again = renorm_T(S, H.form).scaled(H.eta);
  CHECK(verify_harmonic_structure(S, again, H.eta).residual <= 1e-10);
}

TEST_CASE("restrict_to_subset") {
  auto G = ms(2, 1, "1/6");
  auto H = solve_eigenform(G);
  auto all = restrict_to_subset(G, H, G.boundary);
  CHECK((all.weights() - H.form.weights()).norm() < 1e-14);
  auto two = restrict_to_subset(G, H, {G.boundary[0], G.boundary[2]});
  CHECK(two.weight(0, 1) == Approx(1 / effective_resistance(H.form, 0, 2)));
  auto S = ms(3, 2, "2/15");
  auto HS = solve_eigenform(S);
  auto W = restrict_to_subset(S, HS, {S.ctx.angle("0"), S.ctx.angle("2/5"), S.ctx.angle("4/5")});
  // p0p1 : p0p2 : p1p2 = 2 : 3 : 2 at eta = 2
  double s = W.weight(1, 2) / 2;
  CHECK(W.weight(0, 1) / s == Approx(2).epsilon(1e-8));
  CHECK(W.weight(0, 2) / s == Approx(3).epsilon(1e-8));
  CHECK_THROWS_AS(restrict_to_subset(S, HS, {S.ctx.angle("1/15")}), Error);
}

TEST_CASE("property: eta family closed form") {
  struct C {
    int n, m, l;
  } cases[] = {{2, 1, 1}, {2, 3, 1}, {3, 2, 2}, {3, 1, 1}, {3, 1, 2}, {3, 2, 1}, {4, 1, 1}, {4, 1, 3}};
  for (auto c : cases) {
    auto ctx = AngleContext::make(c.n, c.m, Rational::make(c.l, c.n * (c.n + c.m)));
    auto S = build_structure(ctx, default_symmetrize(ctx));
    auto H = solve_eigenform(S);
    INFO("n=" << c.n << " m=" << c.m << " l=" << c.l);
    CHECK(std::abs(H.eta - frt::eta_family(c.n, c.m, c.l)) < 1e-9);
    CHECK(H.eta > 1);
  }
}

TEST_CASE("property: T is monotone on the cone") {
  auto S = ms(2, 1, "1/12");
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1, 1), w(0.1, 1.0);
  for (int it = 0; it < 30; ++it) {
    auto D = frt::random_form(6, rng);
    auto E = D;
    int x = it % 6, y = (it / 6 + x + 1) % 6;
    E.add_weight(x, y, w(rng));
    auto TD = renorm_T(S, D), TE = renorm_T(S, E);
    for (int s = 0; s < 5; ++s) {
      Eigen::VectorXd f(6);
      for (int i = 0; i < 6; ++i) f(i) = u(rng);
      CHECK(energy(TE, f) >= energy(TD, f) - 1e-12);
    }
  }
}

TEST_CASE("property: T preserves rotation symmetry") {
  for (auto [n, m, t] : {std::tuple{2, 1, "1/12"}, {2, 2, "3/16"}, {3, 1, "1/12"}}) {
    auto S = ms(n, m, t, true);
    std::mt19937_64 rng(n * 10 + m);
    auto D = symmetrize(S, frt::random_form(static_cast<int>(S.boundary.size()), rng));
    auto T = renorm_T(S, D);
    CHECK((symmetrize(S, T).weights() - T.weights()).cwiseAbs().maxCoeff() < 1e-12 * T.max_weight());
  }
}

TEST_CASE("property: solver is scale invariant") {
  auto S = ms(2, 1, "1/12");
  std::mt19937_64 rng(2);
  auto D0 = symmetrize(S, frt::random_form(6, rng));
  SolverOptions a, b;
  a.init = D0;
  b.init = D0.scaled(123.0);
  auto Ha = solve_eigenform(S, a), Hb = solve_eigenform(S, b);
  CHECK(Ha.eta == Approx(Hb.eta).epsilon(1e-11));
  CHECK((Ha.form.weights() - Hb.form.weights()).cwiseAbs().maxCoeff() < 1e-10);
}
