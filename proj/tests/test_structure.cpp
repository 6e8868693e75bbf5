#include "doctest.h"
#include "helpers.hpp"

#include <set>

#include "fracrenorm/error.hpp"
#include "union_find.hpp"

using namespace fr;
using frt::ms;
using frt::strs;

TEST_CASE("build_structure examples") {
  auto S = ms(2, 1, "1/12", false);
  CHECK(S.boundary.size() == 6);
  CHECK(strs(S.glue_points) == std::vector<std::string>{"5/6", "1/2", "1/6"});
  CHECK(S.rotation_order == 3);
  auto T = ms(2, 2, "3/16", true);
  CHECK(T.boundary.size() == 8);
  for (size_t i = 0; i < 8; ++i) CHECK(T.boundary[i].rational() == Rational::make(static_cast<Int>(i), 8));
  CHECK(ms(2, 1, "1/6").boundary.size() == 3);
  CHECK_THROWS_AS(ms(2, 1, "1/3"), Error);
}

TEST_CASE("default symmetrization follows gcd(n, m+n)") {
  CHECK_FALSE(default_symmetrize(AngleContext::make(2, 1, parse_rational("1/12"))));
  CHECK(default_symmetrize(AngleContext::make(2, 2, parse_rational("3/16"))));
  CHECK(default_symmetrize(AngleContext::make(3, 3, parse_rational("1/18"))));
}

TEST_CASE("level vertex counts") {
  auto S = ms(2, 1, "1/12");
  CHECK(level_vertices(S, 1).num_vertices == 15);
  auto G = ms(2, 1, "1/6");
  CHECK(level_vertices(G, 1).num_vertices == 6);
  CHECK(level_vertices(G, 2).num_vertices == 15);
  auto g0 = level_vertices(S, 0);
  CHECK(g0.num_vertices == 6);
  CHECK(g0.boundary_ids == std::vector<int>{0, 1, 2, 3, 4, 5});
  CHECK_THROWS_AS(level_vertices(S, 3, 2), Error);
}

TEST_CASE("rotation action") {
  auto S = ms(2, 1, "1/12");
  // boundary 0, 1/6, 1/3, 1/2, 2/3, 5/6 ; +1/3
  CHECK(rotation_action(S, 1) == std::vector<int>{2, 3, 4, 5, 0, 1});
  CHECK(rotation_action(S, 0) == std::vector<int>{0, 1, 2, 3, 4, 5});
  try {
    rotation_action(ms(2, 2, "3/16", false), 1);
    FAIL("expected NotInvariant");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotInvariant);
  }
  // cell_of shifts by l
  auto r = rotation_action(S, 1);
  for (size_t x = 0; x < S.boundary.size(); ++x) CHECK(S.cell_of[r[x]] == S.cell_of[x] % 3 + 1);
}

TEST_CASE("property: |V1| = (m+n)(|V0|-1) on 20 valid contexts") {
  auto ctxs = frt::valid_contexts(20);
  REQUIRE(ctxs.size() == 20);
  for (const auto& c : ctxs)
    for (bool sym : {false, true}) {
      if (sym && !default_symmetrize(c)) continue;
      auto S = build_structure(c, sym);
      auto g = level_vertices(S, 1);
      const int N = c.cells(), V0 = static_cast<int>(S.boundary.size());
      CHECK(g.num_vertices == N * (V0 - 1));
      CHECK(g.merges.size() == static_cast<size_t>(2 * N));
      CHECK(S.level1.refined_size == g.num_vertices);
    }
}

TEST_CASE("property: structural invariants of the boundary") {
  for (const auto& c : frt::valid_contexts(20)) {
    auto S = build_structure(c, default_symmetrize(c));
    for (const auto& r : S.glue_points) CHECK(S.index_of(r) >= 0);
    for (const auto& x : S.boundary) {
      CHECK_FALSE(is_critical(c, x));
      CHECK(S.index_of(phi_n(x, c.n())) >= 0);
    }
    if (S.symmetrized)
      for (const auto& x : S.boundary) CHECK(S.index_of(rotate(x, 1, c.cells())) >= 0);
    if (std::gcd(c.n(), c.cells()) == 1) CHECK(build_structure(c, true).boundary == S.boundary);
  }
}

TEST_CASE("property: composed inclusions are injective") {
  for (const auto& c : frt::valid_contexts(8, 8)) {
    auto S = build_structure(c, default_symmetrize(c));
    auto tower = level_tower(S, 3);
    std::vector<int> img(S.boundary.size());
    std::iota(img.begin(), img.end(), 0);
    for (int k = 1; k <= 3; ++k) {
      const auto& inc = tower[k].inclusion;
      std::set<int> seen(inc.begin(), inc.end());
      CHECK(seen.size() == inc.size());
      for (int& v : img) v = inc[v];
      CHECK(img == tower[k].boundary_ids);
    }
  }
}

TEST_CASE("property: ring structure of level 1") {
  for (const auto& c : frt::valid_contexts(20)) {
    auto S = build_structure(c, default_symmetrize(c));
    auto g = level_vertices(S, 1);
    const int N = c.cells();
    // cell adjacency from shared vertices
    std::vector<std::set<int>> adj(N);
    std::vector<std::vector<int>> owners(g.num_vertices);
    for (int j = 0; j < N; ++j)
      for (int v : g.copy_map[j]) owners[v].push_back(j);
    for (const auto& o : owners)
      for (size_t a = 0; a < o.size(); ++a)
        for (size_t b = a + 1; b < o.size(); ++b) {
          adj[o[a]].insert(o[b]);
          adj[o[b]].insert(o[a]);
        }
    for (int j = 0; j < N; ++j) {
      CHECK(adj[j].size() == 2);
      CHECK(adj[j].count((j + 1) % N));
    }
    // removing the junctions leaves exactly N pieces
    std::set<int> junctions(g.junction_ids.begin(), g.junction_ids.end());
    CHECK(junctions.size() == static_cast<size_t>(N));
    fr::UnionFind uf(g.num_vertices);
    for (int j = 0; j < N; ++j) {
      int first = -1;
      for (int v : g.copy_map[j]) {
        if (junctions.count(v)) continue;
        if (first < 0) first = v;
        uf.unite(first, v);
      }
    }
    std::set<int> comps;
    for (int v = 0; v < g.num_vertices; ++v)
      if (!junctions.count(v)) comps.insert(uf.find(v));
    CHECK(comps.size() == static_cast<size_t>(N));
  }
}

TEST_CASE("property: rotation compatibility with the level-1 inclusion") {
  int tested = 0;
  for (const auto& c : frt::valid_contexts(30)) {
    auto S = build_structure(c, true);
    auto g = level_vertices(S, 1);
    const int N = c.cells(), n = c.n();
    for (int l = 0; l < N; ++l) {
      auto rl = rotation_action(S, l);
      auto rnl = rotation_action(S, (n * l) % N);
      for (size_t x = 0; x < S.boundary.size(); ++x) {
        int j = S.cell_of[x] - 1;
        int px = S.index_of(phi_n(S.boundary[x], n));
        CHECK(g.inclusion[rl[x]] == g.copy_map[(j + l) % N][rnl[px]]);
      }
    }
    ++tested;
  }
  CHECK(tested == 30);
}

TEST_CASE("level-2 rebuild is deterministic") {
  auto S = ms(3, 1, "1/12");
  auto a = level_vertices(S, 2), b = level_vertices(S, 2);
  CHECK(a.copy_map == b.copy_map);
  CHECK(a.merges == b.merges);
}
