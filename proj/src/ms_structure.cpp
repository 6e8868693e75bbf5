#include "fracrenorm/ms_structure.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "fracrenorm/error.hpp"
#include "union_find.hpp"

namespace fr {

int MsStructure::index_of(const Angle& a) const {
  auto it = std::lower_bound(boundary.begin(), boundary.end(), a);
  if (it == boundary.end() || *it != a) return -1;
  return static_cast<int>(it - boundary.begin());
}

bool MsStructure::rotation_invariant() const {
  for (const auto& a : boundary)
    if (index_of(rotate(a, 1, ctx.cells())) < 0) return false;
  return true;
}

bool default_symmetrize(const AngleContext& ctx) { return std::gcd(ctx.n(), ctx.cells()) > 1; }

namespace {

GluedVertexSet level_zero(const MsStructure& S) {
  GluedVertexSet g;
  g.level = 0;
  g.num_vertices = static_cast<int>(S.boundary.size());
  g.inclusion.resize(g.num_vertices);
  std::iota(g.inclusion.begin(), g.inclusion.end(), 0);
  g.boundary_ids = g.inclusion;
  return g;
}

// Copies of `prev`, glued at the images of the glue points.
GluedVertexSet glue_copies(const MsStructure& S, const GluedVertexSet& prev) {
  const int N = S.ctx.cells();
  const int np = prev.num_vertices;
  UnionFind uf(N * np);
  std::vector<int> glue(N);
  for (int i = 1; i <= N; ++i) {
    glue[i - 1] = prev.boundary_ids[S.glue_index(i)];
    uf.unite((i - 1) * np + glue[i - 1], (i % N) * np + glue[i - 1]);
  }
  auto lab = uf.labels();
  GluedVertexSet g;
  g.level = prev.level + 1;
  g.num_vertices = lab.empty() ? 0 : *std::max_element(lab.begin(), lab.end()) + 1;
  g.copy_map.assign(N, std::vector<int>(np));
  for (int j = 0; j < N; ++j)
    for (int v = 0; v < np; ++v) g.copy_map[j][v] = lab[j * np + v];
  for (int i = 1; i <= N; ++i) {
    int id = g.copy_map[i - 1][glue[i - 1]];
    g.junction_ids.push_back(id);
    g.merges.push_back({i - 1, glue[i - 1], id});
    g.merges.push_back({i % N, glue[i - 1], id});
  }
  return g;
}

}  // namespace

MsStructure build_structure(const AngleContext& ctx, bool symmetrize) {
  auto rep = validate_ms(ctx);
  if (!rep.valid) {
    std::string msg = "not an MS context";
    for (const auto& p : rep.problems) msg += "; " + p;
    throw Error(ErrorCode::InvalidMs, msg);
  }
  MsStructure S;
  S.ctx = ctx;
  S.symmetrized = symmetrize;
  S.rotation_order = ctx.cells();
  std::set<Angle> b;
  for (const auto& a : post_critical_set(ctx)) {
    if (symmetrize) {
      for (int l = 0; l < ctx.cells(); ++l) b.insert(rotate(a, l, ctx.cells()));
    } else {
      b.insert(a);
    }
  }
  S.boundary.assign(b.begin(), b.end());
  for (const auto& c : critical_angles(ctx)) S.glue_points.push_back(phi_n(c, ctx.n()));
  for (const auto& a : S.boundary) {
    if (is_critical(ctx, a))
      throw Error(ErrorCode::InvalidMs, "boundary point " + a.to_string() + " is critical");
    if (S.index_of(phi_n(a, ctx.n())) < 0)
      throw Error(ErrorCode::InvalidMs, "boundary not forward invariant at " + a.to_string());
    S.cell_of.push_back(cell_index(ctx, a));
  }
  GluedVertexSet g1 = glue_copies(S, level_zero(S));
  S.level1.boundary_size = static_cast<int>(S.boundary.size());
  S.level1.refined_size = g1.num_vertices;
  S.level1.copies = g1.copy_map;
  for (size_t x = 0; x < S.boundary.size(); ++x)
    S.level1.boundary_image.push_back(g1.copy_map[S.cell_of[x] - 1][S.index_of(phi_n(S.boundary[x], ctx.n()))]);
  return S;
}

std::vector<GluedVertexSet> level_tower(const MsStructure& S, int k, int depth_cap) {
  if (k < 0) throw Error(ErrorCode::InvalidInput, "negative level");
  if (k > depth_cap)
    throw Error(ErrorCode::DepthCap, "level " + std::to_string(k) + " exceeds depth cap " + std::to_string(depth_cap));
  std::vector<GluedVertexSet> tower{level_zero(S)};
  for (int level = 1; level <= k; ++level) {
    const GluedVertexSet& prev = tower.back();
    GluedVertexSet g = glue_copies(S, prev);
    if (level == 1) {
      g.inclusion = S.level1.boundary_image;
    } else {
      // a level-(k-1) vertex is (j, w) with w at level k-2; it maps to (j, incl(w))
      g.inclusion.assign(prev.num_vertices, -1);
      for (size_t j = 0; j < prev.copy_map.size(); ++j)
        for (size_t w = 0; w < prev.copy_map[j].size(); ++w) {
          int u = prev.copy_map[j][w];
          if (g.inclusion[u] < 0) g.inclusion[u] = g.copy_map[j][prev.inclusion[w]];
        }
    }
    for (int b : prev.boundary_ids) g.boundary_ids.push_back(g.inclusion[b]);
    tower.push_back(std::move(g));
  }
  return tower;
}

GluedVertexSet level_vertices(const MsStructure& S, int k, int depth_cap) {
  return std::move(level_tower(S, k, depth_cap).back());
}

std::vector<int> rotation_action(const MsStructure& S, int l) {
  std::vector<int> perm;
  for (const auto& a : S.boundary) {
    int j = S.index_of(rotate(a, l, S.ctx.cells()));
    if (j < 0)
      throw Error(ErrorCode::NotInvariant, "boundary not closed under rotation by " + std::to_string(l) + "/" +
                                               std::to_string(S.ctx.cells()));
    perm.push_back(j);
  }
  return perm;
}

std::vector<std::vector<int>> rotation_group(const MsStructure& S) {
  std::vector<std::vector<int>> out;
  for (int l = 0; l < S.ctx.cells(); ++l) out.push_back(rotation_action(S, l));
  return out;
}

}  // namespace fr
