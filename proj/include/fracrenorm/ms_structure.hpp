#pragma once

#include <array>
#include <map>
#include <vector>

#include "fracrenorm/angle.hpp"
#include "fracrenorm/scheme.hpp"

namespace fr {

inline constexpr int kDefaultDepthCap = 12;

struct MsStructure {
  AngleContext ctx;
  bool symmetrized = false;
  std::vector<Angle> boundary;     // sorted by residue
  std::vector<Angle> glue_points;  // r_i = phi_n(c_i), i = 1..m+n
  std::vector<int> cell_of;        // per boundary vertex, 1..m+n
  int rotation_order = 0;
  ReplicationScheme level1;

  int index_of(const Angle& a) const;  // -1 when absent
  int glue_index(int i) const { return index_of(glue_points[i - 1]); }
  bool rotation_invariant() const;
};

// Throws InvalidMs when validate_ms fails.
MsStructure build_structure(const AngleContext& ctx, bool symmetrize);

// Symmetrize iff gcd(n, m+n) > 1.
bool default_symmetrize(const AngleContext& ctx);

struct GluedVertexSet {
  int level = 0;
  int num_vertices = 0;
  // copy_map[j][v]: level-k id of parent vertex v in copy j (j = 0..m+n-1,
  // i.e. cell j+1); empty at level 0
  std::vector<std::vector<int>> copy_map;
  // level-(k-1) id -> level-k id
  std::vector<int> inclusion;
  // V0 -> level k
  std::vector<int> boundary_ids;
  // [copy, parent id, merged id] for both sides of every junction
  std::vector<std::array<int, 3>> merges;
  // merged id for each junction i = 1..m+n (index i-1)
  std::vector<int> junction_ids;
};

GluedVertexSet level_vertices(const MsStructure& S, int k, int depth_cap = kDefaultDepthCap);
// Levels 0..k in one pass.
std::vector<GluedVertexSet> level_tower(const MsStructure& S, int k, int depth_cap = kDefaultDepthCap);

// perm[x] = index of boundary[x] + l/(m+n); throws NotInvariant.
std::vector<int> rotation_action(const MsStructure& S, int l);

// Permutations for l = 0..m+n-1.
std::vector<std::vector<int>> rotation_group(const MsStructure& S);

}  // namespace fr
