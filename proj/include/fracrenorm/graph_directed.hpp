#pragma once

#include <array>
#include <string>
#include <vector>

#include "fracrenorm/network.hpp"
#include "fracrenorm/partition.hpp"
#include "fracrenorm/relations.hpp"
#include "fracrenorm/renormalization.hpp"
#include "fracrenorm/scheme.hpp"

namespace fr {

// Corner order of a cell l: p_{l-1}, q_{l-1}, p_l, q_l. Forms on a cell
// boundary use this order, so for cell 1 it is p0, q0, p1, q1.
enum Corner : int { PPrev = 0, QPrev = 1, PNext = 2, QNext = 3 };
const char* corner_name(int c);

struct GdCell {
  int l = 1;
  int num_vertices = 0;                        // 2(m+n) + 2
  std::vector<std::array<int, 4>> subcells;    // subcells[k-1][corner] -> local id
  std::array<int, 4> corners{};                // local ids of the cell's own corners
  std::vector<int> outer;                      // subcell indices k of outer subcells
  std::vector<int> inner;
  std::vector<int> broken_junctions;           // k with subcells k, k+1 not sharing p_k
};

// Subcell k of cell l carries the copy of cell k.
GdCell gd_cell(int n, int m, int l);

struct CornerMapEntry {
  int k;       // subcell (= copy of cell k)
  int l;       // host cell
  int corner;  // corner of the subcell
  int level2_id;
};

struct GdStructure {
  int n = 2;
  int m = 1;
  std::vector<GdCell> cells;                      // cells[l-1]
  std::vector<std::vector<int>> local_to_global;  // per cell
  int num_level2 = 0;
  std::vector<int> p_ids;  // level-2 id of p_l, l = 0..m+n-1
  std::vector<int> q_ids;
  std::vector<CornerMapEntry> corner_map;

  int cells_count() const { return n + m; }
  // Scheme of cell l: copies are its subcells, boundary image its corners.
  ReplicationScheme cell_scheme(int l = 1) const;
};

GdStructure build_gd_structure(int n, int m);

// Reflection of the cell-1 corners p0<->p1, q0<->q1.
const std::vector<int>& gd_reflection();

ConductanceForm gd_renorm_T(const GdStructure& G, const ConductanceForm& D);

enum class GdExistence { Exists, Nonexistent, CriticalInconclusive };
const char* gd_existence_name(GdExistence e);
// From the sign of 1/m + 1/n - 1/2.
GdExistence gd_expected_existence(int n, int m);

struct GdSolveOptions {
  double tol = 1e-12;
  int max_iter = 100000;
  bool reflect_each_step = true;
  std::optional<ConductanceForm> init;
};

struct GdHarmonicStructure {
  ConductanceForm form;  // on p0, q0, p1, q1, mass 1
  double eta = 0;
  double residual = 0;
  int iterations = 0;
  bool converged = false;   // iteration settled
  bool degenerate = false;  // limit has a disconnected support
  GdExistence expected = GdExistence::Exists;
  GdExistence verdict = GdExistence::Exists;
  Partition limit_support;  // support components of the limit
  std::string diagnosis;
};

// Throws NonConvergence only when existence is expected and the iteration
// fails to settle on a non-degenerate form.
GdHarmonicStructure gd_solve(int n, int m, const GdSolveOptions& opts = {});

// Unreduced system: one form per cell, cell k's subcells l carry form l.
std::vector<ConductanceForm> gd_unreduced_step(const GdStructure& G, const std::vector<ConductanceForm>& forms);

struct GdUnreducedResult {
  std::vector<ConductanceForm> forms;  // total mass 1
  double eta = 0;
  double residual = 0;
  int steps = 0;
  bool converged = false;
  double spread = 0;  // max distance between the cell forms
};

// Newton iteration on the normalized unreduced fixed-point map.
GdUnreducedResult gd_solve_unreduced(const GdStructure& G, std::vector<ConductanceForm> init, int max_steps = 40,
                                     double tol = 1e-13);

struct GdRhoTable {
  Partition J1;
  Partition J2;
  std::vector<Partition> preserved;  // nontrivial preserved relations on the 4 corners
  bool J1_preserved = false;
  bool J2_preserved = false;
  RhoReport J1_relation;
  RhoReport J1_quotient;
  RhoReport J2_relation;
  RhoReport J2_quotient;
  // rho-bar_J1, rho-under_{V/J1}, rho-bar_J2, rho-under_{V/J2}
  std::array<double, 4> values() const {
    return {J1_relation.rho_over, J1_quotient.rho_under, J2_relation.rho_over, J2_quotient.rho_under};
  }
};

GdRhoTable gd_relation_rhos(int n, int m, const RhoSearchOptions& opts = {});

}  // namespace fr
