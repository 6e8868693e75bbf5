#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fracrenorm/ms_structure.hpp"
#include "fracrenorm/network.hpp"
#include "fracrenorm/partition.hpp"
#include "fracrenorm/renormalization.hpp"
#include "fracrenorm/scheme.hpp"

namespace fr {

// Smallest relation on the refined set containing the copies of J.
Partition refine_closure(const std::vector<std::vector<int>>& copies, int refined_size, const Partition& J);
Partition j1_closure(const ReplicationScheme& scheme, const Partition& J);
Partition j1_closure(const MsStructure& S, const Partition& J);
// Relation on the domain of `map` induced by P on its codomain.
Partition pull_back(const Partition& P, const std::vector<int>& map);

bool is_preserved(const ReplicationScheme& scheme, const Partition& J);
// Throws NotInvariant when require_G is set and the boundary is not
// rotation invariant.
bool is_preserved(const MsStructure& S, const Partition& J, bool require_G);

// Worker count: requested if > 0, else hardware concurrency; capped by
// FRACTAL_RENORM_THREADS when set.
int worker_count(int requested = 0);

// All preserved partitions invariant under every permutation in `group`
// (pass an empty group for no constraint), in restricted-growth order.
std::vector<Partition> enumerate_preserved(const ReplicationScheme& scheme,
                                           const std::vector<std::vector<int>>& group, int cap = 12,
                                           int threads = 0);
std::vector<Partition> enumerate_preserved(const MsStructure& S, bool require_G, int cap = 12, int threads = 0);

// {J+, J-} on the boundary; throws KappaUndefined.
std::pair<Partition, Partition> build_J_plus_minus(const MsStructure& S);

// D vanishes exactly on functions constant on the blocks of J.
bool in_M_J(const ConductanceForm& D, const Partition& J, double rel_tol = 1e-12);

// Throws NotInMJ.
ConductanceForm t_relation(const ReplicationScheme& scheme, const Partition& J, const ConductanceForm& D);
ConductanceForm t_relation(const MsStructure& S, const Partition& J, const ConductanceForm& D);

// Dq lives on the blocks of J (block order = canonical order).
ConductanceForm t_quotient(const ReplicationScheme& scheme, const Partition& J, const ConductanceForm& Dq);
ConductanceForm t_quotient(const MsStructure& S, const Partition& J, const ConductanceForm& Dq);

// Restriction of D to block-constant functions, as a form on blocks.
ConductanceForm quotient_form(const ConductanceForm& D, const Partition& J);

struct RatioBounds {
  double min = 0;
  double max = 0;
  Eigen::VectorXd values;  // ascending
};

// Stationary values of energy_A / energy_B on the orthogonal complement of
// the block-constant functions of `modulo`. Throws DegenerateInput when B is
// not positive definite there or the complement is trivial.
RatioBounds stationary_ratios(const ConductanceForm& A, const ConductanceForm& B, const Partition& modulo);

// Sum over blocks of the trace of D onto each block.
ConductanceForm d_sub_j(const ConductanceForm& D, const Partition& J);

enum class RhoSide { Relation, Quotient };

struct RhoSearchOptions {
  int k = 1;
  int restarts = 4;
  int max_sweeps = 300;
  double min_step = 1e-6;
  double log_bound = 30;
  // forms invariant under these boundary permutations only (each must
  // preserve J); empty for unrestricted search
  std::vector<std::vector<int>> group;
  // extra starting forms (on the boundary for Relation, on blocks for Quotient)
  std::vector<ConductanceForm> starts;
  unsigned long long seed = 20240917;
};

struct RhoReport {
  Partition relation;
  RhoSide side = RhoSide::Relation;
  double rho_over = 0;   // inf over searched forms of the max ratio
  double rho_under = 0;  // sup over searched forms of the min ratio
  int k = 1;
  int basis_dim = 0;     // number of free log-weights
  bool exact = false;    // form space is a single ray, values are exact
  ConductanceForm over_form;
  ConductanceForm under_form;
};

RhoReport rho_search(const ReplicationScheme& scheme, const Partition& J, RhoSide side,
                     const RhoSearchOptions& opts = {});

// Ratios of (T^k A, A) for the relation or quotient operator.
RatioBounds relation_ratios(const ReplicationScheme& scheme, const Partition& J, const ConductanceForm& D, int k = 1);
RatioBounds quotient_ratios(const ReplicationScheme& scheme, const Partition& J, const ConductanceForm& Dq, int k = 1);

struct UniquenessCertificate {
  bool certified = false;
  int k = 0;                        // first certifying k
  double value = 0;                 // eta^k * max ratio at that k
  std::vector<double> trajectory;   // k = 1..k_max
  bool monotone = true;
};

UniquenessCertificate uniqueness_certificate(const ReplicationScheme& scheme, const ConductanceForm& D, double eta,
                                             const Partition& J, int k_max = 8, double margin = 1e-6);

struct CellFlowReport {
  Eigen::VectorXd boundary_flows;            // per boundary vertex
  std::vector<Eigen::VectorXd> cell_flows;   // per cell, on boundary labels
  std::vector<int> boundary_with_flow;       // boundary indices
  std::vector<int> critical_with_flow;       // junctions i = 1..m+n
  double harmonic_residual = 0;
  double p1 = 0;  // |sum of boundary flows|
  double p2 = 0;  // max |flow_i(r_i) + flow_{i+1}(r_i)|
  double p3 = 0;  // max |boundary flow - eta * inner flow|
  double scale = 0;
};

// h on level-1 vertices; throws InvalidInput when h is not harmonic.
CellFlowReport per_cell_flows(const MsStructure& S, const HarmonicStructure& H, const Eigen::VectorXd& h,
                              double tol = 1e-9);

// Forms from the m = 1 construction: a star inside each class centred at
// phi_n(c_kappa(i)), and the cycle I_1 - I_2 - ... - I_{m+n} - I_1 on classes.
ConductanceForm star_on_classes_form(const MsStructure& S, const Partition& J);
ConductanceForm cycle_quotient_form(const MsStructure& S, const Partition& J);

enum class Verdict {
  NoNontrivialRelationsExistsUnique,
  CriteriaHoldExistsUnique,
  NonexistenceCertified,
  Inconclusive,
};

const char* verdict_name(Verdict v);

struct RelationWitness {
  Partition relation;
  double rho_over = 0;            // upper certificate of rho-bar_J
  double rho_under_relation = 0;  // lower certificate of rho-under_J
  double rho_under_quotient = 0;  // lower certificate of rho-under_{V/J}
  bool quotient_exact = false;    // rho_under_quotient is exact (single-ray quotient)
  int k = 1;
};

struct VerdictReport {
  Verdict verdict = Verdict::Inconclusive;
  std::vector<RelationWitness> witnesses;
  std::vector<std::pair<int, int>> ordered_pairs;  // indices into witnesses
  std::vector<std::string> notes;
};

struct VerdictOptions {
  RhoSearchOptions search;
  std::vector<std::vector<int>> group;  // symmetry group for G-restricted rho
  // extra candidate forms per relation (relation side, quotient side)
  std::function<std::vector<ConductanceForm>(const Partition&)> relation_candidates;
  std::function<std::vector<ConductanceForm>(const Partition&)> quotient_candidates;
};

VerdictReport sabot_verdict(const ReplicationScheme& scheme, const std::vector<Partition>& preserved,
                            const VerdictOptions& opts);
// MS wrapper: G-restricted when the boundary is rotation invariant; adds the
// m = 1 constructed forms and the eigenform-derived forms as candidates.
VerdictReport sabot_verdict(const MsStructure& S, const HarmonicStructure& H, const std::vector<Partition>& preserved,
                            RhoSearchOptions search = {});

}  // namespace fr
