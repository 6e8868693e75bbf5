#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fracrenorm/error.hpp"
#include "fracrenorm/ms_structure.hpp"
#include "fracrenorm/network.hpp"
#include "fracrenorm/scheme.hpp"

namespace fr {

// Sum of relabeled copies of D on the refined vertex set.
ConductanceForm replicate(const ReplicationScheme& scheme, const ConductanceForm& D);
ConductanceForm replicate(const MsStructure& S, const ConductanceForm& D);

// Trace of the replication onto the boundary image.
ConductanceForm renorm_T(const ReplicationScheme& scheme, const ConductanceForm& D,
                         TraceDiagnostics* diag = nullptr);
ConductanceForm renorm_T(const MsStructure& S, const ConductanceForm& D);

// Average of D over a group of boundary permutations.
ConductanceForm average_over(const std::vector<std::vector<int>>& group, const ConductanceForm& D);
// Average over the m+n rotations; throws NotInvariant.
ConductanceForm symmetrize(const MsStructure& S, const ConductanceForm& D);

struct SolverOptions {
  double tol = 1e-12;
  int max_iter = 100000;
  std::optional<bool> symmetrize_each_step;  // default: when the boundary is rotation invariant
  std::optional<ConductanceForm> init;
};

struct HarmonicStructure {
  ConductanceForm form;  // normalized to mass 1
  double eta = 0;
  double eta_rayleigh = 0;
  double residual = 0;
  int iterations = 0;
};

struct NonConvergenceInfo {
  int iterations = 0;
  double last_change = 0;
  int period = 0;  // 0 when no period was detected
  std::vector<ConductanceForm> last_iterates;
};

class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, NonConvergenceInfo info)
      : Error(ErrorCode::NonConvergence, what), info_(std::move(info)) {}
  const NonConvergenceInfo& info() const { return info_; }

 private:
  NonConvergenceInfo info_;
};

// Normalized iteration D <- step(D) / mass(step(D)), optionally followed by a
// projection (e.g. symmetrization), until the relative sup change drops
// below tol.
struct FixedPointResult {
  ConductanceForm form;
  double eta = 0;  // mass(D) / mass(step(D)) at the last step
  int iterations = 0;
  bool converged = false;
  double last_change = 0;
  NonConvergenceInfo diagnostics;
};

FixedPointResult iterate_fixed_point(const std::function<ConductanceForm(const ConductanceForm&)>& step,
                                     const std::function<ConductanceForm(const ConductanceForm&)>& project,
                                     ConductanceForm init, double tol, int max_iter);

HarmonicStructure solve_eigenform(const MsStructure& S, const SolverOptions& opts = {});

// Relative sup-norm distance between eta*T(D) and D.
double eigen_residual(const ReplicationScheme& scheme, const ConductanceForm& D, double eta);

// Deterministic non-constant probe used for Rayleigh ratios.
Eigen::VectorXd probe_function(int size);

struct ResidualReport {
  double residual = 0;             // relative sup-norm
  double max_relative_dev = 0;     // over positive entries of D
  double extension_consistency = 0;
};

ResidualReport verify_harmonic_structure(const MsStructure& S, const ConductanceForm& D, double eta);

// Trace of the eigenform onto a subset of the boundary.
ConductanceForm restrict_to_subset(const MsStructure& S, const HarmonicStructure& H, const std::vector<Angle>& W);

}  // namespace fr
