#include "fracrenorm/renormalization.hpp"

#include <cmath>
#include <deque>

namespace fr {

ConductanceForm replicate(const ReplicationScheme& scheme, const ConductanceForm& D) {
  if (D.size() != scheme.boundary_size)
    throw Error(ErrorCode::VertexMismatch, "form has " + std::to_string(D.size()) + " vertices, boundary has " +
                                               std::to_string(scheme.boundary_size));
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(scheme.refined_size, scheme.refined_size);
  const auto& w = D.weights();
  for (const auto& cmap : scheme.copies)
    for (int x = 0; x < D.size(); ++x)
      for (int y = 0; y < D.size(); ++y)
        if (x != y) W(cmap[x], cmap[y]) += w(x, y);
  W.diagonal().setZero();
  return ConductanceForm(W);
}

ConductanceForm replicate(const MsStructure& S, const ConductanceForm& D) { return replicate(S.level1, D); }

ConductanceForm renorm_T(const ReplicationScheme& scheme, const ConductanceForm& D, TraceDiagnostics* diag) {
  return trace(replicate(scheme, D), scheme.boundary_image, diag);
}

ConductanceForm renorm_T(const MsStructure& S, const ConductanceForm& D) { return renorm_T(S.level1, D); }

ConductanceForm average_over(const std::vector<std::vector<int>>& group, const ConductanceForm& D) {
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(D.size(), D.size());
  for (const auto& g : group) acc += D.pullback(g).weights();
  return ConductanceForm(acc / static_cast<double>(group.size()));
}

ConductanceForm symmetrize(const MsStructure& S, const ConductanceForm& D) {
  if (D.size() != static_cast<int>(S.boundary.size())) throw Error(ErrorCode::VertexMismatch, "symmetrize: size");
  return average_over(rotation_group(S), D);
}

Eigen::VectorXd probe_function(int size) {
  Eigen::VectorXd f(size);
  for (int i = 0; i < size; ++i) f(i) = std::sin(1.0 + 1.7 * i) + 0.25 * i;
  return f;
}

namespace {

double sup_change(const ConductanceForm& a, const ConductanceForm& b) {
  double scale = b.max_weight();
  double d = (a.weights() - b.weights()).cwiseAbs().maxCoeff();
  return scale > 0 ? d / scale : d;
}

int detect_period(const std::deque<ConductanceForm>& hist) {
  if (hist.size() < 3) return 0;
  const auto& last = hist.back();
  const int n = static_cast<int>(hist.size());
  for (int p = 1; p < n && p <= 32; ++p)
    if (sup_change(hist[n - 1 - p], last) < 1e-8) return p;
  return 0;
}

}  // namespace

FixedPointResult iterate_fixed_point(const std::function<ConductanceForm(const ConductanceForm&)>& step,
                                     const std::function<ConductanceForm(const ConductanceForm&)>& project,
                                     ConductanceForm init, double tol, int max_iter) {
  if (init.mass() <= 0) throw Error(ErrorCode::DegenerateInput, "initial form is zero");
  ConductanceForm D = init.scaled(1.0 / init.mass());
  if (project) D = project(D);
  D = D.scaled(1.0 / D.mass());
  FixedPointResult res;
  std::deque<ConductanceForm> hist;
  for (int it = 1; it <= max_iter; ++it) {
    ConductanceForm TD = step(D);
    double m = TD.mass();
    if (!(m > 0) || !std::isfinite(m)) throw Error(ErrorCode::DegenerateInput, "renormalized form vanished");
    ConductanceForm Dn = TD.scaled(1.0 / m);
    if (project) Dn = project(Dn);
    Dn = Dn.scaled(1.0 / Dn.mass());
    res.eta = D.mass() / m;
    res.last_change = sup_change(Dn, D);
    res.iterations = it;
    D = std::move(Dn);
    hist.push_back(D);
    if (hist.size() > 64) hist.pop_front();
    if (res.last_change < tol) {
      res.converged = true;
      break;
    }
  }
  res.form = D;
  if (!res.converged) {
    res.diagnostics.iterations = res.iterations;
    res.diagnostics.last_change = res.last_change;
    res.diagnostics.period = detect_period(hist);
    size_t keep = std::min<size_t>(hist.size(), 4);
    res.diagnostics.last_iterates.assign(hist.end() - keep, hist.end());
  }
  return res;
}

double eigen_residual(const ReplicationScheme& scheme, const ConductanceForm& D, double eta) {
  ConductanceForm TD = renorm_T(scheme, D);
  double scale = D.max_weight();
  double d = (eta * TD.weights() - D.weights()).cwiseAbs().maxCoeff();
  return scale > 0 ? d / scale : d;
}

HarmonicStructure solve_eigenform(const MsStructure& S, const SolverOptions& opts) {
  const int nb = static_cast<int>(S.boundary.size());
  bool sym = opts.symmetrize_each_step.value_or(S.rotation_invariant());
  if (sym && !S.rotation_invariant())
    throw Error(ErrorCode::NotInvariant, "symmetrization requested on a non-invariant boundary");
  ConductanceForm init = opts.init.value_or(ConductanceForm::complete(nb));
  if (init.size() != nb) throw Error(ErrorCode::VertexMismatch, "initial form size mismatch");
  std::function<ConductanceForm(const ConductanceForm&)> project;
  if (sym) {
    auto group = rotation_group(S);
    project = [group](const ConductanceForm& D) { return average_over(group, D); };
  }
  auto step = [&S](const ConductanceForm& D) { return renorm_T(S.level1, D); };
  FixedPointResult r = iterate_fixed_point(step, project, init, opts.tol, opts.max_iter);
  if (!r.converged) {
    std::string msg = "eigenform iteration did not converge after " + std::to_string(r.iterations) +
                      " iterations (last change " + std::to_string(r.last_change) + ")";
    if (r.diagnostics.period > 0) msg += ", apparent period " + std::to_string(r.diagnostics.period);
    throw NonConvergence(msg, r.diagnostics);
  }
  HarmonicStructure H;
  H.form = r.form;
  H.iterations = r.iterations;
  ConductanceForm TD = renorm_T(S.level1, H.form);
  H.eta = H.form.mass() / TD.mass();
  Eigen::VectorXd f = probe_function(nb);
  H.eta_rayleigh = energy(H.form, f) / energy(TD, f);
  H.residual = eigen_residual(S.level1, H.form, H.eta);
  return H;
}

ResidualReport verify_harmonic_structure(const MsStructure& S, const ConductanceForm& D, double eta) {
  ResidualReport rep;
  ConductanceForm TD = renorm_T(S.level1, D);
  const double scale = D.max_weight();
  rep.residual = eigen_residual(S.level1, D, eta);
  for (int x = 0; x < D.size(); ++x)
    for (int y = x + 1; y < D.size(); ++y) {
      double d = D.weight(x, y);
      if (d > 1e-14 * scale) rep.max_relative_dev = std::max(rep.max_relative_dev, std::abs(eta * TD.weight(x, y) - d) / d);
      else rep.max_relative_dev = std::max(rep.max_relative_dev, std::abs(eta * TD.weight(x, y)) / scale);
    }
  // level-2 harmonic extension restricted to level 1 against the level-1 one
  auto tower = level_tower(S, 2);
  const auto& g1 = tower[1];
  const auto& g2 = tower[2];
  ConductanceForm D1 = replicate(S.level1, D);
  ReplicationScheme s2{g1.num_vertices, g2.num_vertices, g2.copy_map, g2.inclusion};
  ConductanceForm D2 = replicate(s2, D1);
  const int nb = D.size();
  for (int x = 0; x < nb; ++x) {
    Eigen::VectorXd f = Eigen::VectorXd::Unit(nb, x);
    Eigen::VectorXd h1 = harmonic_extension(D1, g1.boundary_ids, f).values;
    Eigen::VectorXd h2 = harmonic_extension(D2, g2.boundary_ids, f).values;
    for (int v = 0; v < g1.num_vertices; ++v)
      rep.extension_consistency = std::max(rep.extension_consistency, std::abs(h2(g2.inclusion[v]) - h1(v)));
  }
  return rep;
}

ConductanceForm restrict_to_subset(const MsStructure& S, const HarmonicStructure& H, const std::vector<Angle>& W) {
  std::vector<int> idx;
  for (const auto& a : W) {
    int i = S.index_of(a);
    if (i < 0) throw Error(ErrorCode::SubsetInvalid, "angle " + a.to_string() + " not in the boundary");
    if (std::find(idx.begin(), idx.end(), i) != idx.end())
      throw Error(ErrorCode::SubsetInvalid, "angle " + a.to_string() + " repeated");
    idx.push_back(i);
  }
  if (idx.empty()) throw Error(ErrorCode::SubsetInvalid, "empty subset");
  return trace(H.form, idx);
}

}  // namespace fr
