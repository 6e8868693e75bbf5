#include "fracrenorm/graph_directed.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "fracrenorm/error.hpp"
#include "union_find.hpp"

namespace fr {

const char* corner_name(int c) {
  static const char* names[] = {"p_{k-1}", "q_{k-1}", "p_k", "q_k"};
  return names[c];
}

namespace {

std::string sci(double v) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(3) << v;
  return s.str();
}

int wrap(int k, int N) { return ((k - 1) % N + N) % N + 1; }  // into 1..N
int mod(int a, int N) { return ((a % N) + N) % N; }

}  // namespace

GdCell gd_cell(int n, int m, int l) {
  if (n < 2 || m < 1) throw Error(ErrorCode::InvalidInput, "graph-directed model needs n >= 2, m >= 1");
  const int N = n + m;
  GdCell cell;
  cell.l = wrap(l, N);
  l = cell.l;
  UnionFind uf(4 * N);
  auto node = [](int k, int c) { return 4 * (k - 1) + c; };
  const int a = mod(n * l, N), b = mod(n * (l - 1), N);
  for (int k = 1; k <= N; ++k) {
    int k2 = k % N + 1;
    uf.unite(node(k, QNext), node(k2, QPrev));
    if (mod(k, N) != a && mod(k, N) != b) uf.unite(node(k, PNext), node(k2, PPrev));
    else cell.broken_junctions.push_back(k);
  }
  auto lab = uf.labels();
  cell.num_vertices = *std::max_element(lab.begin(), lab.end()) + 1;
  cell.subcells.resize(N);
  for (int k = 1; k <= N; ++k)
    for (int c = 0; c < 4; ++c) cell.subcells[k - 1][c] = lab[node(k, c)];
  // p_l = Psi_{nl,l}(p_{nl}), q_l = Psi_{nl+1,l}(p_{nl}); likewise at l-1
  cell.corners[PNext] = cell.subcells[wrap(a, N) - 1][PNext];
  cell.corners[QNext] = cell.subcells[wrap(a + 1, N) - 1][PPrev];
  cell.corners[PPrev] = cell.subcells[wrap(b + 1, N) - 1][PPrev];
  cell.corners[QPrev] = cell.subcells[wrap(b, N) - 1][PNext];
  for (int k = n * (l - 1) + 1; k <= n * l; ++k) cell.outer.push_back(wrap(k, N));
  std::sort(cell.outer.begin(), cell.outer.end());
  for (int k = 1; k <= N; ++k)
    if (!std::binary_search(cell.outer.begin(), cell.outer.end(), k)) cell.inner.push_back(k);
  return cell;
}

ReplicationScheme GdStructure::cell_scheme(int l) const {
  const GdCell& c = cells.at(l - 1);
  ReplicationScheme s;
  s.boundary_size = 4;
  s.refined_size = c.num_vertices;
  for (const auto& sub : c.subcells) s.copies.emplace_back(sub.begin(), sub.end());
  s.boundary_image.assign(c.corners.begin(), c.corners.end());
  return s;
}

GdStructure build_gd_structure(int n, int m) {
  GdStructure G;
  G.n = n;
  G.m = m;
  const int N = n + m;
  std::vector<int> offset{0};
  for (int l = 1; l <= N; ++l) {
    G.cells.push_back(gd_cell(n, m, l));
    offset.push_back(offset.back() + G.cells.back().num_vertices);
  }
  UnionFind uf(offset.back());
  for (int l = 1; l <= N; ++l) {
    const GdCell& c = G.cells[l - 1];
    const GdCell& next = G.cells[l % N];
    uf.unite(offset[l - 1] + c.corners[PNext], offset[l % N] + next.corners[PPrev]);
    uf.unite(offset[l - 1] + c.corners[QNext], offset[l % N] + next.corners[QPrev]);
  }
  auto lab = uf.labels();
  G.num_level2 = *std::max_element(lab.begin(), lab.end()) + 1;
  for (int l = 1; l <= N; ++l) {
    std::vector<int> g(G.cells[l - 1].num_vertices);
    for (size_t v = 0; v < g.size(); ++v) g[v] = lab[offset[l - 1] + v];
    G.local_to_global.push_back(std::move(g));
  }
  // p_l is the "next" corner of cell l, p_0 = p_{m+n}
  G.p_ids.resize(N);
  G.q_ids.resize(N);
  for (int l = 1; l <= N; ++l) {
    const GdCell& c = G.cells[l - 1];
    G.p_ids[l % N] = G.local_to_global[l - 1][c.corners[PNext]];
    G.q_ids[l % N] = G.local_to_global[l - 1][c.corners[QNext]];
  }
  for (int l = 1; l <= N; ++l)
    for (int k = 1; k <= N; ++k)
      for (int c = 0; c < 4; ++c)
        G.corner_map.push_back({k, l, c, G.local_to_global[l - 1][G.cells[l - 1].subcells[k - 1][c]]});
  return G;
}

const std::vector<int>& gd_reflection() {
  static const std::vector<int> r{PNext, QNext, PPrev, QPrev};
  return r;
}

ConductanceForm gd_renorm_T(const GdStructure& G, const ConductanceForm& D) { return renorm_T(G.cell_scheme(1), D); }

const char* gd_existence_name(GdExistence e) {
  switch (e) {
    case GdExistence::Exists: return "exists";
    case GdExistence::Nonexistent: return "nonexistent";
    case GdExistence::CriticalInconclusive: return "critical_inconclusive";
  }
  return "critical_inconclusive";
}

GdExistence gd_expected_existence(int n, int m) {
  // 1/m + 1/n vs 1/2  <=>  2(m+n) vs mn
  long s = 2L * (m + n) - static_cast<long>(m) * n;
  if (s > 0) return GdExistence::Exists;
  if (s < 0) return GdExistence::Nonexistent;
  return GdExistence::CriticalInconclusive;
}

GdHarmonicStructure gd_solve(int n, int m, const GdSolveOptions& opts) {
  GdStructure G = build_gd_structure(n, m);
  ReplicationScheme sc = G.cell_scheme(1);
  GdHarmonicStructure H;
  H.expected = gd_expected_existence(n, m);
  ConductanceForm init = opts.init.value_or(ConductanceForm::complete(4));
  std::function<ConductanceForm(const ConductanceForm&)> project;
  if (opts.reflect_each_step) {
    std::vector<std::vector<int>> group{{0, 1, 2, 3}, gd_reflection()};
    project = [group](const ConductanceForm& D) { return average_over(group, D); };
  }
  auto step = [&sc](const ConductanceForm& D) { return renorm_T(sc, D); };
  FixedPointResult r = iterate_fixed_point(step, project, init, opts.tol, opts.max_iter);
  H.form = r.form;
  H.iterations = r.iterations;
  H.converged = r.converged;
  ConductanceForm TD = renorm_T(sc, H.form);
  H.eta = H.form.mass() / TD.mass();
  H.residual = eigen_residual(sc, H.form, H.eta);
  H.limit_support = Partition::from_labels(H.form.support_components(1e-9 * H.form.max_weight()));
  H.degenerate = H.limit_support.num_blocks() > 1;
  const bool found = H.converged && !H.degenerate;
  std::string support = std::to_string(H.limit_support.num_blocks()) + " support component(s)";
  switch (H.expected) {
    case GdExistence::Exists:
      if (!found) {
        std::string msg = "graph-directed iteration failed for (n=" + std::to_string(n) + ", m=" + std::to_string(m) +
                          "): " + (H.converged ? "degenerate limit, " + support : "no convergence");
        throw NonConvergence(msg, r.diagnostics);
      }
      H.verdict = GdExistence::Exists;
      H.diagnosis = "converged to a non-degenerate form";
      break;
    case GdExistence::Nonexistent:
      H.verdict = found ? GdExistence::Exists : GdExistence::Nonexistent;
      H.diagnosis = found ? "non-degenerate fixed point found although 1/m+1/n < 1/2"
                          : std::string(H.converged ? "iteration settles on a degenerate form, " : "no convergence, ") +
                                support;
      break;
    case GdExistence::CriticalInconclusive:
      H.verdict = GdExistence::CriticalInconclusive;
      H.diagnosis = std::string("critical case 1/m+1/n = 1/2; ") + (H.converged ? "settled, " : "not settled, ") +
                    support + ", last change " + sci(r.last_change);
      break;
  }
  return H;
}

std::vector<ConductanceForm> gd_unreduced_step(const GdStructure& G, const std::vector<ConductanceForm>& forms) {
  const int N = G.cells_count();
  if (static_cast<int>(forms.size()) != N) throw Error(ErrorCode::VertexMismatch, "one form per cell expected");
  std::vector<ConductanceForm> out;
  for (int k = 1; k <= N; ++k) {
    ReplicationScheme sc = G.cell_scheme(k);
    ConductanceForm W(sc.refined_size);
    for (int l = 1; l <= N; ++l) {
      const auto& cmap = sc.copies[l - 1];
      for (int x = 0; x < 4; ++x)
        for (int y = x + 1; y < 4; ++y) W.add_weight(cmap[x], cmap[y], forms[l - 1].weight(x, y));
    }
    out.push_back(trace(W, sc.boundary_image));
  }
  return out;
}

namespace {

Eigen::VectorXd pack(const std::vector<ConductanceForm>& forms) {
  Eigen::VectorXd v(6 * forms.size());
  for (size_t i = 0; i < forms.size(); ++i) v.segment(6 * i, 6) = forms[i].edge_vector();
  return v;
}

std::vector<ConductanceForm> unpack(const Eigen::VectorXd& v) {
  std::vector<ConductanceForm> out;
  for (Eigen::Index i = 0; i < v.size() / 6; ++i) out.push_back(ConductanceForm::from_edge_vector(4, v.segment(6 * i, 6)));
  return out;
}

Eigen::VectorXd normalized_step(const GdStructure& G, const Eigen::VectorXd& v) {
  Eigen::VectorXd w = pack(gd_unreduced_step(G, unpack(v.cwiseMax(0.0))));
  return w / w.sum();
}

}  // namespace

GdUnreducedResult gd_solve_unreduced(const GdStructure& G, std::vector<ConductanceForm> init, int max_steps,
                                     double tol) {
  Eigen::VectorXd v = pack(init);
  v /= v.sum();
  const Eigen::Index d = v.size();
  GdUnreducedResult res;
  for (int s = 0; s < max_steps; ++s) {
    Eigen::VectorXd F = normalized_step(G, v) - v;
    if (F.cwiseAbs().maxCoeff() < tol * v.maxCoeff()) {
      res.converged = true;
      break;
    }
    Eigen::MatrixXd A(d + 1, d);
    for (Eigen::Index j = 0; j < d; ++j) {
      double h = 1e-6 * std::max(std::abs(v(j)), 1e-4);
      Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
      e(j) = h;
      A.col(j).head(d) = (normalized_step(G, v + e) - normalized_step(G, v - e)) / (2 * h);
      A(j, j) -= 1.0;
    }
    A.row(d).setOnes();
    Eigen::VectorXd rhs(d + 1);
    rhs.head(d) = -F;
    rhs(d) = 1.0 - v.sum();
    v += A.completeOrthogonalDecomposition().solve(rhs);
    res.steps = s + 1;
  }
  res.forms = unpack(v);
  Eigen::VectorXd w = pack(gd_unreduced_step(G, res.forms));
  res.eta = v.sum() / w.sum();
  res.residual = (res.eta * w - v).cwiseAbs().maxCoeff() / v.maxCoeff();
  if (!res.converged && res.residual < 10 * tol) res.converged = true;
  for (const auto& f : res.forms)
    res.spread = std::max(res.spread, (f.weights() - res.forms[0].weights()).cwiseAbs().maxCoeff());
  return res;
}

GdRhoTable gd_relation_rhos(int n, int m, const RhoSearchOptions& opts) {
  GdStructure G = build_gd_structure(n, m);
  ReplicationScheme sc = G.cell_scheme(1);
  GdRhoTable t;
  t.J1 = Partition::from_blocks(4, {{PPrev, QPrev}, {PNext, QNext}});
  t.J2 = Partition::from_blocks(4, {{PPrev, PNext}, {QPrev, QNext}});
  for (const auto& J : enumerate_preserved(sc, {}, 4, 1))
    if (!J.is_trivial()) t.preserved.push_back(J);
  t.J1_preserved = is_preserved(sc, t.J1);
  t.J2_preserved = is_preserved(sc, t.J2);
  t.J1_relation = rho_search(sc, t.J1, RhoSide::Relation, opts);
  t.J1_quotient = rho_search(sc, t.J1, RhoSide::Quotient, opts);
  t.J2_relation = rho_search(sc, t.J2, RhoSide::Relation, opts);
  t.J2_quotient = rho_search(sc, t.J2, RhoSide::Quotient, opts);
  return t;
}

}  // namespace fr
