#include "fracrenorm/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fracrenorm/error.hpp"
#include "union_find.hpp"

namespace fr {

ConductanceForm::ConductanceForm(int size) : w_(Eigen::MatrixXd::Zero(size, size)) {}

ConductanceForm::ConductanceForm(Eigen::MatrixXd weights) : w_(std::move(weights)) {
  if (w_.rows() != w_.cols()) throw Error(ErrorCode::InvalidInput, "weight matrix not square");
  w_ = 0.5 * (w_ + w_.transpose()).eval();
  w_.diagonal().setZero();
  if ((w_.array() < 0).any()) throw Error(ErrorCode::InvalidInput, "negative conductance");
}

ConductanceForm ConductanceForm::complete(int size, double w) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(size, size, w);
  m.diagonal().setZero();
  return ConductanceForm(m);
}

void ConductanceForm::set_weight(int x, int y, double w) {
  if (x == y) return;
  if (w < 0) throw Error(ErrorCode::InvalidInput, "negative conductance");
  w_(x, y) = w;
  w_(y, x) = w;
}

void ConductanceForm::add_weight(int x, int y, double w) {
  if (x == y) return;
  w_(x, y) += w;
  w_(y, x) += w;
}

Eigen::MatrixXd ConductanceForm::laplacian() const {
  Eigen::MatrixXd L = -w_;
  L.diagonal() = w_.rowwise().sum();
  return L;
}

double ConductanceForm::mass() const { return 0.5 * w_.sum(); }

double ConductanceForm::max_weight() const { return size() == 0 ? 0.0 : w_.maxCoeff(); }

ConductanceForm ConductanceForm::scaled(double c) const {
  ConductanceForm out(*this);
  out.w_ *= c;
  return out;
}

ConductanceForm ConductanceForm::pullback(const std::vector<int>& perm) const {
  const int n = static_cast<int>(perm.size());
  ConductanceForm out(n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (x != y) out.w_(x, y) = w_(perm[x], perm[y]);
  return out;
}

std::vector<int> ConductanceForm::support_components(double threshold) const {
  const int n = size();
  UnionFind uf(n);
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y)
      if (w_(x, y) > threshold) uf.unite(x, y);
  return uf.labels();
}

bool ConductanceForm::is_connected(double threshold) const {
  auto lab = support_components(threshold);
  return std::all_of(lab.begin(), lab.end(), [](int l) { return l == 0; });
}

Eigen::VectorXd ConductanceForm::edge_vector() const {
  const int n = size();
  Eigen::VectorXd v(n * (n - 1) / 2);
  int k = 0;
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) v(k++) = w_(x, y);
  return v;
}

ConductanceForm ConductanceForm::from_edge_vector(int size, const Eigen::VectorXd& v) {
  ConductanceForm out(size);
  int k = 0;
  for (int x = 0; x < size; ++x)
    for (int y = x + 1; y < size; ++y) {
      out.w_(x, y) = out.w_(y, x) = v(k++);
    }
  return out;
}

double energy(const ConductanceForm& D, const Eigen::VectorXd& f) { return energy(D, f, f); }

double energy(const ConductanceForm& D, const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
  if (f.size() != D.size() || g.size() != D.size())
    throw Error(ErrorCode::MissingValue, "function not defined on all vertices");
  double s = 0;
  for (int x = 0; x < D.size(); ++x)
    for (int y = x + 1; y < D.size(); ++y) s += D.weight(x, y) * (f(x) - f(y)) * (g(x) - g(y));
  return s;
}

namespace {

struct Split {
  std::vector<int> interior;
  std::vector<std::vector<int>> components;  // indices into D, interior only
};

Split split_interior(const ConductanceForm& D, const std::vector<int>& boundary) {
  const int n = D.size();
  std::vector<char> isb(n, 0);
  for (int b : boundary) {
    if (b < 0 || b >= n) throw Error(ErrorCode::VertexMismatch, "boundary vertex out of range");
    if (isb[b]) throw Error(ErrorCode::InvalidInput, "repeated boundary vertex");
    isb[b] = 1;
  }
  Split s;
  for (int x = 0; x < n; ++x)
    if (!isb[x]) s.interior.push_back(x);
  const int ni = static_cast<int>(s.interior.size());
  UnionFind uf(ni);
  for (int a = 0; a < ni; ++a)
    for (int b = a + 1; b < ni; ++b)
      if (D.weight(s.interior[a], s.interior[b]) > 0) uf.unite(a, b);
  auto lab = uf.labels();
  int nc = ni == 0 ? 0 : *std::max_element(lab.begin(), lab.end()) + 1;
  s.components.resize(nc);
  for (int a = 0; a < ni; ++a) s.components[lab[a]].push_back(s.interior[a]);
  return s;
}

Eigen::MatrixXd sub(const Eigen::MatrixXd& A, const std::vector<int>& r, const std::vector<int>& c) {
  Eigen::MatrixXd out(r.size(), c.size());
  for (size_t i = 0; i < r.size(); ++i)
    for (size_t j = 0; j < c.size(); ++j) out(i, j) = A(r[i], c[j]);
  return out;
}

// Solves A X = B for symmetric positive semidefinite A; least squares on the
// null directions.
Eigen::MatrixXd psd_solve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() == Eigen::Success) {
    Eigen::MatrixXd X = llt.solve(B);
    if (X.allFinite()) return X;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  const auto& ev = es.eigenvalues();
  double cut = 1e-12 * std::max(ev.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  Eigen::VectorXd inv = ev.unaryExpr([cut](double l) { return l > cut ? 1.0 / l : 0.0; });
  return es.eigenvectors() * inv.asDiagonal() * (es.eigenvectors().transpose() * B);
}

bool attached(const Eigen::MatrixXd& LCB) { return (LCB.array() != 0.0).any(); }

}  // namespace

ConductanceForm trace(const ConductanceForm& D, const std::vector<int>& boundary, TraceDiagnostics* diag) {
  if (boundary.empty()) throw Error(ErrorCode::InvalidInput, "trace onto empty set");
  Split s = split_interior(D, boundary);
  const Eigen::MatrixXd L = D.laplacian();
  Eigen::MatrixXd S = sub(L, boundary, boundary);
  for (const auto& comp : s.components) {
    Eigen::MatrixXd LCB = sub(L, comp, boundary);
    if (!attached(LCB)) {
      if (diag) diag->floating.insert(diag->floating.end(), comp.begin(), comp.end());
      continue;
    }
    Eigen::MatrixXd X = psd_solve(sub(L, comp, comp), LCB);
    S.noalias() -= LCB.transpose() * X;
  }
  const int nb = static_cast<int>(boundary.size());
  Eigen::MatrixXd W = -0.5 * (S + S.transpose());
  W.diagonal().setZero();
  const double scale = D.max_weight();
  for (int x = 0; x < nb; ++x)
    for (int y = 0; y < nb; ++y) {
      if (W(x, y) >= 0) continue;
      double rel = scale > 0 ? W(x, y) / scale : W(x, y);
      if (diag) {
        diag->clamped += x < y;
        diag->worst_negative = std::min(diag->worst_negative, rel);
        if (rel < -1e-12 && x < y)
          diag->warnings.push_back("traced weight " + std::to_string(W(x, y)) + " below tolerance, clamped");
      }
      W(x, y) = 0;
    }
  return ConductanceForm(W);
}

HarmonicExtension harmonic_extension(const ConductanceForm& D, const std::vector<int>& boundary,
                                     const Eigen::VectorXd& f) {
  if (f.size() != static_cast<Eigen::Index>(boundary.size()))
    throw Error(ErrorCode::MissingValue, "boundary data size mismatch");
  Split s = split_interior(D, boundary);
  const Eigen::MatrixXd L = D.laplacian();
  HarmonicExtension out;
  out.values = Eigen::VectorXd::Zero(D.size());
  for (size_t i = 0; i < boundary.size(); ++i) out.values(boundary[i]) = f(i);
  for (const auto& comp : s.components) {
    Eigen::MatrixXd LCB = sub(L, comp, boundary);
    if (!attached(LCB)) {
      out.floating.insert(out.floating.end(), comp.begin(), comp.end());
      continue;
    }
    Eigen::VectorXd h = -psd_solve(sub(L, comp, comp), LCB * f);
    for (size_t i = 0; i < comp.size(); ++i) out.values(comp[i]) = h(i);
  }
  std::sort(out.floating.begin(), out.floating.end());
  return out;
}

double effective_resistance(const ConductanceForm& D, int p, int q) {
  if (p == q) return 0.0;
  auto lab = D.support_components();
  if (lab.at(p) != lab.at(q)) throw Error(ErrorCode::Disconnected, "vertices in different components");
  ConductanceForm t = trace(D, {p, q});
  return 1.0 / t.weight(0, 1);
}

Eigen::MatrixXd resistance_matrix(const ConductanceForm& D) {
  const int n = D.size();
  Eigen::MatrixXd R = Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::infinity());
  auto lab = D.support_components();
  int nc = n == 0 ? 0 : *std::max_element(lab.begin(), lab.end()) + 1;
  const Eigen::MatrixXd L = D.laplacian();
  for (int c = 0; c < nc; ++c) {
    std::vector<int> idx;
    for (int x = 0; x < n; ++x)
      if (lab[x] == c) idx.push_back(x);
    const int k = static_cast<int>(idx.size());
    Eigen::MatrixXd Lc = sub(L, idx, idx);
    // (L + J/k)^{-1} - J/k is the pseudo-inverse on a connected component
    Eigen::MatrixXd J = Eigen::MatrixXd::Constant(k, k, 1.0 / k);
    Eigen::MatrixXd G = (Lc + J).ldlt().solve(Eigen::MatrixXd::Identity(k, k)) - J;
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) R(idx[a], idx[b]) = a == b ? 0.0 : G(a, a) + G(b, b) - 2 * G(a, b);
  }
  return R;
}

Eigen::VectorXd flows(const ConductanceForm& D, const Eigen::VectorXd& h) {
  if (h.size() != D.size()) throw Error(ErrorCode::MissingValue, "function not defined on all vertices");
  return D.laplacian() * h;
}

ConductanceForm eliminate_vertex(const ConductanceForm& D, int v) {
  const int n = D.size();
  std::vector<int> keep;
  for (int x = 0; x < n; ++x)
    if (x != v) keep.push_back(x);
  double deg = D.weights().row(v).sum();
  ConductanceForm out(n - 1);
  for (int a = 0; a < n - 1; ++a)
    for (int b = a + 1; b < n - 1; ++b) {
      int x = keep[a], y = keep[b];
      double w = D.weight(x, y);
      if (deg > 0) w += D.weight(x, v) * D.weight(y, v) / deg;
      out.set_weight(a, b, w);
    }
  return out;
}

ConductanceForm collapse(const ConductanceForm& D, const std::vector<int>& labels, int num_classes) {
  ConductanceForm out(num_classes);
  for (int x = 0; x < D.size(); ++x)
    for (int y = x + 1; y < D.size(); ++y)
      if (labels[x] != labels[y] && D.weight(x, y) != 0) out.add_weight(labels[x], labels[y], D.weight(x, y));
  return out;
}

}  // namespace fr
