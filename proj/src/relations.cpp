#include "fracrenorm/relations.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <thread>

#include "fracrenorm/error.hpp"
#include "union_find.hpp"

namespace fr {

Partition refine_closure(const std::vector<std::vector<int>>& copies, int refined_size, const Partition& J) {
  UnionFind uf(refined_size);
  auto blocks = J.blocks();
  for (const auto& c : copies) {
    if (static_cast<int>(c.size()) != J.size()) throw Error(ErrorCode::VertexMismatch, "relation ground set mismatch");
    for (const auto& b : blocks)
      for (size_t t = 1; t < b.size(); ++t) uf.unite(c[b[0]], c[b[t]]);
  }
  return Partition::from_labels(uf.labels());
}

Partition j1_closure(const ReplicationScheme& scheme, const Partition& J) {
  return refine_closure(scheme.copies, scheme.refined_size, J);
}

Partition j1_closure(const MsStructure& S, const Partition& J) { return j1_closure(S.level1, J); }

Partition pull_back(const Partition& P, const std::vector<int>& map) {
  std::vector<int> lab(map.size());
  for (size_t x = 0; x < map.size(); ++x) lab[x] = P.block_of(map[x]);
  return Partition::from_labels(lab);
}

bool is_preserved(const ReplicationScheme& scheme, const Partition& J) {
  if (J.size() != scheme.boundary_size) throw Error(ErrorCode::VertexMismatch, "relation ground set mismatch");
  return pull_back(j1_closure(scheme, J), scheme.boundary_image) == J;
}

bool is_preserved(const MsStructure& S, const Partition& J, bool require_G) {
  if (require_G) {
    if (!S.rotation_invariant())
      throw Error(ErrorCode::NotInvariant, "G-relations need a rotation-invariant boundary");
    for (const auto& g : rotation_group(S))
      if (!J.invariant_under(g)) return false;
  }
  return is_preserved(S.level1, J);
}

int worker_count(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  if (const char* env = std::getenv("FRACTAL_RENORM_THREADS")) {
    int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return n;
}

namespace {

// Fast preserved check on a restricted growth string.
class PreservedChecker {
 public:
  explicit PreservedChecker(const ReplicationScheme& s) : s_(s), uf_(s.refined_size) {}

  bool operator()(const std::vector<int>& rgs) {
    uf_ = UnionFind(s_.refined_size);
    const int nb = s_.boundary_size;
    first_.assign(nb, -1);
    for (int x = 0; x < nb; ++x)
      if (first_[rgs[x]] < 0) first_[rgs[x]] = x;
    for (const auto& c : s_.copies)
      for (int x = 0; x < nb; ++x)
        if (first_[rgs[x]] != x) uf_.unite(c[first_[rgs[x]]], c[x]);
    // closure restricted to the boundary image must equal the relation
    for (int x = 0; x < nb; ++x)
      for (int y = x + 1; y < nb; ++y) {
        bool same = uf_.find(s_.boundary_image[x]) == uf_.find(s_.boundary_image[y]);
        if (same != (rgs[x] == rgs[y])) return false;
      }
    return true;
  }

 private:
  const ReplicationScheme& s_;
  UnionFind uf_;
  std::vector<int> first_;
};

bool rgs_invariant(const std::vector<int>& rgs, const std::vector<std::vector<int>>& group) {
  for (const auto& g : group) {
    for (size_t x = 0; x < rgs.size(); ++x)
      for (size_t y = x + 1; y < rgs.size(); ++y)
        if ((rgs[x] == rgs[y]) != (rgs[g[x]] == rgs[g[y]])) return false;
  }
  return true;
}

void prefixes(int len, std::vector<int>& cur, int maxv, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == len) {
    out.push_back(cur);
    return;
  }
  for (int v = 0; v <= maxv + 1; ++v) {
    cur.push_back(v);
    prefixes(len, cur, std::max(maxv, v), out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<Partition> enumerate_preserved(const ReplicationScheme& scheme,
                                           const std::vector<std::vector<int>>& group, int cap, int threads) {
  const int n = scheme.boundary_size;
  if (n > cap)
    throw Error(ErrorCode::CapExceeded,
                "boundary has " + std::to_string(n) + " points, enumeration cap is " + std::to_string(cap));
  std::vector<std::vector<int>> pre;
  std::vector<int> cur;
  prefixes(std::min(n, 4), cur, -1, pre);
  const int workers = std::max(1, std::min<int>(worker_count(threads), static_cast<int>(pre.size())));
  std::vector<std::vector<std::vector<int>>> found(workers);
  auto work = [&](int w) {
    PreservedChecker check(scheme);
    for (size_t p = w; p < pre.size(); p += workers) {
      for_each_rgs_with_prefix(n, pre[p], [&](const std::vector<int>& rgs) {
        if (rgs_invariant(rgs, group) && check(rgs)) found[w].push_back(rgs);
        return true;
      });
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  std::vector<std::vector<int>> all;
  for (auto& f : found) all.insert(all.end(), f.begin(), f.end());
  std::sort(all.begin(), all.end());
  std::vector<Partition> out;
  for (const auto& r : all) out.push_back(Partition::from_labels(r));
  return out;
}

std::vector<Partition> enumerate_preserved(const MsStructure& S, bool require_G, int cap, int threads) {
  std::vector<std::vector<int>> group;
  if (require_G) {
    if (!S.rotation_invariant())
      throw Error(ErrorCode::NotInvariant, "G-relations need a rotation-invariant boundary");
    group = rotation_group(S);
  }
  return enumerate_preserved(S.level1, group, cap, threads);
}

std::pair<Partition, Partition> build_J_plus_minus(const MsStructure& S) {
  std::vector<int> kap;
  try {
    kap = kappa(S.ctx);
  } catch (const Error& e) {
    throw Error(ErrorCode::KappaUndefined, std::string("kappa undefined: ") + e.what());
  }
  const auto& ctx = S.ctx;
  const int N = ctx.cells();
  const int nb = static_cast<int>(S.boundary.size());
  auto build = [&](int shift) {
    UnionFind uf(nb);
    for (int i = 1; i <= N; ++i) {
      Angle a = phi_n(critical_angle(ctx, i - shift), ctx.n());
      Angle b = phi_n(phi_n(critical_angle(ctx, kap[i - 1]), ctx.n()), ctx.n());
      std::set<std::pair<Int, Int>> seen;
      while (seen.insert({a.residue, b.residue}).second) {
        int ia = S.index_of(a), ib = S.index_of(b);
        if (ia < 0 || ib < 0) throw Error(ErrorCode::InvalidMs, "edge image leaves the boundary");
        uf.unite(ia, ib);
        a = phi_n(a, ctx.n());
        b = phi_n(b, ctx.n());
      }
    }
    return Partition::from_labels(uf.labels());
  };
  return {build(0), build(1)};
}

bool in_M_J(const ConductanceForm& D, const Partition& J, double rel_tol) {
  if (D.size() != J.size()) return false;
  double thr = rel_tol * D.max_weight();
  for (int x = 0; x < D.size(); ++x)
    for (int y = x + 1; y < D.size(); ++y)
      if (!J.same_block(x, y) && D.weight(x, y) > thr) return false;
  return Partition::from_labels(D.support_components(thr)) == J;
}

namespace {

ConductanceForm t_relation_unchecked(const ReplicationScheme& scheme, const ConductanceForm& D) {
  return renorm_T(scheme, D);
}

}  // namespace

ConductanceForm t_relation(const ReplicationScheme& scheme, const Partition& J, const ConductanceForm& D) {
  if (D.mass() == 0) return ConductanceForm(D.size());
  if (!in_M_J(D, J)) throw Error(ErrorCode::NotInMJ, "form support components differ from the relation blocks");
  return t_relation_unchecked(scheme, D);
}

ConductanceForm t_relation(const MsStructure& S, const Partition& J, const ConductanceForm& D) {
  return t_relation(S.level1, J, D);
}

ConductanceForm t_quotient(const ReplicationScheme& scheme, const Partition& J, const ConductanceForm& Dq) {
  const int nb = J.num_blocks();
  if (Dq.size() != nb) throw Error(ErrorCode::VertexMismatch, "quotient form must live on the relation blocks");
  if (nb < 2 || !Dq.is_connected()) throw Error(ErrorCode::DegenerateInput, "degenerate quotient form");
  auto blocks = J.blocks();
  ConductanceForm lift(J.size());
  for (int a = 0; a < nb; ++a)
    for (int b = a + 1; b < nb; ++b) lift.set_weight(blocks[a][0], blocks[b][0], Dq.weight(a, b));
  ConductanceForm W1 = replicate(scheme, lift);
  Partition J1 = j1_closure(scheme, J);
  ConductanceForm Wc = collapse(W1, J1.labels(), J1.num_blocks());
  std::vector<int> bidx;
  for (int a = 0; a < nb; ++a) {
    int c = J1.block_of(scheme.boundary_image[blocks[a][0]]);
    if (std::find(bidx.begin(), bidx.end(), c) != bidx.end())
      throw Error(ErrorCode::InvalidInput, "relation is not preserved");
    bidx.push_back(c);
  }
  return trace(Wc, bidx);
}

ConductanceForm t_quotient(const MsStructure& S, const Partition& J, const ConductanceForm& Dq) {
  return t_quotient(S.level1, J, Dq);
}

ConductanceForm quotient_form(const ConductanceForm& D, const Partition& J) {
  return collapse(D, J.labels(), J.num_blocks());
}

RatioBounds stationary_ratios(const ConductanceForm& A, const ConductanceForm& B, const Partition& modulo) {
  const int n = A.size();
  if (B.size() != n || modulo.size() != n) throw Error(ErrorCode::VertexMismatch, "stationary_ratios: sizes differ");
  const int nb = modulo.num_blocks();
  const int dim = n - nb;
  if (dim <= 0) throw Error(ErrorCode::DegenerateInput, "complement of the kernel is trivial");
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, nb);
  for (int x = 0; x < n; ++x) K(x, modulo.block_of(x)) = 1.0;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(K);
  Eigen::MatrixXd Qfull = qr.householderQ();
  Eigen::MatrixXd Q = Qfull.rightCols(dim);
  Eigen::MatrixXd a = Q.transpose() * A.laplacian() * Q;
  Eigen::MatrixXd b = Q.transpose() * B.laplacian() * Q;
  a = 0.5 * (a + a.transpose()).eval();
  b = 0.5 * (b + b.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> bs(b, Eigen::EigenvaluesOnly);
  double bmax = bs.eigenvalues().cwiseAbs().maxCoeff();
  if (!(bs.eigenvalues().minCoeff() > 1e-13 * bmax))
    throw Error(ErrorCode::DegenerateInput, "reference form is degenerate on the complement");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(a, b, Eigen::EigenvaluesOnly);
  RatioBounds r;
  r.values = ges.eigenvalues();
  r.min = r.values.minCoeff();
  r.max = r.values.maxCoeff();
  return r;
}

ConductanceForm d_sub_j(const ConductanceForm& D, const Partition& J) {
  if (J.num_blocks() <= 1) throw Error(ErrorCode::InvalidInput, "d_sub_j needs a nontrivial relation");
  if (J.num_blocks() == J.size()) throw Error(ErrorCode::InvalidInput, "singleton relation gives the zero form");
  ConductanceForm out(D.size());
  for (const auto& b : J.blocks()) {
    if (b.size() < 2) continue;
    ConductanceForm t = trace(D, b);
    for (size_t i = 0; i < b.size(); ++i)
      for (size_t j = i + 1; j < b.size(); ++j) out.add_weight(b[i], b[j], t.weight(i, j));
  }
  return out;
}

RatioBounds relation_ratios(const ReplicationScheme& scheme, const Partition& J, const ConductanceForm& D, int k) {
  ConductanceForm A = D;
  for (int i = 0; i < k; ++i) A = t_relation_unchecked(scheme, A);
  return stationary_ratios(A, D, J);
}

RatioBounds quotient_ratios(const ReplicationScheme& scheme, const Partition& J, const ConductanceForm& Dq, int k) {
  ConductanceForm A = Dq;
  for (int i = 0; i < k; ++i) A = t_quotient(scheme, J, A);
  return stationary_ratios(A, Dq, Partition::full(Dq.size()));
}

namespace {

struct PairOrbits {
  int size = 0;                              // vertex count of the parameterized forms
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> orbit_of;                 // per pair
  int num_orbits = 0;
};

PairOrbits pair_orbits(int size, const std::vector<std::pair<int, int>>& pairs,
                       const std::vector<std::vector<int>>& perms) {
  PairOrbits po;
  po.size = size;
  po.pairs = pairs;
  std::map<std::pair<int, int>, int> index;
  for (size_t i = 0; i < pairs.size(); ++i) index[pairs[i]] = static_cast<int>(i);
  UnionFind uf(static_cast<int>(pairs.size()));
  for (const auto& g : perms)
    for (size_t i = 0; i < pairs.size(); ++i) {
      int a = g[pairs[i].first], b = g[pairs[i].second];
      auto it = index.find({std::min(a, b), std::max(a, b)});
      if (it != index.end()) uf.unite(static_cast<int>(i), it->second);
    }
  po.orbit_of = uf.labels();
  po.num_orbits = pairs.empty() ? 0 : *std::max_element(po.orbit_of.begin(), po.orbit_of.end()) + 1;
  return po;
}

ConductanceForm form_from_params(const PairOrbits& po, const Eigen::VectorXd& p) {
  ConductanceForm D(po.size);
  for (size_t i = 0; i < po.pairs.size(); ++i)
    D.set_weight(po.pairs[i].first, po.pairs[i].second, std::exp(p(po.orbit_of[i])));
  return D;
}

Eigen::VectorXd params_from_form(const PairOrbits& po, const ConductanceForm& D, double bound) {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(po.num_orbits);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(po.num_orbits);
  double top = std::max(D.max_weight(), std::numeric_limits<double>::min());
  for (size_t i = 0; i < po.pairs.size(); ++i) {
    double w = D.weight(po.pairs[i].first, po.pairs[i].second) / top;
    s(po.orbit_of[i]) += std::max(std::log(std::max(w, 1e-300)), -bound);
    c(po.orbit_of[i]) += 1;
  }
  return s.cwiseQuotient(c);
}

// Coordinate descent minimizing f over a box.
Eigen::VectorXd coordinate_descent(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd p,
                                   double& value, const RhoSearchOptions& opts) {
  value = f(p);
  double step = 1.0;
  for (int sweep = 0; sweep < opts.max_sweeps && step >= opts.min_step; ++sweep) {
    bool improved = false;
    for (int i = 0; i < p.size(); ++i) {
      for (double s : {step, -step}) {
        Eigen::VectorXd q = p;
        q(i) = std::clamp(q(i) + s, -opts.log_bound, opts.log_bound);
        if (q(i) == p(i)) continue;
        double v = f(q);
        if (v < value - 1e-15 * std::abs(value)) {
          p = q;
          value = v;
          improved = true;
          break;
        }
      }
    }
    step = improved ? std::min(2 * step, 8.0) : step / 2;
  }
  return p;
}

}  // namespace

RhoReport rho_search(const ReplicationScheme& scheme, const Partition& J, RhoSide side, const RhoSearchOptions& opts) {
  RhoReport rep;
  rep.relation = J;
  rep.side = side;
  rep.k = opts.k;
  std::vector<std::vector<int>> perms;
  for (const auto& g : opts.group)
    if (J.invariant_under(g)) perms.push_back(g);
  std::vector<std::pair<int, int>> pairs;
  int size;
  if (side == RhoSide::Relation) {
    size = J.size();
    for (int x = 0; x < size; ++x)
      for (int y = x + 1; y < size; ++y)
        if (J.same_block(x, y)) pairs.emplace_back(x, y);
  } else {
    size = J.num_blocks();
    for (int a = 0; a < size; ++a)
      for (int b = a + 1; b < size; ++b) pairs.emplace_back(a, b);
    auto blocks = J.blocks();
    for (auto& g : perms) {
      std::vector<int> bp(size);
      for (int a = 0; a < size; ++a) bp[a] = J.block_of(g[blocks[a][0]]);
      g = bp;
    }
  }
  if (pairs.empty()) throw Error(ErrorCode::DegenerateInput, "no free weights for this relation and side");
  PairOrbits po = pair_orbits(size, pairs, perms);
  rep.basis_dim = po.num_orbits;
  rep.exact = po.num_orbits == 1;

  auto ratios = [&](const Eigen::VectorXd& p) {
    ConductanceForm D = form_from_params(po, p);
    return side == RhoSide::Relation ? relation_ratios(scheme, J, D, opts.k) : quotient_ratios(scheme, J, D, opts.k);
  };
  const double inf = std::numeric_limits<double>::infinity();
  auto over = [&](const Eigen::VectorXd& p) {
    try {
      double v = ratios(p).max;
      return std::isfinite(v) ? v : inf;
    } catch (const Error&) {
      return inf;
    }
  };
  auto under = [&](const Eigen::VectorXd& p) {
    try {
      double v = ratios(p).min;
      return std::isfinite(v) ? -v : inf;
    } catch (const Error&) {
      return inf;
    }
  };

  std::vector<Eigen::VectorXd> starts;
  for (const auto& s : opts.starts)
    if (s.size() == size) starts.push_back(params_from_form(po, s, opts.log_bound));
  starts.push_back(Eigen::VectorXd::Zero(po.num_orbits));
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  for (int r = 0; r < opts.restarts; ++r) {
    Eigen::VectorXd p(po.num_orbits);
    for (int i = 0; i < p.size(); ++i) p(i) = uni(rng);
    starts.push_back(p);
  }

  double best_over = inf, best_under = inf;
  Eigen::VectorXd p_over = starts.front(), p_under = starts.front();
  for (const auto& s : starts) {
    double v;
    Eigen::VectorXd p = rep.exact ? s : coordinate_descent(over, s, v, opts);
    if (rep.exact) v = over(p);
    if (v < best_over) {
      best_over = v;
      p_over = p;
    }
    p = rep.exact ? s : coordinate_descent(under, s, v, opts);
    if (rep.exact) v = under(p);
    if (v < best_under) {
      best_under = v;
      p_under = p;
    }
    if (rep.exact) break;
  }
  rep.rho_over = best_over;
  rep.rho_under = -best_under;
  rep.over_form = form_from_params(po, p_over);
  rep.under_form = form_from_params(po, p_under);
  return rep;
}

UniquenessCertificate uniqueness_certificate(const ReplicationScheme& scheme, const ConductanceForm& D, double eta,
                                             const Partition& J, int k_max, double margin) {
  UniquenessCertificate cert;
  ConductanceForm DJ = d_sub_j(D, J);
  ConductanceForm A = DJ;
  double scale = 1.0;
  for (int k = 1; k <= k_max; ++k) {
    A = t_relation_unchecked(scheme, A);
    scale *= eta;
    double v = scale * stationary_ratios(A, DJ, J).max;
    if (!cert.trajectory.empty() && v > cert.trajectory.back() * (1 + 1e-12) + 1e-15) cert.monotone = false;
    cert.trajectory.push_back(v);
    if (!cert.certified && v < 1 - margin) {
      cert.certified = true;
      cert.k = k;
      cert.value = v;
    }
  }
  return cert;
}

CellFlowReport per_cell_flows(const MsStructure& S, const HarmonicStructure& H, const Eigen::VectorXd& h, double tol) {
  const auto& sc = S.level1;
  if (h.size() != sc.refined_size) throw Error(ErrorCode::MissingValue, "h must be given on all level-1 vertices");
  const ConductanceForm& D = H.form;
  const int nb = D.size();
  const int N = S.ctx.cells();
  CellFlowReport rep;
  double range = h.maxCoeff() - h.minCoeff();
  rep.scale = D.max_weight() * (range > 0 ? range : 1.0);

  ConductanceForm D1 = replicate(sc, D);
  Eigen::VectorXd L1h = flows(D1, h);
  std::vector<char> isb(sc.refined_size, 0);
  for (int b : sc.boundary_image) isb[b] = 1;
  for (int v = 0; v < sc.refined_size; ++v)
    if (!isb[v]) rep.harmonic_residual = std::max(rep.harmonic_residual, std::abs(L1h(v)) / rep.scale);
  if (rep.harmonic_residual > tol)
    throw Error(ErrorCode::InvalidInput,
                "h is not harmonic at level 1 (residual " + std::to_string(rep.harmonic_residual) + ")");

  auto compose = [&](const std::vector<int>& map) {
    Eigen::VectorXd g(nb);
    for (int x = 0; x < nb; ++x) g(x) = h(map[x]);
    return g;
  };
  rep.boundary_flows = flows(D, compose(sc.boundary_image));
  for (int i = 0; i < N; ++i) rep.cell_flows.push_back(flows(D, compose(sc.copies[i])));

  rep.p1 = std::abs(rep.boundary_flows.sum()) / rep.scale;
  for (int i = 1; i <= N; ++i) {
    int g = S.glue_index(i);
    double a = rep.cell_flows[i - 1](g);
    double b = rep.cell_flows[i % N](g);
    rep.p2 = std::max(rep.p2, std::abs(a + b) / rep.scale);
    if (std::abs(a) > tol * rep.scale) rep.critical_with_flow.push_back(i);
  }
  for (int x = 0; x < nb; ++x) {
    int y = S.index_of(phi_n(S.boundary[x], S.ctx.n()));
    double inner = rep.cell_flows[S.cell_of[x] - 1](y);
    rep.p3 = std::max(rep.p3, std::abs(rep.boundary_flows(x) - H.eta * inner) / rep.scale);
    if (std::abs(rep.boundary_flows(x)) > tol * rep.scale) rep.boundary_with_flow.push_back(x);
  }
  return rep;
}

namespace {

std::vector<int> critical_value_indices(const MsStructure& S) {
  std::vector<int> kap;
  try {
    kap = kappa(S.ctx);
  } catch (const Error& e) {
    throw Error(ErrorCode::KappaUndefined, std::string("kappa undefined: ") + e.what());
  }
  std::vector<int> xs;
  for (int i = 1; i <= S.ctx.cells(); ++i) xs.push_back(S.index_of(phi_n(critical_angle(S.ctx, kap[i - 1]), S.ctx.n())));
  return xs;
}

}  // namespace

ConductanceForm star_on_classes_form(const MsStructure& S, const Partition& J) {
  auto xs = critical_value_indices(S);
  ConductanceForm D(J.size());
  for (const auto& b : J.blocks()) {
    int centre = b.front();
    for (int x : xs)
      if (std::find(b.begin(), b.end(), x) != b.end()) {
        centre = x;
        break;
      }
    for (int y : b)
      if (y != centre) D.set_weight(centre, y, 1.0);
  }
  return D;
}

ConductanceForm cycle_quotient_form(const MsStructure& S, const Partition& J) {
  auto xs = critical_value_indices(S);
  const int N = static_cast<int>(xs.size());
  ConductanceForm D(J.num_blocks());
  for (int i = 0; i < N; ++i) {
    int a = J.block_of(xs[i]), b = J.block_of(xs[(i + 1) % N]);
    if (a != b) D.add_weight(a, b, 1.0);
  }
  return D;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::NoNontrivialRelationsExistsUnique: return "no_nontrivial_relations_exists_unique";
    case Verdict::CriteriaHoldExistsUnique: return "criteria_hold_exists_unique";
    case Verdict::NonexistenceCertified: return "nonexistence_certified";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

VerdictReport sabot_verdict(const ReplicationScheme& scheme, const std::vector<Partition>& preserved,
                            const VerdictOptions& opts) {
  VerdictReport rep;
  for (const auto& J : preserved) {
    if (J.is_trivial()) continue;
    RelationWitness w;
    w.relation = J;
    w.k = opts.search.k;
    RhoSearchOptions so = opts.search;
    so.group = opts.group;
    so.starts.clear();
    if (opts.relation_candidates) so.starts = opts.relation_candidates(J);
    RhoReport rel = rho_search(scheme, J, RhoSide::Relation, so);
    w.rho_over = rel.rho_over;
    w.rho_under_relation = rel.rho_under;
    so.starts.clear();
    if (opts.quotient_candidates) so.starts = opts.quotient_candidates(J);
    RhoReport quo = rho_search(scheme, J, RhoSide::Quotient, so);
    w.rho_under_quotient = quo.rho_under;
    w.quotient_exact = quo.exact;
    rep.witnesses.push_back(std::move(w));
  }
  if (rep.witnesses.empty()) {
    rep.verdict = Verdict::NoNontrivialRelationsExistsUnique;
    return rep;
  }
  const auto& ws = rep.witnesses;
  for (size_t a = 0; a < ws.size(); ++a)
    for (size_t b = 0; b < ws.size(); ++b)
      if (a != b && ws[a].relation.refines(ws[b].relation)) rep.ordered_pairs.emplace_back(a, b);
  for (size_t a = 0; a < ws.size(); ++a)
    for (size_t b = 0; b < ws.size(); ++b)
      if (ws[a].quotient_exact && ws[a].rho_under_quotient < ws[b].rho_under_relation - 1e-9) {
        rep.verdict = Verdict::NonexistenceCertified;
        rep.notes.push_back("quotient bound of relation " + std::to_string(a) + " (exact) is below the relation bound of " +
                            std::to_string(b));
        return rep;
      }
  bool all_hold = std::all_of(ws.begin(), ws.end(), [](const RelationWitness& w) {
    return w.rho_over < w.rho_under_quotient;
  });
  if (all_hold && rep.ordered_pairs.empty()) {
    rep.verdict = Verdict::CriteriaHoldExistsUnique;
  } else {
    rep.verdict = Verdict::Inconclusive;
    if (all_hold) rep.notes.push_back("inequalities hold but strictly ordered relations exist: at most one solution");
    else rep.notes.push_back("search certificates do not separate rho_over from the quotient bound");
  }
  return rep;
}

VerdictReport sabot_verdict(const MsStructure& S, const HarmonicStructure& H, const std::vector<Partition>& preserved,
                            RhoSearchOptions search) {
  VerdictOptions opts;
  opts.search = std::move(search);
  if (S.rotation_invariant()) opts.group = rotation_group(S);
  const bool m1 = S.ctx.m() == 1;
  opts.relation_candidates = [&S, &H, m1](const Partition& J) {
    std::vector<ConductanceForm> c{d_sub_j(H.form, J)};
    if (m1) {
      try {
        c.push_back(star_on_classes_form(S, J));
      } catch (const Error&) {
      }
    }
    return c;
  };
  opts.quotient_candidates = [&S, &H, m1](const Partition& J) {
    std::vector<ConductanceForm> c{quotient_form(H.form, J)};
    if (m1) {
      try {
        c.push_back(cycle_quotient_form(S, J));
      } catch (const Error&) {
      }
    }
    return c;
  };
  return sabot_verdict(S.level1, preserved, opts);
}

}  // namespace fr
