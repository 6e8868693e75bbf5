#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "fracrenorm/angle.hpp"
#include "fracrenorm/ms_structure.hpp"
#include "fracrenorm/network.hpp"
#include "fracrenorm/partition.hpp"

namespace frt {

inline fr::MsStructure ms(int n, int m, const char* theta, bool sym) {
  return fr::build_structure(fr::AngleContext::make(n, m, fr::parse_rational(theta)), sym);
}

inline fr::MsStructure ms(int n, int m, const char* theta) {
  auto ctx = fr::AngleContext::make(n, m, fr::parse_rational(theta));
  return fr::build_structure(ctx, fr::default_symmetrize(ctx));
}

inline std::vector<std::string> strs(const std::vector<fr::Angle>& as) {
  std::vector<std::string> out;
  for (const auto& a : as) out.push_back(a.to_string());
  return out;
}

// Partition on the boundary from angle strings; unlisted points are singletons.
inline fr::Partition rel(const fr::MsStructure& S, const std::vector<std::vector<std::string>>& blocks) {
  std::vector<std::vector<int>> b;
  for (const auto& blk : blocks) {
    std::vector<int> ids;
    for (const auto& s : blk) ids.push_back(S.index_of(S.ctx.angle(s)));
    b.push_back(ids);
  }
  return fr::Partition::from_blocks(static_cast<int>(S.boundary.size()), b);
}

inline fr::ConductanceForm random_form(int size, std::mt19937_64& rng, double zero_prob = 0.0) {
  std::uniform_real_distribution<double> u(0.1, 2.0), coin(0.0, 1.0);
  fr::ConductanceForm D(size);
  for (int x = 0; x < size; ++x)
    for (int y = x + 1; y < size; ++y)
      if (coin(rng) >= zero_prob) D.set_weight(x, y, u(rng));
  return D;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Closed form for theta = l/(n(m+n)).
inline double eta_family(int n, int m, int l) {
  const double N = n + m, q = m * n / N;
  return 0.5 + q / 2 + 0.5 * std::sqrt((q - 1) * (q - 1) + 8.0 * l * (n - l) / N);
}

// Valid contexts with small boundaries, in a fixed order.
inline std::vector<fr::AngleContext> valid_contexts(int count, int max_boundary = 12) {
  std::vector<fr::AngleContext> out;
  for (int q = 2; q <= 60 && static_cast<int>(out.size()) < count; ++q)
    for (int n = 2; n <= 4; ++n)
      for (int m = 1; m <= 3; ++m)
        for (int p = 1; p * (n + m) < q; ++p) {
          if (std::gcd(p, q) != 1 || static_cast<int>(out.size()) >= count) continue;
          auto ctx = fr::AngleContext::make(n, m, fr::Rational::make(p, q));
          if (!fr::validate_ms(ctx).valid) continue;
          if (static_cast<int>(fr::post_critical_set(ctx).size()) > max_boundary) continue;
          out.push_back(ctx);
        }
  return out;
}

// Minimum of the energy over the interior values by nested grid refinement.
inline double grid_min_energy(const fr::ConductanceForm& D, const std::vector<int>& boundary, const Eigen::VectorXd& f) {
  const int n = D.size();
  std::vector<int> interior;
  for (int v = 0; v < n; ++v)
    if (std::find(boundary.begin(), boundary.end(), v) == boundary.end()) interior.push_back(v);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  for (size_t i = 0; i < boundary.size(); ++i) u(boundary[i]) = f(i);
  const int k = static_cast<int>(interior.size());
  Eigen::VectorXd center = Eigen::VectorXd::Constant(k, (f.maxCoeff() + f.minCoeff()) / 2);
  double half = (f.maxCoeff() - f.minCoeff()) / 2 + 1e-3;
  const int pts = 11;
  double best = 0;
  for (int round = 0; round < 40; ++round) {
    Eigen::VectorXd best_x = center;
    best = std::numeric_limits<double>::infinity();
    int total = 1;
    for (int i = 0; i < k; ++i) total *= pts;
    for (int idx = 0; idx < total; ++idx) {
      Eigen::VectorXd x(k);
      for (int i = 0, r = idx; i < k; ++i, r /= pts) x(i) = center(i) + half * (2.0 * (r % pts) / (pts - 1) - 1.0);
      for (int i = 0; i < k; ++i) u(interior[i]) = x(i);
      double e = fr::energy(D, u);
      if (e < best) {
        best = e;
        best_x = x;
      }
    }
    center = best_x;
    half *= 0.5;
  }
  return best;
}

}  // namespace frt
