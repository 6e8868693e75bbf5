#include "fracrenorm/angle.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <set>

#include "fracrenorm/error.hpp"

namespace fr {

namespace {

Int mod(Int a, Int m) {
  Int r = a % m;
  return r < 0 ? r + m : r;
}

Int mulmod(Int a, Int b, Int m) {
  __int128 p = static_cast<__int128>(a) * b;
  __int128 r = p % m;
  if (r < 0) r += m;
  return static_cast<Int>(r);
}

Int parse_int(std::string_view s) {
  Int v = 0;
  auto* first = s.data();
  auto* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last)
    throw Error(ErrorCode::InvalidInput, "not an integer: '" + std::string(s) + "'");
  return v;
}

}  // namespace

const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::ModulusMismatch: return "ModulusMismatch";
    case ErrorCode::CriticalAngle: return "CriticalAngle";
    case ErrorCode::NotAPermutation: return "NotAPermutation";
    case ErrorCode::InvalidMs: return "InvalidMs";
    case ErrorCode::DepthCap: return "DepthCap";
    case ErrorCode::NotInvariant: return "NotInvariant";
    case ErrorCode::VertexMismatch: return "VertexMismatch";
    case ErrorCode::MissingValue: return "MissingValue";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::KappaUndefined: return "KappaUndefined";
    case ErrorCode::NotInMJ: return "NotInMJ";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::SubsetInvalid: return "SubsetInvalid";
    case ErrorCode::Schema: return "Schema";
  }
  return "Unknown";
}

Rational Rational::make(Int num, Int den) {
  if (den == 0) throw Error(ErrorCode::InvalidInput, "zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  Int g = std::gcd(num < 0 ? -num : num, den);
  if (g == 0) g = 1;
  return {num / g, den / g};
}

std::string Rational::to_string() const {
  return std::to_string(num) + "/" + std::to_string(den);
}

std::strong_ordering Rational::operator<=>(const Rational& o) const {
  __int128 l = static_cast<__int128>(num) * o.den;
  __int128 r = static_cast<__int128>(o.num) * den;
  if (l < r) return std::strong_ordering::less;
  if (l > r) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

Rational parse_rational(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  auto slash = s.find('/');
  if (slash == std::string_view::npos) return Rational::make(parse_int(s), 1);
  return Rational::make(parse_int(s.substr(0, slash)), parse_int(s.substr(slash + 1)));
}

AngleContext AngleContext::make(int n, int m, Rational theta, std::vector<std::string>* warnings) {
  if (n < 2) throw Error(ErrorCode::InvalidInput, "n must be >= 2");
  if (m < 1) throw Error(ErrorCode::InvalidInput, "m must be >= 1");
  const Int N = n + m;
  AngleContext ctx;
  ctx.n_ = n;
  ctx.m_ = m;
  ctx.modulus_ = std::lcm(theta.den, N);
  const Int M = ctx.modulus_;
  Int t = mod(mulmod(theta.num, M / theta.den, M), M);
  // theta mod 1 first, then mod 1/N
  Int reduced = t % (M / N);
  if (reduced != t || theta.num < 0 || theta.num >= theta.den) {
    if (warnings) {
      warnings->push_back("theta " + theta.to_string() + " reduced mod 1/" + std::to_string(N) +
                          " to " + Rational::make(reduced, M).to_string());
    }
  }
  // the modulus may shrink after reduction; recompute from the reduced value
  Rational red = Rational::make(reduced, M);
  ctx.modulus_ = std::lcm(red.den, N);
  ctx.theta_ = Angle{red.num * (ctx.modulus_ / red.den), ctx.modulus_};
  return ctx;
}

Angle AngleContext::angle(Rational r) const {
  if (modulus_ % r.den != 0)
    throw Error(ErrorCode::ModulusMismatch,
                "angle " + r.to_string() + " not representable with modulus " + std::to_string(modulus_));
  return {mod(mulmod(r.num, modulus_ / r.den, modulus_), modulus_), modulus_};
}

Angle AngleContext::from_residue(Int r) const { return {mod(r, modulus_), modulus_}; }

Angle phi_n(const Angle& a, Int n) { return {mulmod(a.residue, n, a.modulus), a.modulus}; }

Angle rotate(const Angle& a, Int num, Int den) {
  if (a.modulus % den != 0) throw Error(ErrorCode::ModulusMismatch, "rotation not on the angle lattice");
  return {mod(a.residue + mulmod(num, a.modulus / den, a.modulus), a.modulus), a.modulus};
}

Rational circle_distance(const Angle& a, const Angle& b) {
  if (a.modulus != b.modulus) throw Error(ErrorCode::ModulusMismatch, "circle_distance: modulus mismatch");
  Int d = mod(a.residue - b.residue, a.modulus);
  return Rational::make(std::min(d, a.modulus - d), a.modulus);
}

Angle critical_angle(const AngleContext& ctx, int i) {
  return rotate(ctx.theta(), mod(i, ctx.cells()), ctx.cells());
}

std::vector<Angle> critical_angles(const AngleContext& ctx) {
  std::vector<Angle> out;
  for (int i = 1; i <= ctx.cells(); ++i) out.push_back(critical_angle(ctx, i));
  return out;
}

bool is_critical(const AngleContext& ctx, const Angle& a) {
  return a.modulus == ctx.modulus() && (a.residue - ctx.theta().residue) % (ctx.modulus() / ctx.cells()) == 0;
}

std::vector<Angle> post_critical_set(const AngleContext& ctx) {
  std::set<Int> seen;
  std::vector<Angle> stack;
  for (const auto& c : critical_angles(ctx)) {
    Angle v = phi_n(c, ctx.n());
    if (seen.insert(v.residue).second) stack.push_back(v);
  }
  while (!stack.empty()) {
    Angle v = phi_n(stack.back(), ctx.n());
    stack.pop_back();
    if (seen.insert(v.residue).second) stack.push_back(v);
  }
  std::vector<Angle> out;
  for (Int r : seen) out.push_back({r, ctx.modulus()});
  return out;
}

ValidityReport validate_ms(const AngleContext& ctx) {
  ValidityReport rep;
  for (const auto& c : critical_angles(ctx)) {
    std::vector<Angle> orbit{c};
    std::set<Int> seen;
    Angle v = c;
    while (true) {
      v = phi_n(v, ctx.n());
      orbit.push_back(v);
      if (is_critical(ctx, v)) {
        rep.valid = false;
        rep.problems.push_back("orbit of critical angle " + c.to_string() + " reaches critical angle " +
                               v.to_string());
        rep.violating_orbits.push_back(orbit);
        break;
      }
      if (!seen.insert(v.residue).second) break;
    }
  }
  return rep;
}

int cell_index(const AngleContext& ctx, const Angle& a) {
  if (a.modulus != ctx.modulus()) throw Error(ErrorCode::ModulusMismatch, "cell_index: modulus mismatch");
  if (is_critical(ctx, a)) throw Error(ErrorCode::CriticalAngle, "angle " + a.to_string() + " is critical");
  Int d = mod(a.residue - ctx.theta().residue, ctx.modulus());
  return static_cast<int>(d / (ctx.modulus() / ctx.cells())) + 1;
}

std::vector<int> kappa(const AngleContext& ctx) {
  const int N = ctx.cells();
  std::vector<int> k(N, 0);
  for (int j = 1; j <= N; ++j) {
    Angle v = phi_n(critical_angle(ctx, j), ctx.n());
    int i;
    try {
      i = cell_index(ctx, v);
    } catch (const Error&) {
      throw Error(ErrorCode::NotAPermutation, "critical value " + v.to_string() + " is critical");
    }
    if (k[i - 1] != 0) throw Error(ErrorCode::NotAPermutation, "two critical values lie in cell " + std::to_string(i));
    k[i - 1] = j;
  }
  return k;
}

}  // namespace fr
