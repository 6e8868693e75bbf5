#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fr {

using Int = std::int64_t;

struct Rational {
  Int num = 0;
  Int den = 1;

  static Rational make(Int num, Int den);  // reduced, den > 0
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string to_string() const;
  bool operator==(const Rational&) const = default;
  std::strong_ordering operator<=>(const Rational& o) const;
};

// Accepts "p/q" or an integer.
Rational parse_rational(std::string_view s);

// A point of R/Z stored as residue/modulus.
struct Angle {
  Int residue = 0;
  Int modulus = 1;

  double value() const { return static_cast<double>(residue) / static_cast<double>(modulus); }
  Rational rational() const { return Rational::make(residue, modulus); }
  std::string to_string() const { return rational().to_string(); }
  bool operator==(const Angle&) const = default;
  auto operator<=>(const Angle&) const = default;
};

class AngleContext {
 public:
  // theta outside [0, 1/(m+n)) is reduced mod 1/(m+n); a note is appended to
  // `warnings` when given.
  static AngleContext make(int n, int m, Rational theta,
                           std::vector<std::string>* warnings = nullptr);

  int n() const { return n_; }
  int m() const { return m_; }
  int cells() const { return n_ + m_; }
  Int modulus() const { return modulus_; }
  Angle theta() const { return theta_; }

  // Angle for an arbitrary rational; throws ModulusMismatch if the
  // denominator does not divide the context modulus.
  Angle angle(Rational r) const;
  Angle angle(std::string_view s) const { return angle(parse_rational(s)); }
  Angle from_residue(Int r) const;

 private:
  int n_ = 2;
  int m_ = 1;
  Int modulus_ = 1;
  Angle theta_;
};

Angle phi_n(const Angle& a, Int n);
Angle rotate(const Angle& a, Int num, Int den);  // a + num/den, den | modulus
Rational circle_distance(const Angle& a, const Angle& b);

// c_i for any integer i (taken mod m+n); c_{m+n} = theta.
Angle critical_angle(const AngleContext& ctx, int i);
// c_1 .. c_{m+n}
std::vector<Angle> critical_angles(const AngleContext& ctx);
// Forward orbit closure of the critical values, sorted by residue.
std::vector<Angle> post_critical_set(const AngleContext& ctx);
bool is_critical(const AngleContext& ctx, const Angle& a);

struct ValidityReport {
  bool valid = true;
  std::vector<std::string> problems;
  // each orbit starts at a critical angle and ends at the critical angle it hits
  std::vector<std::vector<Angle>> violating_orbits;
};

ValidityReport validate_ms(const AngleContext& ctx);

// Index i in 1..m+n of the open arc (c_{i-1}, c_i) containing a.
int cell_index(const AngleContext& ctx, const Angle& a);

// kappa[i-1] = kappa(i), defined by cell_index(phi_n(c_kappa(i))) = i.
std::vector<int> kappa(const AngleContext& ctx);

}  // namespace fr
