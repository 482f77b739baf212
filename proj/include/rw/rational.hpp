#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace rw {

/// Exact rational in lowest terms with a positive denominator.
///
/// Backed by 128-bit integers; every operation is overflow-checked and throws
/// ArithmeticOverflow instead of wrapping. Values reachable at desk scale
/// (proportions over N^k tuples, decimal literals, tolerances) stay far inside
/// the range, so this is the fast path for formula evaluation. Use
/// `to_mpq()` when a result must be combined with big-integer counts.
class Rational {
 public:
  using Int = __int128;

  constexpr Rational() = default;
  Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT: implicit by design of literals
  Rational(Int num, Int den);

  /// Parses "3", "-2", "4/5", "0.8", ".25" exactly.
  static Rational parse(std::string_view text);
  static Rational from_mpq(const mpq_class& q);

  Int num() const noexcept { return num_; }
  Int den() const noexcept { return den_; }
  bool is_zero() const noexcept { return num_ == 0; }
  bool is_integer() const noexcept { return den_ == 1; }

  Rational operator-() const;
  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }

  friend bool operator==(const Rational& a, const Rational& b) noexcept {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

  /// "p/q", or "p" when integral.
  std::string str() const;
  double to_double() const;
  mpq_class to_mpq() const;

 private:
  Int num_ = 0;
  Int den_ = 1;
};

std::string int128_to_string(Rational::Int v);

/// "p/q" text of an arbitrary-precision rational (integers print without "/1").
std::string mpq_str(const mpq_class& q);

/// Parses "p/q" or an integer into an mpq_class.
mpq_class parse_mpq(std::string_view text);

}  // namespace rw
