#include "rw/rational.hpp"

#include <algorithm>
#include <cctype>

#include "rw/errors.hpp"

namespace rw {
namespace {

using Int = Rational::Int;

Int abs128(Int v) { return v < 0 ? -v : v; }

Int gcd128(Int a, Int b) {
  a = abs128(a);
  b = abs128(b);
  while (b != 0) {
    Int t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Int checked_mul(Int a, Int b) {
  Int r;
  if (__builtin_mul_overflow(a, b, &r)) throw ArithmeticOverflow("rational multiplication overflow");
  return r;
}

Int checked_add(Int a, Int b) {
  Int r;
  if (__builtin_add_overflow(a, b, &r)) throw ArithmeticOverflow("rational addition overflow");
  return r;
}

}  // namespace

Rational::Rational(Int num, Int den) {
  if (den == 0) throw UndefinedInput("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  Int g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  num_ = num;
  den_ = den;
}

Rational Rational::parse(std::string_view text) {
  auto bad = [&] { return Error("malformed rational literal '" + std::string(text) + "'"); };
  if (text.empty()) throw bad();
  std::size_t i = 0;
  bool neg = false;
  if (text[0] == '-' || text[0] == '+') {
    neg = text[0] == '-';
    ++i;
  }
  Int num = 0;
  Int den = 1;
  bool digits = false;
  bool in_frac = false;
  bool slash = false;
  Int denom_part = 0;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits = true;
      if (slash) {
        denom_part = checked_add(checked_mul(denom_part, 10), c - '0');
      } else {
        num = checked_add(checked_mul(num, 10), c - '0');
        if (in_frac) den = checked_mul(den, 10);
      }
    } else if (c == '.' && !in_frac && !slash) {
      in_frac = true;
    } else if (c == '/' && !slash && !in_frac && digits) {
      slash = true;
      digits = false;
    } else {
      throw bad();
    }
  }
  if (!digits) throw bad();
  if (slash) {
    if (denom_part == 0) throw bad();
    den = denom_part;
  }
  return Rational(neg ? -num : num, den);
}

Rational Rational::from_mpq(const mpq_class& q) {
  Rational::Int n = 0;
  Rational::Int d = 0;
  // Go through text to avoid depending on mpz limb layout.
  auto to_int = [](const mpz_class& z) {
    std::string s = z.get_str();
    bool neg = !s.empty() && s[0] == '-';
    Int v = 0;
    for (std::size_t i = neg ? 1 : 0; i < s.size(); ++i) v = checked_add(checked_mul(v, 10), s[i] - '0');
    return neg ? -v : v;
  };
  n = to_int(q.get_num());
  d = to_int(q.get_den());
  return Rational(n, d);
}

Rational Rational::operator-() const {
  Rational r;
  r.num_ = -num_;
  r.den_ = den_;
  return r;
}

Rational operator+(const Rational& a, const Rational& b) {
  if (a.den_ == b.den_) return Rational(checked_add(a.num_, b.num_), a.den_);
  Int g = gcd128(a.den_, b.den_);
  Int da = a.den_ / g;
  Int db = b.den_ / g;
  return Rational(checked_add(checked_mul(a.num_, db), checked_mul(b.num_, da)), checked_mul(a.den_, db));
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  if (a.num_ == 0 || b.num_ == 0) return Rational();
  Int g1 = gcd128(a.num_, b.den_);
  Int g2 = gcd128(b.num_, a.den_);
  return Rational(checked_mul(a.num_ / g1, b.num_ / g2), checked_mul(a.den_ / g2, b.den_ / g1));
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw UndefinedInput("rational division by zero");
  Rational inv;
  inv.num_ = b.num_ < 0 ? -b.den_ : b.den_;
  inv.den_ = abs128(b.num_);
  return a * inv;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  if (a.den_ == b.den_) return a.num_ <=> b.num_;
  return checked_mul(a.num_, b.den_) <=> checked_mul(b.num_, a.den_);
}

std::string int128_to_string(Int v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  std::string s;
  // Negate digit-wise to survive the minimum value.
  while (v != 0) {
    int d = static_cast<int>(v % 10);
    s.push_back(static_cast<char>('0' + (d < 0 ? -d : d)));
    v /= 10;
  }
  if (neg) s.push_back('-');
  std::reverse(s.begin(), s.end());
  return s;
}

std::string Rational::str() const {
  if (den_ == 1) return int128_to_string(num_);
  return int128_to_string(num_) + "/" + int128_to_string(den_);
}

double Rational::to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

mpq_class Rational::to_mpq() const {
  mpq_class q(mpz_class(int128_to_string(num_)), mpz_class(int128_to_string(den_)));
  q.canonicalize();
  return q;
}

std::string mpq_str(const mpq_class& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_str();
}

mpq_class parse_mpq(std::string_view text) {
  std::string s(text);
  if (s.find('.') != std::string::npos) return Rational::parse(s).to_mpq();
  mpq_class q;
  if (q.set_str(s, 10) != 0 || q.get_den() == 0) throw Error("malformed rational '" + s + "'");
  q.canonicalize();
  return q;
}

}  // namespace rw
