#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace hanoiflow {

// Exact rational arithmetic on 64-bit integers with 128-bit intermediates.
// Every amount in the flow construction has a denominator dividing
// p^a * (p-2)^b, so normalized values stay far below the 64-bit range at
// the graph sizes this library targets. If a result would not fit after
// gcd reduction we throw instead of silently wrapping.
class Rational {
 public:
  constexpr Rational() : num_(0), den_(1) {}
  constexpr Rational(long long value) : num_(value), den_(1) {}
  Rational(long long num, long long den) { assign(num, den); }

  long long num() const { return num_; }
  long long den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  Rational operator-() const {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }

  Rational& operator+=(const Rational& o) {
    __int128 n = i128(num_) * o.den_ + i128(o.num_) * den_;
    __int128 d = i128(den_) * o.den_;
    set_reduced(n, d);
    return *this;
  }

  Rational& operator-=(const Rational& o) { return *this += -o; }

  Rational& operator*=(const Rational& o) {
    __int128 n = i128(num_) * o.num_;
    __int128 d = i128(den_) * o.den_;
    set_reduced(n, d);
    return *this;
  }

  Rational& operator/=(const Rational& o) {
    if (o.num_ == 0) throw std::domain_error("Rational: division by zero");
    __int128 n = i128(num_) * o.den_;
    __int128 d = i128(den_) * o.num_;
    set_reduced(n, d);
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) {
    return !(a == b);
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) {
    return !(b < a);
  }
  friend bool operator>=(const Rational& a, const Rational& b) {
    return !(a < b);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.str();
  }

 private:
  using i128 = __int128;

  void assign(long long num, long long den) {
    if (den == 0) throw std::domain_error("Rational: zero denominator");
    set_reduced(num, den);
  }

  static i128 gcd128(i128 a, i128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      i128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  void set_reduced(i128 n, i128 d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    if (n == 0) {
      num_ = 0;
      den_ = 1;
      return;
    }
    i128 g = gcd128(n, d);
    n /= g;
    d /= g;
    constexpr i128 lo = std::numeric_limits<long long>::min();
    constexpr i128 hi = std::numeric_limits<long long>::max();
    if (n < lo || n > hi || d > hi)
      throw std::overflow_error("Rational: value out of 64-bit range");
    num_ = static_cast<long long>(n);
    den_ = static_cast<long long>(d);
  }

  long long num_;
  long long den_;
};

inline Rational abs(const Rational& r) { return r.num() < 0 ? -r : r; }

// Traits shared by the two flow amount types. `double` is the fast default;
// `Rational` is the exact mode used for acceptance-level validation.
template <class A>
struct amount_traits;

template <>
struct amount_traits<double> {
  static constexpr bool exact = false;
  static double ratio(long long num, long long den) {
    return static_cast<double>(num) / static_cast<double>(den);
  }
  static double to_double(double v) { return v; }
  static std::string str(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
  }
};

template <>
struct amount_traits<Rational> {
  static constexpr bool exact = true;
  static Rational ratio(long long num, long long den) {
    return Rational(num, den);
  }
  static double to_double(const Rational& v) { return v.to_double(); }
  static std::string str(const Rational& v) { return v.str(); }
};

// Equality up to tolerance: exact for Rational, relative for double.
inline bool close_enough(double actual, double expected, double tol) {
  return std::abs(actual - expected) <=
         tol * std::max(1.0, std::abs(expected));
}
inline bool close_enough(const Rational& actual, const Rational& expected,
                         double /*tol*/) {
  return actual == expected;
}

}  // namespace hanoiflow
