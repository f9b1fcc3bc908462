#pragma once

#include <cctype>
#include <compare>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>

#include "jladder/error.hpp"

namespace jladder {

// Exact fraction with 64-bit parts, always in lowest terms with den > 0.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1) {
    if (den == 0) throw Error(ErrorKind::InvalidArgument, "rational with zero denominator");
    normalize(num, den);
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  bool is_integer() const { return den_ == 1; }

  std::string to_string() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }

  // Accepts "p", "p/q" and plain decimals such as "0.25" or "-1.5".
  static Rational parse(std::string_view text) {
    auto fail = [&] {
      return Error(ErrorKind::InvalidArgument, "not a rational number: '" + std::string(text) + "'");
    };
    if (text.empty()) throw fail();
    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
      const Rational n = parse_decimal(text.substr(0, slash), fail);
      const Rational d = parse_decimal(text.substr(slash + 1), fail);
      if (d.num_ == 0) throw fail();
      return n / d;
    }
    return parse_decimal(text, fail);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return from_wide(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                     static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + Rational(-b.num_, b.den_); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from_wide(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw Error(ErrorKind::InvalidArgument, "rational division by zero");
    return from_wide(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
  }

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    return lhs <=> rhs;
  }

  // Integer power, exact; throws on 64-bit overflow.
  Rational pow(std::int64_t e) const {
    if (e < 0) return Rational(1) / pow(-e);
    Rational out(1);
    for (std::int64_t i = 0; i < e; ++i) out = out * *this;
    return out;
  }

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;

  void normalize(std::int64_t num, std::int64_t den) {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num, den);
    num_ = g == 0 ? 0 : num / g;
    den_ = g == 0 ? 1 : den / g;
  }

  static Rational from_wide(__int128 num, __int128 den) {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    __int128 a = num < 0 ? -num : num;
    __int128 b = den;
    while (b != 0) {
      const __int128 r = a % b;
      a = b;
      b = r;
    }
    if (a > 1) {
      num /= a;
      den /= a;
    }
    constexpr __int128 kMax = INT64_MAX;
    if (num > kMax || num < -kMax || den > kMax) {
      throw Error(ErrorKind::InvalidArgument, "rational arithmetic overflow");
    }
    return Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
  }

  template <class Fail>
  static Rational parse_decimal(std::string_view s, Fail& fail) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
      negative = s.front() == '-';
      s.remove_prefix(1);
    }
    if (s.empty()) throw fail();
    __int128 num = 0;
    __int128 den = 1;
    bool seen_point = false;
    bool seen_digit = false;
    for (char ch : s) {
      if (ch == '.' && !seen_point) {
        seen_point = true;
        continue;
      }
      if (!std::isdigit(static_cast<unsigned char>(ch))) throw fail();
      seen_digit = true;
      num = num * 10 + (ch - '0');
      if (seen_point) den *= 10;
      if (num > INT64_MAX || den > INT64_MAX) throw fail();
    }
    if (!seen_digit) throw fail();
    return from_wide(negative ? -num : num, den);
  }
};

}  // namespace jladder
