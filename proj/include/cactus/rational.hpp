#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <compare>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cactus {

/// Exact rational number.
///
/// Values whose reduced numerator and denominator fit in 64 bits are stored
/// inline and use 128-bit intermediates; anything larger falls back to an
/// arbitrary-precision rational. Both representations are always reduced, so
/// equality of representations is equality of values.
class Rational {
 public:
  using big_type = boost::multiprecision::cpp_rational;

  Rational() = default;
  Rational(std::int64_t n) : num_(n) {}  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t n, std::int64_t d) { assign(n, d); }
  explicit Rational(const big_type& v) { assign_big(v); }

  /// Parses "12", "-3/4", "0.125", "1e-3", "2.5E+2".
  static Rational parse(std::string_view text);

  bool is_small() const noexcept { return !big_; }
  int sign() const noexcept {
    if (big_) return big_->sign();
    return (num_ > 0) - (num_ < 0);
  }
  bool is_zero() const noexcept { return sign() == 0; }
  bool is_integer() const;

  big_type to_big() const {
    if (big_) return *big_;
    return big_type(num_) / den_;
  }
  double to_double() const;

  /// "p" or "p/q" in lowest terms.
  std::string to_string() const;
  /// Rounded decimal with `digits` fractional digits (half away from zero).
  std::string to_decimal(int digits) const;

  Rational half() const;
  Rational abs() const { return sign() < 0 ? -*this : *this; }

  Rational operator-() const;
  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b);
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.to_string();
  }

 private:
  using i128 = __int128;
  using u128 = unsigned __int128;

  static u128 gcd128(u128 a, u128 b) {
    if (a <= std::numeric_limits<std::uint64_t>::max() &&
        b <= std::numeric_limits<std::uint64_t>::max()) {
      return std::gcd(static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b));
    }
    while (b != 0) {
      u128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  static bool fits64(i128 v) {
    return v >= std::numeric_limits<std::int64_t>::min() &&
           v <= std::numeric_limits<std::int64_t>::max();
  }

  static big_type to_big128(i128 v) {
    bool neg = v < 0;
    u128 m = neg ? static_cast<u128>(-(v + 1)) + 1 : static_cast<u128>(v);
    boost::multiprecision::cpp_int out = static_cast<std::uint64_t>(m >> 64);
    out <<= 64;
    out += static_cast<std::uint64_t>(m);
    return neg ? big_type(-out) : big_type(out);
  }

  void assign(i128 n, i128 d) {
    if (d == 0) throw std::domain_error("rational: zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    u128 an = n < 0 ? static_cast<u128>(-(n + 1)) + 1 : static_cast<u128>(n);
    u128 g = gcd128(an, static_cast<u128>(d));
    if (g > 1) {
      n /= static_cast<i128>(g);
      d /= static_cast<i128>(g);
    }
    if (fits64(n) && fits64(d)) {
      num_ = static_cast<std::int64_t>(n);
      den_ = static_cast<std::int64_t>(d);
      big_.reset();
    } else {
      big_ = std::make_shared<const big_type>(to_big128(n) / to_big128(d));
      num_ = 0;
      den_ = 1;
    }
  }

  void assign_big(const big_type& v) {
    const auto& n = boost::multiprecision::numerator(v);
    const auto& d = boost::multiprecision::denominator(v);
    if (n >= std::numeric_limits<std::int64_t>::min() &&
        n <= std::numeric_limits<std::int64_t>::max() &&
        d <= std::numeric_limits<std::int64_t>::max()) {
      num_ = static_cast<std::int64_t>(n);
      den_ = static_cast<std::int64_t>(d);
      big_.reset();
    } else {
      big_ = std::make_shared<const big_type>(v);
      num_ = 0;
      den_ = 1;
    }
  }

  static Rational from_big(const big_type& v) { return Rational(v); }
  static Rational from128(i128 n, i128 d) {
    Rational r;
    r.assign(n, d);
    return r;
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  std::shared_ptr<const big_type> big_;
};

inline Rational Rational::operator-() const {
  if (big_) return from_big(-*big_);
  return from128(-static_cast<i128>(num_), den_);
}

inline Rational operator+(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_) {
    using i128 = Rational::i128;
    if (a.den_ == b.den_) {
      if (a.den_ == 1) return Rational::from128(static_cast<i128>(a.num_) + b.num_, 1);
      return Rational::from128(static_cast<i128>(a.num_) + b.num_, a.den_);
    }
    return Rational::from128(static_cast<i128>(a.num_) * b.den_ + static_cast<i128>(b.num_) * a.den_,
                             static_cast<i128>(a.den_) * b.den_);
  }
  return Rational::from_big(a.to_big() + b.to_big());
}

inline Rational operator-(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_) {
    using i128 = Rational::i128;
    if (a.den_ == b.den_) return Rational::from128(static_cast<i128>(a.num_) - b.num_, a.den_);
    return Rational::from128(static_cast<i128>(a.num_) * b.den_ - static_cast<i128>(b.num_) * a.den_,
                             static_cast<i128>(a.den_) * b.den_);
  }
  return Rational::from_big(a.to_big() - b.to_big());
}

inline Rational operator*(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_) {
    using i128 = Rational::i128;
    return Rational::from128(static_cast<i128>(a.num_) * b.num_, static_cast<i128>(a.den_) * b.den_);
  }
  return Rational::from_big(a.to_big() * b.to_big());
}

inline Rational operator/(const Rational& a, const Rational& b) {
  if (b.is_zero()) throw std::domain_error("rational: division by zero");
  if (!a.big_ && !b.big_) {
    using i128 = Rational::i128;
    return Rational::from128(static_cast<i128>(a.num_) * b.den_, static_cast<i128>(a.den_) * b.num_);
  }
  return Rational::from_big(a.to_big() / b.to_big());
}

inline Rational Rational::half() const {
  if (big_) return from_big(*big_ / 2);
  return from128(num_, static_cast<i128>(den_) * 2);
}

inline bool operator==(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_) return a.num_ == b.num_ && a.den_ == b.den_;
  if (a.big_ && b.big_) return *a.big_ == *b.big_;
  // Reduced forms: a small and a big value are never equal.
  return false;
}

inline std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_) {
    using i128 = Rational::i128;
    if (a.den_ == b.den_) return a.num_ <=> b.num_;
    i128 l = static_cast<i128>(a.num_) * b.den_;
    i128 r = static_cast<i128>(b.num_) * a.den_;
    return l <=> r;
  }
  auto l = a.to_big();
  auto r = b.to_big();
  if (l < r) return std::strong_ordering::less;
  if (r < l) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

inline bool Rational::is_integer() const {
  if (big_) return boost::multiprecision::denominator(*big_) == 1;
  return den_ == 1;
}

inline double Rational::to_double() const {
  if (big_) return big_->convert_to<double>();
  return static_cast<double>(num_) / static_cast<double>(den_);
}

inline std::string Rational::to_string() const {
  if (big_) {
    std::string out = boost::multiprecision::numerator(*big_).str();
    const auto& d = boost::multiprecision::denominator(*big_);
    if (d != 1) out += "/" + d.str();
    return out;
  }
  std::string out = std::to_string(num_);
  if (den_ != 1) out += "/" + std::to_string(den_);
  return out;
}

inline std::string Rational::to_decimal(int digits) const {
  using boost::multiprecision::cpp_int;
  if (digits < 0) digits = 0;
  cpp_int scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  big_type v = to_big();
  bool neg = v < 0;
  if (neg) v = -v;
  big_type scaled = v * scale;
  cpp_int n = boost::multiprecision::numerator(scaled);
  cpp_int d = boost::multiprecision::denominator(scaled);
  cpp_int q = n / d;
  cpp_int r = n % d;
  if (2 * r >= d) q += 1;
  std::string body = q.str();
  if (digits > 0) {
    if (body.size() <= static_cast<std::size_t>(digits)) {
      body.insert(0, static_cast<std::size_t>(digits) + 1 - body.size(), '0');
    }
    body.insert(body.size() - static_cast<std::size_t>(digits), ".");
  }
  if (neg && q != 0) body.insert(0, "-");
  return body;
}

inline Rational Rational::parse(std::string_view text) {
  auto fail = [&]() -> Rational {
    throw std::invalid_argument("not a rational number: '" + std::string(text) + "'");
  };
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (text.empty()) return fail();

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational n = parse(text.substr(0, slash));
    Rational d = parse(text.substr(slash + 1));
    if (!n.is_integer() || !d.is_integer()) return fail();
    if (d.is_zero()) return fail();
    return n / d;
  }

  using boost::multiprecision::cpp_int;
  std::size_t pos = 0;
  bool neg = false;
  if (text[pos] == '+' || text[pos] == '-') {
    neg = text[pos] == '-';
    ++pos;
  }
  cpp_int mantissa = 0;
  int frac_digits = 0;
  bool any_digit = false;
  bool in_frac = false;
  for (; pos < text.size(); ++pos) {
    char c = text[pos];
    if (c >= '0' && c <= '9') {
      mantissa = mantissa * 10 + (c - '0');
      any_digit = true;
      if (in_frac) ++frac_digits;
    } else if (c == '.' && !in_frac) {
      in_frac = true;
    } else {
      break;
    }
  }
  if (!any_digit) return fail();
  long exponent = 0;
  if (pos < text.size()) {
    if (text[pos] != 'e' && text[pos] != 'E') return fail();
    ++pos;
    if (pos < text.size() && text[pos] == '+') ++pos;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), exponent);
    if (ec != std::errc() || ptr != text.data() + text.size()) return fail();
    if (exponent > 4096 || exponent < -4096) return fail();
  }
  exponent -= frac_digits;
  cpp_int scale = 1;
  for (long i = 0; i < (exponent < 0 ? -exponent : exponent); ++i) scale *= 10;
  big_type value = exponent >= 0 ? big_type(mantissa * scale) : big_type(mantissa, scale);
  if (neg) value = -value;
  return Rational(value);
}

}  // namespace cactus
