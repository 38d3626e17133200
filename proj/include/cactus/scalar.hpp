#pragma once

#include "cactus/rational.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <concepts>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace cactus {

// Relative tolerance used by the floating-point numeric mode.
inline std::atomic<double>& float_tolerance_storage() {
  static std::atomic<double> eps{1e-9};
  return eps;
}
inline double float_tolerance() { return float_tolerance_storage().load(std::memory_order_relaxed); }
inline void set_float_tolerance(double eps) {
  if (!(eps >= 0.0)) throw std::invalid_argument("tolerance must be non-negative");
  float_tolerance_storage().store(eps, std::memory_order_relaxed);
}

class ScopedFloatTolerance {
 public:
  explicit ScopedFloatTolerance(double eps) : saved_(float_tolerance()) { set_float_tolerance(eps); }
  ~ScopedFloatTolerance() { set_float_tolerance(saved_); }
  ScopedFloatTolerance(const ScopedFloatTolerance&) = delete;
  ScopedFloatTolerance& operator=(const ScopedFloatTolerance&) = delete;

 private:
  double saved_;
};

template <typename T>
struct scalar_traits;

template <>
struct scalar_traits<Rational> {
  static constexpr bool exact = true;
  static constexpr const char* mode_name = "exact";

  static bool eq(const Rational& a, const Rational& b) { return a == b; }
  static bool lt(const Rational& a, const Rational& b) { return a < b; }
  static Rational half(const Rational& a) { return a.half(); }
  static Rational parse(std::string_view s) { return Rational::parse(s); }
  static std::string format(const Rational& a) { return a.to_string(); }
  static std::string format_decimal(const Rational& a, int digits) { return a.to_decimal(digits); }
  static double to_double(const Rational& a) { return a.to_double(); }
  static Rational from_ratio(std::int64_t n, std::int64_t d) { return Rational(n, d); }
};

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static constexpr const char* mode_name = "float";

  // |a - b| <= eps * max(1, |a|, |b|)
  static bool eq(double a, double b) {
    double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
    return std::fabs(a - b) <= float_tolerance() * scale;
  }
  static bool lt(double a, double b) { return a < b && !eq(a, b); }
  static double half(double a) { return a / 2.0; }
  static double parse(std::string_view s) {
    // Exact parse first so "1/3" works the same way as in exact mode.
    return Rational::parse(s).to_double();
  }
  static std::string format(double a) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), a);
    if (ec != std::errc()) return std::to_string(a);
    return std::string(buf, ptr);
  }
  static std::string format_decimal(double a, int digits) {
    char buf[512];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), a, std::chars_format::fixed, digits);
    if (ec != std::errc()) return format(a);
    return std::string(buf, ptr);
  }
  static double to_double(double a) { return a; }
  static double from_ratio(std::int64_t n, std::int64_t d) {
    return static_cast<double>(n) / static_cast<double>(d);
  }
};

template <typename T>
concept Scalar = requires(const T& a, const T& b) {
  { a + b } -> std::convertible_to<T>;
  { a - b } -> std::convertible_to<T>;
  { scalar_traits<T>::eq(a, b) } -> std::convertible_to<bool>;
  { scalar_traits<T>::lt(a, b) } -> std::convertible_to<bool>;
  { scalar_traits<T>::half(a) } -> std::convertible_to<T>;
};

// Comparisons under the active policy of the scalar type.
namespace num {

template <Scalar T>
bool eq(const T& a, const T& b) { return scalar_traits<T>::eq(a, b); }
template <Scalar T>
bool ne(const T& a, const T& b) { return !eq(a, b); }
template <Scalar T>
bool lt(const T& a, const T& b) { return scalar_traits<T>::lt(a, b); }
template <Scalar T>
bool gt(const T& a, const T& b) { return lt(b, a); }
template <Scalar T>
bool le(const T& a, const T& b) { return !lt(b, a); }
template <Scalar T>
bool ge(const T& a, const T& b) { return !lt(a, b); }
template <Scalar T>
bool is_zero(const T& a) { return eq(a, T{}); }
template <Scalar T>
bool positive(const T& a) { return lt(T{}, a); }
template <Scalar T>
T half(const T& a) { return scalar_traits<T>::half(a); }
template <Scalar T>
std::string format(const T& a) { return scalar_traits<T>::format(a); }
template <Scalar T>
T parse(std::string_view s) { return scalar_traits<T>::parse(s); }

}  // namespace num
}  // namespace cactus
