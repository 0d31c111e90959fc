#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>

#include "hdmitx/error.hpp"

namespace hdmitx {

// Exact picosecond quantity num/den. Serial periods are not integral in ps
// (1.65 Gbps gives 20000/33 ps), so edge grids are kept rational and only
// rounded when an individual edge is placed.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  constexpr Rational() = default;
  constexpr Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) { normalize(); }

  constexpr void normalize() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend constexpr Rational operator*(Rational a, std::int64_t k) { return {a.num * k, a.den}; }
  friend constexpr Rational operator*(std::int64_t k, Rational a) { return a * k; }
  friend constexpr Rational operator/(Rational a, std::int64_t k) { return {a.num, a.den * k}; }
  friend constexpr Rational operator+(Rational a, Rational b) {
    return {a.num * b.den + b.num * a.den, a.den * b.den};
  }
  friend constexpr Rational operator-(Rational a, Rational b) {
    return {a.num * b.den - b.num * a.den, a.den * b.den};
  }
  friend constexpr bool operator==(Rational a, Rational b) { return a.num * b.den == b.num * a.den; }
  friend constexpr bool operator<(Rational a, Rational b) { return a.num * b.den < b.num * a.den; }
  friend constexpr bool operator<=(Rational a, Rational b) { return !(b < a); }
  friend constexpr bool operator>(Rational a, Rational b) { return b < a; }
  friend constexpr bool operator>=(Rational a, Rational b) { return !(a < b); }

  // floor(x + 1/2)
  constexpr std::int64_t round() const {
    const std::int64_t n = 2 * num + den;
    const std::int64_t d = 2 * den;
    return n >= 0 ? n / d : -((-n + d - 1) / d);
  }
  constexpr std::int64_t floor() const {
    return num >= 0 ? num / den : -((-num + den - 1) / den);
  }
};

// Serial bit period for an integral rate in Hz, in exact picoseconds.
inline Rational bit_period_from_rate(double rate_hz) {
  if (!(rate_hz > 0.0) || !std::isfinite(rate_hz)) {
    throw ConfigError("serial rate must be > 0");
  }
  const auto hz = static_cast<std::int64_t>(std::llround(rate_hz));
  if (hz <= 0) throw ConfigError("serial rate must be > 0");
  return Rational{1'000'000'000'000LL, hz};
}

// Clock grid with falling edges at round(k * period) and rising edges at
// round((k + 1/2) * period).
class TimeBase {
 public:
  TimeBase() = default;
  explicit TimeBase(Rational period) : period_(period) {}

  Rational period() const { return period_; }
  std::int64_t falling(std::int64_t k) const { return (period_ * k).round(); }
  std::int64_t rising(std::int64_t k) const { return (period_ * (2 * k + 1) / 2).round(); }

  // Index of the falling edge at exactly time t, or -1.
  std::int64_t falling_index(std::int64_t t) const {
    const std::int64_t k = (Rational{t} * period_.den / period_.num).round();
    return falling(k) == t ? k : -1;
  }

  // Round-up of the period; the widest spacing between consecutive edges.
  std::int64_t ceil_period() const { return (period_.num + period_.den - 1) / period_.den; }
  std::int64_t floor_period() const { return period_.floor(); }

 private:
  Rational period_{1};
};

}  // namespace hdmitx
