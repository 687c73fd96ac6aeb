#pragma once

// Points of the built-in phase spaces: the flat 2-torus, the hair attached to
// it, and the circle.
//
// Periodic coordinates are held as 128-bit fixed-point fractions of a period
// (a `Phase`). Integer matrices and rotations act on them without rounding,
// which keeps orbits of nearby points separable down to ~1e-38.

#include <compare>
#include <cstdint>
#include <string>

namespace lyap {

using u128 = unsigned __int128;
using i128 = __int128;
using quad = __float128;

/// Element of R/Z stored as raw / 2^128.
class Phase {
 public:
  constexpr Phase() = default;

  static constexpr Phase from_raw(u128 raw) {
    Phase p;
    p.raw_ = raw;
    return p;
  }
  /// Reduces x mod 1.
  static Phase from_double(double x);
  static Phase from_quad(quad x);

  constexpr u128 raw() const { return raw_; }
  /// Value in [0, 1).
  double value() const;

  /// Adds a small signed offset (|offset| < 1/2) at full fixed-point resolution.
  Phase shifted(double offset) const;
  Phase shifted(quad offset) const;

  friend constexpr Phase operator+(Phase a, Phase b) { return from_raw(a.raw_ + b.raw_); }
  friend constexpr Phase operator-(Phase a, Phase b) { return from_raw(a.raw_ - b.raw_); }
  friend constexpr bool operator==(Phase a, Phase b) = default;

  /// Multiplication by an integer is exact mod 1.
  friend constexpr Phase operator*(std::int64_t m, Phase a) {
    return from_raw(static_cast<u128>(static_cast<i128>(m)) * a.raw_);
  }

 private:
  u128 raw_ = 0;
};

/// a - b as the representative in [-1/2, 1/2).
double signed_gap(Phase a, Phase b);

enum class Chart { Torus2, Hair, Circle };

const char* chart_name(Chart c);

class Point {
 public:
  Point() = default;

  static Point torus(double u, double v);
  static Point torus(Phase u, Phase v);
  /// Hair parameter t; must be finite.
  static Point hair(double t);
  /// Angle in radians, reduced into [0, 2*pi).
  static Point circle(double theta);
  static Point circle(Phase turn);

  Chart chart() const { return chart_; }

  Phase pu() const { return a_; }
  Phase pv() const { return b_; }
  double u() const { return a_.value(); }
  double v() const { return b_.value(); }

  double t() const { return t_; }

  Phase turn() const { return a_; }
  double theta() const;

  /// Compact label without commas, safe for CSV cells, e.g. "torus[0.1;0.2]".
  std::string label() const;

  friend bool operator==(const Point&, const Point&) = default;

 private:
  Chart chart_ = Chart::Torus2;
  Phase a_{};
  Phase b_{};
  double t_ = 0.0;
};

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace lyap
