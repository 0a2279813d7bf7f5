#pragma once

#include <cmath>
#include <numbers>

namespace qeraser {

inline constexpr double kPi = std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// Unit 2-vector (cos a, sin a) used for phase clocks and polarization pairs.
struct UnitVec2 {
  double c = 1.0;
  double s = 0.0;

  static UnitVec2 from_radians(double a) { return {std::cos(a), std::sin(a)}; }

  // Exact at multiples of 90 degrees so that zero-weight message components
  // come out as exact zeros.
  static UnitVec2 from_degrees(double deg);

  UnitVec2 rotated(double a) const { return rotated(from_radians(a)); }

  UnitVec2 rotated(const UnitVec2& r) const {
    return {c * r.c - s * r.s, c * r.s + s * r.c};
  }

  double norm() const { return std::hypot(c, s); }
  double angle() const { return std::atan2(s, c); }
};

}  // namespace qeraser
