#pragma once

#include <cmath>

namespace tabletop {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Normalize to the canonical interval (-180, 180].
inline double normalize_deg(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r > 180.0) {
    r -= 360.0;
  } else if (r <= -180.0) {
    r += 360.0;
  }
  // fmod can return -0.0; keep serialized output tidy
  return r == 0.0 ? 0.0 : r;
}

}  // namespace tabletop
