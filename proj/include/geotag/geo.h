#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

namespace geotag {

inline constexpr double kEarthRadiusKm = 6371.0;

struct Coordinates {
  double latitude = 0.0;   // degrees
  double longitude = 0.0;  // degrees

  friend bool operator==(const Coordinates&, const Coordinates&) = default;
};

bool valid_coordinates(double latitude, double longitude);

template <typename Scalar>
Scalar degrees_to_radians(Scalar degrees) {
  return degrees * std::numbers::pi_v<Scalar> / Scalar(180);
}

// Spherical law of cosines on a sphere of the mean Earth radius:
//   R * acos(sin(lat_a) sin(lat_b) + cos(lat_a) cos(lat_b) cos(lon_a - lon_b))
// with the acos argument clamped to [-1, 1]. Identical points give exactly 0.
template <typename Scalar>
Scalar great_circle_distance(Scalar lat_a, Scalar lon_a, Scalar lat_b, Scalar lon_b) {
  if (lat_a == lat_b && lon_a == lon_b) return Scalar(0);
  const Scalar pa = degrees_to_radians(lat_a);
  const Scalar pb = degrees_to_radians(lat_b);
  const Scalar dl = degrees_to_radians(lon_a - lon_b);
  using std::acos;
  using std::cos;
  using std::sin;
  Scalar arg = sin(pa) * sin(pb) + cos(pa) * cos(pb) * cos(dl);
  arg = std::clamp(arg, Scalar(-1), Scalar(1));
  return Scalar(kEarthRadiusKm) * acos(arg);
}

inline double great_circle_distance(const Coordinates& a, const Coordinates& b) {
  return great_circle_distance(a.latitude, a.longitude, b.latitude, b.longitude);
}

}  // namespace geotag
