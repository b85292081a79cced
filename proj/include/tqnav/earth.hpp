#pragma once

#include <stdexcept>

#include "tqnav/quaternion.hpp"

namespace tqnav {

/// WGS-84 ellipsoid with a J2 gravitation model.
struct EarthParams {
  double omega_ie{7.292115e-5};        // rad/s
  double semi_major{6378137.0};        // m
  double flattening{1.0 / 298.257223563};
  double gm{3.986004418e14};           // m^3/s^2
  double j2{1.082627e-3};

  double semi_minor() const { return semi_major * (1.0 - flattening); }
  double ecc2() const { return flattening * (2.0 - flattening); }
  Vec3 omega_vec() const { return {0.0, 0.0, omega_ie}; }
  void validate() const;
};

struct GeoPosition {
  double latitude{0.0};   // rad
  double longitude{0.0};  // rad
  double height{0.0};     // m
};

/// Mass attraction only (no centrifugal term), e-frame, m/s^2.
Vec3 gravitation_e(const Vec3& r_e, const EarthParams& earth = {});
/// Gravitation plus centrifugal acceleration, i.e. what a plumb line feels.
Vec3 gravity_e(const Vec3& r_e, const EarthParams& earth = {});

/// Ellipsoid radius at the geocentric latitude of r_e.
double geocentric_radius(const Vec3& r_e, const EarthParams& earth = {});

/// Rank-one approximation dg/dr = -2 g r^T / (r_eS |r|).
Mat3 gravity_gradient(const Vec3& r_e, const EarthParams& earth = {});

/// Columns are the North, Up and East axes in e-frame coordinates.
Mat3 c_en(const GeoPosition& geo);
Mat3 c_en(double latitude, double longitude);

Vec3 lla_to_ecef(const GeoPosition& geo, const EarthParams& earth = {});
GeoPosition ecef_to_lla(const Vec3& r_e, const EarthParams& earth = {});

}  // namespace tqnav
