#include "tqnav/earth.hpp"

#include <cmath>

namespace tqnav {

namespace {

void check_radius(const Vec3& r_e) {
  if (!(r_e.norm() > 1e6)) throw std::domain_error("position too close to the earth centre for the gravity model");
}

}  // namespace

void EarthParams::validate() const {
  if (!(omega_ie > 0.0)) throw std::invalid_argument("earth.omega_ie must be positive");
  if (!(semi_major > 6e6)) throw std::invalid_argument("earth.semi_major must exceed 6e6 m");
  if (!(flattening >= 0.0 && flattening < 0.1)) throw std::invalid_argument("earth.flattening out of range");
  if (!(gm > 0.0)) throw std::invalid_argument("earth.gm must be positive");
}

Vec3 gravitation_e(const Vec3& r_e, const EarthParams& earth) {
  check_radius(r_e);
  const double r = r_e.norm();
  const double zr2 = (r_e.z() / r) * (r_e.z() / r);
  const double k = 1.5 * earth.j2 * (earth.semi_major / r) * (earth.semi_major / r);
  const Vec3 term(r_e.x() * (1.0 + k * (1.0 - 5.0 * zr2)), r_e.y() * (1.0 + k * (1.0 - 5.0 * zr2)),
                  r_e.z() * (1.0 + k * (3.0 - 5.0 * zr2)));
  return -earth.gm / (r * r * r) * term;
}

Vec3 gravity_e(const Vec3& r_e, const EarthParams& earth) {
  const Vec3 w = earth.omega_vec();
  return gravitation_e(r_e, earth) - w.cross(w.cross(r_e));
}

double geocentric_radius(const Vec3& r_e, const EarthParams& earth) {
  const double r = r_e.norm();
  const double s = r_e.z() / r;
  const double c2 = 1.0 - s * s;
  const double a = earth.semi_major, b = earth.semi_minor();
  return a * b / std::sqrt(b * b * c2 + a * a * s * s);
}

Mat3 gravity_gradient(const Vec3& r_e, const EarthParams& earth) {
  check_radius(r_e);
  const Vec3 g = gravitation_e(r_e, earth);
  return -2.0 * g * r_e.transpose() / (geocentric_radius(r_e, earth) * r_e.norm());
}

Mat3 c_en(double latitude, double longitude) {
  const double sl = std::sin(latitude), cl = std::cos(latitude);
  const double so = std::sin(longitude), co = std::cos(longitude);
  Mat3 c;
  c.col(0) << -sl * co, -sl * so, cl;
  c.col(1) << cl * co, cl * so, sl;
  c.col(2) << -so, co, 0.0;
  return c;
}

Mat3 c_en(const GeoPosition& geo) { return c_en(geo.latitude, geo.longitude); }

Vec3 lla_to_ecef(const GeoPosition& geo, const EarthParams& earth) {
  const double e2 = earth.ecc2();
  const double sl = std::sin(geo.latitude), cl = std::cos(geo.latitude);
  const double rn = earth.semi_major / std::sqrt(1.0 - e2 * sl * sl);
  return {(rn + geo.height) * cl * std::cos(geo.longitude), (rn + geo.height) * cl * std::sin(geo.longitude),
          (rn * (1.0 - e2) + geo.height) * sl};
}

GeoPosition ecef_to_lla(const Vec3& r_e, const EarthParams& earth) {
  const double e2 = earth.ecc2();
  const double a = earth.semi_major;
  const double p = std::hypot(r_e.x(), r_e.y());
  GeoPosition geo;
  geo.longitude = std::atan2(r_e.y(), r_e.x());
  if (p < 1e-9) {
    geo.latitude = r_e.z() >= 0.0 ? M_PI / 2 : -M_PI / 2;
    geo.height = std::abs(r_e.z()) - earth.semi_minor();
    return geo;
  }
  double lat = std::atan2(r_e.z(), p * (1.0 - e2));
  for (int i = 0; i < 10; ++i) {
    const double sl = std::sin(lat);
    const double rn = a / std::sqrt(1.0 - e2 * sl * sl);
    const double next = std::atan2(r_e.z() + e2 * rn * sl, p);
    const bool done = std::abs(next - lat) < 1e-15;
    lat = next;
    if (done) break;
  }
  const double sl = std::sin(lat), cl = std::cos(lat);
  const double rn = a / std::sqrt(1.0 - e2 * sl * sl);
  geo.latitude = lat;
  // use whichever projection is better conditioned
  geo.height = std::abs(cl) > 0.1 ? p / cl - rn : r_e.z() / sl - rn * (1.0 - e2);
  return geo;
}

}  // namespace tqnav
