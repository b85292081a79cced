#include <gtest/gtest.h>

#include <random>

#include "tqnav/earth.hpp"

using namespace tqnav;

namespace {

// Somigliana normal gravity on the WGS-84 ellipsoid.
double normal_gravity(double lat) {
  const double s2 = std::sin(lat) * std::sin(lat);
  const double e2 = 6.69437999014e-3;
  return 9.7803253359 * (1.0 + 1.931852652458e-3 * s2) / std::sqrt(1.0 - e2 * s2);
}

}  // namespace

TEST(Gravity, EquatorMagnitudeAndDirection) {
  const Vec3 r(6378137.0, 0, 0);
  const Vec3 g = gravitation_e(r);
  EXPECT_GT(g.norm(), 9.7);
  EXPECT_LT(g.norm(), 9.9);
  EXPECT_GT(-g.normalized().dot(r.normalized()), std::cos(0.6 * M_PI / 180.0));
}

TEST(Gravity, InverseSquareScaling) {
  const Vec3 r = lla_to_ecef({0.4, 1.0, 0.0});
  const double ratio = gravitation_e(2.0 * r).norm() / gravitation_e(r).norm();
  EXPECT_NEAR(ratio, 0.25, 0.25 * 0.01);
}

TEST(Gravity, PlumbLineAt45Degrees) {
  const GeoPosition p{M_PI / 4, 0.3, 0.0};
  EXPECT_NEAR(gravity_e(lla_to_ecef(p)).norm(), normal_gravity(p.latitude), 1e-2);
}

TEST(Gravity, RejectsCentre) {
  EXPECT_THROW(gravitation_e(Vec3(1.0, 0, 0)), std::domain_error);
}

TEST(GravityGradient, Magnitude) {
  const Mat3 d = gravity_gradient(lla_to_ecef({0.2, -0.7, 0.0}));
  EXPECT_LE(d.cwiseAbs().maxCoeff(), 2 * 9.8 / 6.4e6 * 1.01);
}

TEST(GravityGradient, RadialResponse) {
  const Vec3 r = lla_to_ecef({0.9, 2.0, 100.0});
  const Vec3 g = gravitation_e(r);
  const double dr = 0.5;
  const Vec3 dg = gravity_gradient(r) * (dr * r.normalized());
  EXPECT_GT(-dg.normalized().dot(g.normalized()), 0.0);
  EXPECT_LT((dg.normalized() + g.normalized()).norm(), 1e-12);  // antiparallel to g
  EXPECT_NEAR(dg.norm(), 2 * g.norm() * dr / r.norm(), 2e-3 * dg.norm());
}

// Only the radial derivative is represented by the rank-one form; compare that column.
TEST(GravityGradient, RadialFiniteDifference) {
  const Vec3 r = lla_to_ecef({0.5, 0.5, 0.0});
  const Vec3 u = r.normalized();
  const double h = 10.0;
  const Vec3 fd = (gravitation_e(r + h * u) - gravitation_e(r - h * u)) / (2 * h);
  const Vec3 an = gravity_gradient(r) * u;
  EXPECT_LT((fd - an).norm() / fd.norm(), 0.2);
}

TEST(GravityGradient, RankOne) {
  const Mat3 d = gravity_gradient(lla_to_ecef({-0.3, 0.1, 500.0}));
  const Eigen::JacobiSVD<Mat3> svd(d);
  EXPECT_LT(svd.singularValues()(1), 1e-18);
}

TEST(Frames, SkewIdentities) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n;
  for (int i = 0; i < 100; ++i) {
    const Vec3 a(n(rng), n(rng), n(rng)), b(n(rng), n(rng), n(rng));
    EXPECT_LT((skew(a.cross(b)) - (skew(a) * skew(b) - skew(b) * skew(a))).cwiseAbs().maxCoeff(), 1e-13);
  }
  const Mat3 w = skew(EarthParams{}.omega_vec());
  EXPECT_EQ(w + w.transpose(), Mat3::Zero());
}

TEST(Frames, UpAtOrigin) {
  const Mat3 c = c_en(0.0, 0.0);
  EXPECT_LT((c.col(1) - Vec3(1, 0, 0)).norm(), 1e-15);
  EXPECT_LT((c.col(0) - Vec3(0, 0, 1)).norm(), 1e-15);  // north
  EXPECT_LT((c.col(2) - Vec3(0, 1, 0)).norm(), 1e-15);  // east
}

TEST(Frames, Orthonormal) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> lat(-M_PI / 2, M_PI / 2), lon(-M_PI, M_PI);
  for (int i = 0; i < 100; ++i) {
    const Mat3 c = c_en(lat(rng), lon(rng));
    EXPECT_LT((c.transpose() * c - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(c.determinant(), 1.0, 1e-12);
  }
}

TEST(Frames, UpIsEllipsoidNormal) {
  // moving along Up changes only the height
  const GeoPosition p{0.6, -1.1, 20.0};
  const Vec3 r = lla_to_ecef(p) + 5.0 * c_en(p).col(1);
  const GeoPosition q = ecef_to_lla(r);
  EXPECT_NEAR(q.latitude, p.latitude, 1e-12);
  EXPECT_NEAR(q.longitude, p.longitude, 1e-12);
  EXPECT_NEAR(q.height, 25.0, 1e-6);
}

TEST(Geodetic, KnownPoints) {
  const EarthParams e;
  EXPECT_LT((lla_to_ecef({0, 0, 0}) - Vec3(e.semi_major, 0, 0)).norm(), 1e-9);
  EXPECT_LT((lla_to_ecef({M_PI / 2, 0, 0}) - Vec3(0, 0, e.semi_minor())).norm(), 1e-6);
  EXPECT_LT((lla_to_ecef({-M_PI / 2, 0.4, 0}) - Vec3(0, 0, -e.semi_minor())).norm(), 1e-6);
}

TEST(Geodetic, RoundTrip) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> lat(-M_PI / 2, M_PI / 2), lon(-M_PI, M_PI), h(-500, 10000);
  for (int i = 0; i < 500; ++i) {
    const GeoPosition p{lat(rng), lon(rng), h(rng)};
    const Vec3 r = lla_to_ecef(p);
    EXPECT_LT((lla_to_ecef(ecef_to_lla(r)) - r).norm(), 1e-6);
  }
}

TEST(Earth, Validate) {
  EXPECT_NO_THROW(EarthParams{}.validate());
  EarthParams e;
  e.omega_ie = 0.0;
  EXPECT_THROW(e.validate(), std::invalid_argument);
  e = EarthParams{};
  e.semi_major = 1e6;
  EXPECT_THROW(e.validate(), std::invalid_argument);
}
