#include <gtest/gtest.h>

#include <array>
#include <random>

#include "tqnav/earth.hpp"
#include "tqnav/triquat.hpp"

using namespace tqnav;

namespace {

std::mt19937_64& rng() {
  static std::mt19937_64 g(11);
  return g;
}

Vec3 rvec(double s = 1.0) {
  std::normal_distribution<double> n;
  return s * Vec3(n(rng()), n(rng()), n(rng()));
}

Quaternion rquat(bool unit = true) {
  std::normal_distribution<double> n;
  Quaternion q(n(rng()), n(rng()), n(rng()), n(rng()));
  return unit ? q.normalized() : q;
}

NavState rnav(double v = 10.0, double r = 100.0) {
  NavState s;
  s.q_eb = rquat();
  s.v_prime = rvec(v);
  s.r_e = rvec(r);
  return s;
}

double diff(const Quaternion& a, const Quaternion& b) { return (a.coeffs() - b.coeffs()).cwiseAbs().maxCoeff(); }
double diff(const TridentQuaternion& a, const TridentQuaternion& b) {
  return std::max({diff(a.real, b.real), diff(a.eps1, b.eps1), diff(a.eps2, b.eps2)});
}

// Truncated polynomial in commuting nilpotent units: term[k] multiplies 1, e1, e2.
TridentQuaternion poly_mul(const TridentQuaternion& a, const TridentQuaternion& b) {
  const std::array<Quaternion, 3> ta{a.real, a.eps1, a.eps2}, tb{b.real, b.eps1, b.eps2};
  // monomial degrees (e1, e2)
  const std::array<std::array<int, 2>, 3> deg{{{0, 0}, {1, 0}, {0, 1}}};
  std::array<Quaternion, 3> out{Quaternion::zero(), Quaternion::zero(), Quaternion::zero()};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const int d1 = deg[i][0] + deg[j][0], d2 = deg[i][1] + deg[j][1];
      if (d1 + d2 > 1) continue;  // e1^2 = e2^2 = e1 e2 = 0
      const int k = d1 == 1 ? 1 : (d2 == 1 ? 2 : 0);
      out[k] += ta[i] * tb[j];
    }
  return {out[0], out[1], out[2]};
}

}  // namespace

TEST(TridentAlgebra, IdentityIsNeutral) {
  const TridentQuaternion x{rquat(false), rquat(false), rquat(false)};
  EXPECT_EQ(diff(tq_mul(TridentQuaternion::identity(), x), x), 0.0);
  EXPECT_EQ(diff(tq_mul(x, TridentQuaternion::identity()), x), 0.0);
}

TEST(TridentAlgebra, NilpotentFirstSlot) {
  const TridentQuaternion a{Quaternion::zero(), rquat(false), Quaternion::zero()};
  const TridentQuaternion b{Quaternion::zero(), rquat(false), Quaternion::zero()};
  const TridentQuaternion p = tq_mul(a, b);
  EXPECT_EQ(diff(p, {Quaternion::zero(), Quaternion::zero(), Quaternion::zero()}), 0.0);
}

TEST(TridentAlgebra, ProductMatchesTruncatedPolynomial) {
  for (int i = 0; i < 200; ++i) {
    const TridentQuaternion a{rquat(false), rquat(false), rquat(false)};
    const TridentQuaternion b{rquat(false), rquat(false), rquat(false)};
    EXPECT_LT(diff(tq_mul(a, b), poly_mul(a, b)), 1e-13);
  }
}

TEST(TridentAlgebra, Conjugate) {
  EXPECT_EQ(diff(tq_conj(TridentQuaternion::identity()), TridentQuaternion::identity()), 0.0);
  const TridentQuaternion a{rquat(false), rquat(false), rquat(false)};
  EXPECT_EQ(diff(tq_conj(tq_conj(a)), a), 0.0);
  // pose instance at earth scale
  NavState s = rnav(300.0);
  s.r_e = lla_to_ecef({0.7, -1.2, 300.0});
  const TridentQuaternion t = tq_from_nav(s);
  EXPECT_LT(diff(tq_mul(t, tq_conj(t)), TridentQuaternion::identity()), 1e-9);
}

TEST(TridentPacking, ZeroTranslationGivesZeroSlots) {
  NavState s;
  s.q_eb = rquat();
  const TridentQuaternion t = tq_from_nav(s);
  EXPECT_EQ(t.eps1.coeffs(), Vec4::Zero());
  EXPECT_EQ(t.eps2.coeffs(), Vec4::Zero());
}

TEST(TridentPacking, HalfPositionInSecondSlot) {
  NavState s;
  s.r_e = Vec3(2, 0, 0);
  EXPECT_EQ(tq_from_nav(s).eps2.coeffs(), Vec4(0, 1, 0, 0));
}

TEST(TridentPacking, RoundTrip) {
  for (int i = 0; i < 100; ++i) {
    const NavState s = rnav();
    NavState back = tq_to_nav(tq_from_nav(s));
    if (back.q_eb.w * s.q_eb.w < 0) back.q_eb = -back.q_eb;
    EXPECT_LT(diff(back.q_eb, s.q_eb), 1e-12);
    EXPECT_LT((back.v_prime - s.v_prime).norm(), 1e-12 * 10.0);
    EXPECT_LT((back.r_e - s.r_e).norm(), 1e-12 * 100.0);
  }
}

TEST(TridentPacking, UnitGivesZeroState) {
  const NavState s = tq_to_nav(TridentQuaternion::identity());
  EXPECT_EQ(s.q_eb.coeffs(), Vec4(1, 0, 0, 0));
  EXPECT_EQ(s.v_prime, Vec3::Zero());
  EXPECT_EQ(s.r_e, Vec3::Zero());
}

TEST(TridentPacking, BodyFrameForm) {
  for (int i = 0; i < 100; ++i) {
    const NavState s = rnav();
    const Mat3 ct = s.c_be().transpose();
    TridentQuaternion body{s.q_eb, 0.5 * (s.q_eb * Quaternion::pure(ct * s.v_prime)),
                           0.5 * (s.q_eb * Quaternion::pure(ct * s.r_e))};
    const NavState back = tq_to_nav(body);
    EXPECT_LT((back.v_prime - s.v_prime).norm(), 1e-12 * 10.0);
    EXPECT_LT((back.r_e - s.r_e).norm(), 1e-12 * 100.0);
  }
}

TEST(TridentPacking, RejectsNonPose) {
  TridentQuaternion t = TridentQuaternion::identity();
  t.eps1.w = 0.3;
  EXPECT_FALSE(is_pose(t));
  EXPECT_THROW(tq_to_nav(t), InvalidInput);
  EXPECT_TRUE(is_pose(tq_normalize(t)));
}

TEST(TridentKinematics, ZeroTwistsZeroDerivative) {
  const TridentQuaternion t = tq_from_nav(rnav());
  const TridentQuaternion d = tq_dot(t, {}, {});
  EXPECT_EQ(diff(d, {Quaternion::zero(), Quaternion::zero(), Quaternion::zero()}), 0.0);
}

TEST(TridentKinematics, StaticBodyKeepsNorm) {
  const EarthParams earth;
  const NavState s = rnav(0.0, 0.0);
  const Vec3 w_ib = s.c_be().transpose() * earth.omega_vec();
  const TwistPair tw = twists_first_type(w_ib, Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), earth.omega_ie);
  const Quaternion qd = tq_dot(tq_from_nav(s), tw.body, tw.earth).real;
  EXPECT_LT(std::abs(s.q_eb.coeffs().dot(qd.coeffs())), 1e-12);
  EXPECT_LT(qd.coeffs().norm(), 1e-12);  // static: attitude constant in the e-frame
}

TEST(TridentKinematics, SlotsMatchExpandedDynamics) {
  const EarthParams earth;
  const Vec3 w = earth.omega_vec();
  for (int i = 0; i < 50; ++i) {
    const NavState s = rnav(20.0, 1e6);
    const Vec3 w_ib = rvec(0.1), f = rvec(5.0), g = rvec(9.8);
    const TwistPair tw = twists_first_type(w_ib, f, g, s.v_prime, earth.omega_ie);
    const TridentQuaternion d = tq_dot(tq_from_nav(s), tw.body, tw.earth);

    const Quaternion qd = 0.5 * (s.q_eb * Quaternion::pure(w_ib)) - 0.5 * (Quaternion::pure(w) * s.q_eb);
    const Vec3 vdot = s.c_be() * f + g - w.cross(s.v_prime);
    const Vec3 rdot = s.v_prime - w.cross(s.r_e);
    const Quaternion e1 = 0.5 * (Quaternion::pure(vdot) * s.q_eb) + 0.5 * (Quaternion::pure(s.v_prime) * qd);
    const Quaternion e2 = 0.5 * (Quaternion::pure(rdot) * s.q_eb) + 0.5 * (Quaternion::pure(s.r_e) * qd);
    EXPECT_LT(diff(d.real, qd), 1e-12);
    EXPECT_LT(diff(d.eps1, e1), 1e-12 * 20.0);
    EXPECT_LT(diff(d.eps2, e2), 1e-12 * 1e3);
  }
}

TEST(TridentKinematics, FirstTypeTwistsAtRest) {
  const TwistPair tw = twists_first_type(Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), 7.292115e-5);
  EXPECT_EQ(tw.body.eps1, Vec3::Zero());
  EXPECT_EQ(tw.body.eps2, Vec3::Zero());
  EXPECT_EQ(tw.earth.real, Vec3(0, 0, 7.292115e-5));
}

TEST(TridentKinematics, TwistResidualVanishes) {
  for (int i = 0; i < 50; ++i) {
    const NavState s = rnav();
    const Vec3 w_ib = rvec(0.1), f = rvec(5.0), g = rvec(9.8);
    const TwistPair t1 = twists_first_type(w_ib, f, g, s.v_prime, 7.292115e-5);
    const TwistPair t2 = twists_second_type(w_ib, f, g, s.v_prime, s.q_eb, 7.292115e-5);
    for (const TwistPair* t : {&t1, &t2}) {
      const Quaternion res = s.q_eb * Quaternion::pure(t->body.eps2) - Quaternion::pure(t->earth.eps2) * s.q_eb -
                             Quaternion::pure(s.v_prime) * s.q_eb;
      EXPECT_LT(res.coeffs().norm(), 1e-12 * 10.0);
    }
    const TridentQuaternion x = tq_from_nav(s);
    EXPECT_LT(diff(tq_dot(x, t1.body, t1.earth), tq_dot(x, t2.body, t2.earth)), 1e-12 * 100.0);
  }
}

TEST(TridentError, ZeroForEqualStates) {
  const TridentQuaternion t = tq_from_nav(rnav());
  for (Side side : {Side::Left, Side::Right}) {
    const ErrorTriple e = tq_error(side, t, t);
    EXPECT_LT(e.att.norm() + e.vel.norm() + e.pos.norm(), 1e-12);
  }
}

TEST(TridentError, LeftPositionSign) {
  // delta r = r_hat - r = (eps, 0, 0)
  const double eps = 1e-4;
  NavState est;
  est.r_e = Vec3(10, 20, 30);
  NavState truth = est;
  truth.r_e.x() -= eps;
  const ErrorTriple e = tq_error_left(tq_from_nav(est), tq_from_nav(truth));
  EXPECT_NEAR(e.pos.x(), -eps, 1e-12);
  EXPECT_NEAR(e.pos.y(), 0.0, 1e-12);
  EXPECT_NEAR(e.pos.z(), 0.0, 1e-12);
}

TEST(TridentError, RightPureTranslation) {
  NavState est = rnav();
  NavState truth = est;
  const Vec3 dr(1e-3, -2e-3, 5e-4);
  truth.r_e = est.r_e - dr;
  const ErrorTriple e = tq_error_right(tq_from_nav(est), tq_from_nav(truth));
  EXPECT_LT((e.pos + dr).norm(), 1e-12);
  EXPECT_LT(e.att.norm(), 1e-15);
}

// Closed forms with delta x = x_hat - x and C_hat = exp(dtheta x) C:
// left  (-C^T dtheta, -C^T dv', -C^T dr)
// right (-dtheta, -dv' - v' x dtheta, -dr - r x dtheta)
TEST(TridentError, ClosedFormsToFirstOrder) {
  for (int i = 0; i < 50; ++i) {
    const NavState est = rnav(10.0, 10.0);
    const double eps = 1e-3;
    const Vec3 dth = rvec(eps), dv = rvec(eps), dr = rvec(eps);
    NavState truth;
    truth.q_eb = Quaternion::from_rotation_vector(-dth) * est.q_eb;
    truth.v_prime = est.v_prime - dv;
    truth.r_e = est.r_e - dr;
    const Mat3 ct = est.c_be().transpose();
    const ErrorTriple l = tq_error_left(tq_from_nav(est), tq_from_nav(truth));
    const ErrorTriple r = tq_error_right(tq_from_nav(est), tq_from_nav(truth));
    const double tol = 1e-5;
    EXPECT_LT((l.att + ct * dth).norm(), tol);
    EXPECT_LT((l.vel + ct * dv).norm(), tol);
    EXPECT_LT((l.pos + ct * dr).norm(), tol);
    EXPECT_LT((r.att + dth).norm(), tol);
    EXPECT_LT((r.vel + dv + est.v_prime.cross(dth)).norm(), tol);
    EXPECT_LT((r.pos + dr + est.r_e.cross(dth)).norm(), tol);
  }
}

TEST(TridentInject, ZeroDeltaIsIdentity) {
  const TridentQuaternion t = tq_from_nav(rnav());
  for (Side side : {Side::Left, Side::Right})
    EXPECT_LT(diff(tq_inject(t, {}, side), t), 1e-15 * 100.0);
}

TEST(TridentInject, InjectThenExtract) {
  for (int i = 0; i < 100; ++i) {
    const TridentQuaternion t = tq_from_nav(rnav());
    const ErrorTriple d{rvec(1e-4), rvec(1e-4), rvec(1e-4)};
    for (Side side : {Side::Left, Side::Right}) {
      const ErrorTriple back = tq_error(side, t, tq_inject(t, d, side));
      EXPECT_LT((back.att - d.att).norm(), 1e-8);
      EXPECT_LT((back.vel - d.vel).norm(), 1e-8);
      EXPECT_LT((back.pos - d.pos).norm(), 1e-8);
    }
  }
}

// The injected state is the one the error describes: with the position part
// C (r - r_hat), injecting c at identity attitude moves r by +c.
TEST(TridentInject, LeftPositionShift) {
  NavState s;
  s.r_e = Vec3(1, 2, 3);
  const Vec3 c(0.01, -0.02, 0.03);
  const NavState out = tq_to_nav(tq_inject(tq_from_nav(s), {Vec3::Zero(), Vec3::Zero(), c}, Side::Left));
  EXPECT_LT((out.r_e - (s.r_e + c)).norm(), 1e-12);
}

TEST(TridentExp, MatchesSeries) {
  const TridentTwist x{Vec3(0.2, -0.1, 0.3), Vec3(1.0, 2.0, -0.5), Vec3(-3.0, 0.4, 1.0)};
  // exp via 30-term series of the trident product
  TridentQuaternion term = TridentQuaternion::identity(), sum = term;
  const TridentQuaternion xq = tq_from_twist(x);
  for (int k = 1; k < 30; ++k) {
    term = tq_scale(tq_mul(term, xq), 1.0 / k);
    sum = tq_add(sum, term);
  }
  EXPECT_LT(diff(tq_exp(x), sum), 1e-14);
}
