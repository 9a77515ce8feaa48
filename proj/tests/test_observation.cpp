#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "multitrack/observation.hpp"

using namespace multitrack;

namespace {

// Geometry oracle: local up is the station radial direction, east is
// z x up, north is up x east.
Measurement oracle_observe(const Vec3& object, const GroundStation& st, double t) {
  const Vec3 station = station_state_inertial(st, t);
  const Vec3 up = station * (1.0 / norm(station));
  Vec3 east = cross(Vec3 {0, 0, 1}, up);
  east = east * (1.0 / norm(east));
  const Vec3 north = cross(up, east);
  const Vec3 rho = object - station;
  const double horiz = std::hypot(dot(rho, east), dot(rho, north));
  return {std::atan2(dot(rho, up), horiz), std::atan2(dot(rho, east), dot(rho, north)), t};
}

StateVector at(const Vec3& p, double t) { return {p, {0, 0, 0}, t}; }

const Uncertainty kSigma {deg2rad(0.01), deg2rad(0.01)};

}  // namespace

TEST(Station, EquatorPrimeMeridianAtEpoch) {
  const GroundStation st {0.0, 0.0};
  const Vec3 p = station_state_inertial(st, 0.0);
  EXPECT_NEAR(p.x, kEarthRadius, 1e-12);
  EXPECT_NEAR(p.y, 0.0, 1e-12);
  EXPECT_NEAR(p.z, 0.0, 1e-12);
}

TEST(Station, FullRotationReturns) {
  const GroundStation st {deg2rad(12.0), deg2rad(45.0)};
  const Vec3 a = station_state_inertial(st, 0.0);
  const Vec3 b = station_state_inertial(st, kTwoPi / st.earth_rotation_rate);
  EXPECT_LT(norm(a - b), 1e-9);
}

TEST(Station, LatitudeSetsHeight) {
  const GroundStation st {0.0, deg2rad(45.0)};
  EXPECT_NEAR(station_state_inertial(st, 0.0).z, kEarthRadius * std::sin(deg2rad(45.0)), 1e-12);
}

TEST(Station, RejectsBadLatitude) {
  EXPECT_THROW(validate(GroundStation {0.0, deg2rad(100.0)}), std::invalid_argument);
}

TEST(Observe, ZenithUnderEquatorialStation) {
  const GroundStation st {0.0, 0.0};
  const double t = 3600.0;
  const double lon = station_sidereal_angle(st, t);
  const Vec3 geo {kGeoRadius * std::cos(lon), kGeoRadius * std::sin(lon), 0.0};
  const Pointing p = point(at(geo, t), st);
  EXPECT_TRUE(p.zenith);
  EXPECT_NEAR(p.measurement.elevation, kPi / 2, 1e-12);
  EXPECT_EQ(p.measurement.azimuth, 0.0);
}

TEST(Observe, EquatorialObjectSeenDueSouthFromMidLatitude) {
  const double phi = deg2rad(45.0);
  const GroundStation st {0.0, phi};
  const Vec3 obj {kGeoRadius, 0.0, 0.0};
  const Measurement z = observe(at(obj, 0.0), st);
  // meridian-plane geometry
  const double alpha = std::atan2(kGeoRadius * std::cos(phi) - kEarthRadius, kGeoRadius * std::sin(phi));
  EXPECT_NEAR(z.elevation, alpha, 1e-12);
  EXPECT_NEAR(std::abs(z.azimuth), kPi, 1e-12);
  const Measurement o = oracle_observe(obj, st, 0.0);
  EXPECT_NEAR(z.elevation, o.elevation, 1e-12);
}

TEST(Observe, BelowHorizonOnFarSide) {
  const GroundStation st {0.0, deg2rad(45.0)};
  EXPECT_LT(observe(at({-kGeoRadius, 0.0, 0.0}, 0.0), st).elevation, 0.0);
}

TEST(Observe, MatchesGeometryOracle) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> lon(-kPi, kPi), lat(-1.4, 1.4), r(7000, 90000),
      u(-1, 1), t(0, 3e5);
  for(int k = 0; k < 500; ++k) {
    const GroundStation st {lon(gen), lat(gen)};
    Vec3 dir {u(gen), u(gen), u(gen)};
    dir = dir * (1.0 / norm(dir));
    const Vec3 obj = dir * r(gen);
    const double tk = t(gen);
    const Measurement z = observe(at(obj, tk), st);
    const Measurement o = oracle_observe(obj, st, tk);
    ASSERT_NEAR(z.elevation, o.elevation, 1e-11);
    ASSERT_LT(std::abs(wrap_angle(z.azimuth - o.azimuth)), 1e-9);
    ASSERT_EQ(z.epoch, tk);
    ASSERT_GT(z.azimuth, -kPi);
    ASSERT_LE(z.azimuth, kPi);
  }
}

TEST(Observe, RotationConsistency) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for(int k = 0; k < 100; ++k) {
    GroundStation st {ang(gen), deg2rad(45.0)};
    const Vec3 obj {30000.0 + 1000 * ang(gen), 20000.0, 500.0 * ang(gen)};
    const double beta = ang(gen);
    const Measurement a = observe(at(obj, 100.0), st);
    st.rotation_epoch_angle += beta;
    const Measurement b = observe(at(rotate_z(obj, beta), 100.0), st);
    EXPECT_NEAR(a.elevation, b.elevation, 1e-12);
    EXPECT_LT(std::abs(wrap_angle(a.azimuth - b.azimuth)), 1e-12);
  }
}

TEST(Observe, RejectsObjectAtStation) {
  const GroundStation st {0.0, 0.0};
  EXPECT_THROW(observe(at(station_state_inertial(st, 0.0), 0.0), st), std::invalid_argument);
}

TEST(WeightedNorm, Examples) {
  EXPECT_EQ(weighted_norm({0.0, 0.0}, kSigma), 0.0);
  EXPECT_NEAR(weighted_norm({kSigma.elevation, kSigma.azimuth}, kSigma), 2.0, 1e-12);
  EXPECT_NEAR(weighted_norm({deg2rad(1.0), 0.0}, kSigma), 10000.0, 1e-8);
}

TEST(WeightedNorm, UnequalSigmas) {
  const Uncertainty s {0.5, 2.0};
  EXPECT_NEAR(weighted_norm({1.0, 1.0}, s), 4.0 + 0.25, 1e-15);
}

TEST(WeightedNorm, NonNegativeAndZeroOnlyAtWrappedZero) {
  EXPECT_NEAR(weighted_norm({0.0, kTwoPi}, kSigma), 0.0, 1e-12);
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> U(-10, 10);
  for(int k = 0; k < 1000; ++k) ASSERT_GE(weighted_norm({U(gen), U(gen)}, kSigma), 0.0);
}

TEST(AssignmentCost, HandExample) {
  const Measurement z {deg2rad(30.02), deg2rad(-10.01), 5.0};
  const Measurement y {deg2rad(30.0), deg2rad(-10.0), 5.0};
  EXPECT_NEAR(assignment_cost(z, y, kSigma), 5.0, 1e-9);
}

TEST(AssignmentCost, SymmetricAndZeroOnSelf) {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> el(-1.5, 1.5), az(-kPi, kPi);
  for(int k = 0; k < 200; ++k) {
    const Measurement z {el(gen), az(gen), 1.0}, y {el(gen), az(gen), 1.0};
    EXPECT_EQ(assignment_cost(z, z, kSigma), 0.0);
    EXPECT_NEAR(assignment_cost(z, y, kSigma), assignment_cost(y, z, kSigma),
                1e-12 * assignment_cost(z, y, kSigma));
  }
}

TEST(AssignmentCost, AzimuthSeamWraps) {
  const Measurement z {0.3, deg2rad(179.0), 0.0}, y {0.3, deg2rad(-179.0), 0.0};
  // 2 degrees = 200 sigma
  EXPECT_NEAR(assignment_cost(z, y, kSigma), 200.0 * 200.0, 1e-6);
}

TEST(AssignmentCost, EpochMismatchIsLogicError) {
  EXPECT_THROW(assignment_cost({0, 0, 1.0}, {0, 0, 2.0}, kSigma), std::logic_error);
}

TEST(UncertaintyProfile, RejectsNonPositive) {
  EXPECT_THROW(validate(Uncertainty {0.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(validate(Uncertainty {1.0, -1.0}), std::invalid_argument);
}
