#pragma once

// Ground-telescope angle measurements and the weighted deviation between them.

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "orbit.hpp"

namespace multitrack {

inline constexpr double kEarthRotationRate = 7.2921159e-5;   // rad/s, sidereal

// Spherical, non-refracting Earth; geocentric latitude at sea level.
struct GroundStation {
  double longitude {0.0};              // rad, east positive
  double latitude {0.0};               // rad, north positive
  double earth_radius {kEarthRadius};  // km
  double earth_rotation_rate {kEarthRotationRate};
  double rotation_epoch_angle {0.0};   // Earth-fixed x axis vs inertial x axis at t = 0

  friend bool operator==(const GroundStation&, const GroundStation&) = default;
};

inline void validate(const GroundStation& st) {
  if(!(std::abs(st.latitude) <= kPi / 2.0)) {
    std::ostringstream oss;
    oss << "GroundStation: latitude " << rad2deg(st.latitude) << " deg outside [-90, 90]";
    throw std::invalid_argument(oss.str());
  }
  if(!(st.earth_radius > 0.0) || !std::isfinite(st.longitude) ||
     !std::isfinite(st.earth_rotation_rate) || !std::isfinite(st.rotation_epoch_angle)) {
    throw std::invalid_argument("GroundStation: non-finite or non-positive parameter");
  }
}

struct Measurement {
  double elevation {0.0};   // rad, above local horizontal
  double azimuth {0.0};     // rad, from North, positive eastwards, (-pi, pi]
  double epoch {0.0};

  friend bool operator==(const Measurement&, const Measurement&) = default;
};

// Per-component one-sigma uncertainty for one date.
struct Uncertainty {
  double elevation {deg2rad(0.01)};
  double azimuth {deg2rad(0.01)};

  friend bool operator==(const Uncertainty&, const Uncertainty&) = default;
};

inline void validate(const Uncertainty& s) {
  if(!(s.elevation > 0.0) || !(s.azimuth > 0.0) ||
     !std::isfinite(s.elevation) || !std::isfinite(s.azimuth)) {
    throw std::invalid_argument("Uncertainty: sigmas must be positive and finite");
  }
}

// Inertial longitude of the station meridian at time t.
inline double station_sidereal_angle(const GroundStation& st, double t) {
  return st.longitude + st.rotation_epoch_angle + st.earth_rotation_rate * t;
}

inline Vec3 station_state_inertial(const GroundStation& st, double t) {
  const double lon = station_sidereal_angle(st, t);
  const double cl = std::cos(st.latitude);
  return {st.earth_radius * cl * std::cos(lon),
          st.earth_radius * cl * std::sin(lon),
          st.earth_radius * std::sin(st.latitude)};
}

struct Pointing {
  Measurement measurement;
  bool zenith {false};   // azimuth undefined, reported as 0
};

// Topocentric East-North-Up decomposition of the station -> object line.
inline Pointing point(const StateVector& s, const GroundStation& st) {
  const double lon = station_sidereal_angle(st, s.epoch);
  const double sl = std::sin(lon), cl = std::cos(lon);
  const double sp = std::sin(st.latitude), cp = std::cos(st.latitude);

  const Vec3 rho = s.position - station_state_inertial(st, s.epoch);
  const double range = norm(rho);
  if(!(range > 0.0)) {
    throw std::invalid_argument("observe: object coincides with the station");
  }

  const double east = -sl * rho.x + cl * rho.y;
  const double north = -sp * cl * rho.x - sp * sl * rho.y + cp * rho.z;
  const double up = cp * cl * rho.x + cp * sl * rho.y + sp * rho.z;

  Pointing p;
  p.measurement.epoch = s.epoch;
  p.measurement.elevation = std::asin(std::clamp(up / range, -1.0, 1.0));
  if(std::abs(p.measurement.elevation - kPi / 2.0) < 1e-12) {
    p.zenith = true;
    p.measurement.azimuth = 0.0;
  }
  else {
    p.measurement.azimuth = wrap_angle(std::atan2(east, north));
  }
  return p;
}

inline Measurement observe(const StateVector& s, const GroundStation& st) {
  return point(s, st).measurement;
}

// Sum of squared sigma-scaled components, each wrapped to (-pi, pi] first.
// No square root is taken.
inline double weighted_norm(const std::array<double, 2>& u, const Uncertainty& sigma) {
  const double de = wrap_angle(u[0]) / sigma.elevation;
  const double da = wrap_angle(u[1]) / sigma.azimuth;
  return de * de + da * da;
}

// Cost of explaining measurement z by pseudo-measurement y.
inline double assignment_cost(const Measurement& z, const Measurement& y, const Uncertainty& sigma) {
  if(z.epoch != y.epoch) {
    std::ostringstream oss;
    oss << "assignment_cost: epoch mismatch " << z.epoch << " vs " << y.epoch;
    throw std::logic_error(oss.str());
  }
  return weighted_norm({z.elevation - y.elevation, z.azimuth - y.azimuth}, sigma);
}

}  // end of namespace multitrack -------------------------------------------
