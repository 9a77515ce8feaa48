#pragma once

// Two-body Keplerian propagation for the five-element orbit family
// (a, e, inc, raan, theta) with the perigee fixed at the ascending node.

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace multitrack {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kEarthMu = 398600.4418;          // km^3/s^2
inline constexpr double kEarthRadius = 6378.137;         // km
inline constexpr double kGeoRadius = 42164.0;            // km

constexpr double deg2rad(double deg) { return deg * (kPi / 180.0); }
constexpr double rad2deg(double rad) { return rad * (180.0 / kPi); }

// Wraps an angle into (-pi, pi].
inline double wrap_angle(double x) {
  double r = std::remainder(x, kTwoPi);
  if(r <= -kPi) r += kTwoPi;
  return r;
}

// ----------------------------------------------------------------------------
// Small 3-vector
// ----------------------------------------------------------------------------

struct Vec3 {
  double x {0.0}, y {0.0}, z {0.0};

  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

  friend Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend Vec3 operator*(Vec3 a, double s) { return a *= s; }
  friend Vec3 operator*(double s, Vec3 a) { return a *= s; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

// Rotation about the z axis.
inline Vec3 rotate_z(const Vec3& v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}

// ----------------------------------------------------------------------------
// Domain types
// ----------------------------------------------------------------------------

struct GravityModel {
  double mu {kEarthMu};
};

// Initial condition of one object. Angles in radians; theta is the true
// anomaly counted from the ascending node (argument of perigee is zero).
struct OrbitalElements {
  double a {kGeoRadius};
  double e {0.0};
  double inc {0.0};
  double raan {0.0};
  double theta {0.0};
  double epoch {0.0};

  // Total longitude, well defined for near-equatorial orbits.
  double longitude() const { return wrap_angle(raan + theta); }

  friend bool operator==(const OrbitalElements&, const OrbitalElements&) = default;
};

struct StateVector {
  Vec3 position;   // km
  Vec3 velocity;   // km/s
  double epoch {0.0};
};

inline void validate(const OrbitalElements& el) {
  auto fail = [&](const char* what) {
    std::ostringstream oss;
    oss << "OrbitalElements: " << what << " (a=" << el.a << ", e=" << el.e
        << ", inc=" << el.inc << ")";
    throw std::invalid_argument(oss.str());
  };
  if(!(el.a > 0.0)) fail("semi-major axis must be positive");
  if(!(el.e >= 0.0 && el.e < 1.0)) fail("eccentricity must lie in [0, 1)");
  if(!(el.inc >= 0.0 && el.inc <= kPi)) fail("inclination must lie in [0, pi]");
  if(!std::isfinite(el.raan) || !std::isfinite(el.theta) || !std::isfinite(el.epoch)) {
    fail("non-finite angle or epoch");
  }
}

inline void validate(const GravityModel& g) {
  if(!(g.mu > 0.0) || !std::isfinite(g.mu)) {
    throw std::invalid_argument("GravityModel: mu must be positive and finite");
  }
}

inline double orbital_period(double a, const GravityModel& g = {}) {
  return kTwoPi * std::sqrt(a * a * a / g.mu);
}

inline double specific_energy(const StateVector& s, const GravityModel& g = {}) {
  return 0.5 * dot(s.velocity, s.velocity) - g.mu / norm(s.position);
}

inline Vec3 angular_momentum(const StateVector& s) {
  return cross(s.position, s.velocity);
}

// ----------------------------------------------------------------------------
// Kepler's equation
// ----------------------------------------------------------------------------

// Solves M = E - e sin E by Newton-Raphson. Converged when the residual is
// below 1e-13 rad or the step stalls; throws after 50 iterations.
inline double solve_kepler(double mean_anomaly, double e) {
  if(!(e >= 0.0 && e < 1.0)) {
    throw std::invalid_argument("solve_kepler: eccentricity must lie in [0, 1)");
  }
  if(e == 0.0) {
    return mean_anomaly;
  }
  double E = (e < 0.8) ? mean_anomaly : (mean_anomaly < 0.0 ? -kPi : kPi);
  for(int iter = 0; iter < 50; ++iter) {
    const double f = E - e * std::sin(E) - mean_anomaly;
    if(std::abs(f) < 1e-13) {
      return E;
    }
    const double step = f / (1.0 - e * std::cos(E));
    E -= step;
    if(std::abs(step) < 1e-15) {
      return E;
    }
  }
  std::ostringstream oss;
  oss << "solve_kepler: no convergence after 50 iterations (M=" << mean_anomaly
      << ", e=" << e << ")";
  throw std::runtime_error(oss.str());
}

inline double true_to_eccentric(double nu, double e) {
  return std::atan2(std::sqrt(1.0 - e * e) * std::sin(nu), e + std::cos(nu));
}

inline double eccentric_to_true(double E, double e) {
  return std::atan2(std::sqrt(1.0 - e * e) * std::sin(E), std::cos(E) - e);
}

// ----------------------------------------------------------------------------
// Conversions
// ----------------------------------------------------------------------------

inline StateVector elements_to_state(const OrbitalElements& el, const GravityModel& g = {}) {
  validate(el);
  validate(g);

  const double p = el.a * (1.0 - el.e * el.e);
  const double cn = std::cos(el.theta), sn = std::sin(el.theta);
  const double r = p / (1.0 + el.e * cn);
  const double k = std::sqrt(g.mu / p);

  // perifocal frame, perigee on the node line
  const Vec3 pos_pf {r * cn, r * sn, 0.0};
  const Vec3 vel_pf {-k * sn, k * (el.e + cn), 0.0};

  const double ci = std::cos(el.inc), si = std::sin(el.inc);
  auto to_inertial = [&](const Vec3& v) {
    const Vec3 tilted {v.x, ci * v.y, si * v.y};
    return rotate_z(tilted, el.raan);
  };

  return StateVector {to_inertial(pos_pf), to_inertial(vel_pf), el.epoch};
}

// Degeneracy flags reported alongside recovered elements.
struct ElementsFit {
  OrbitalElements elements;
  bool near_equatorial {false};   // inc < 1e-9 rad
  bool near_circular {false};     // e < 1e-12
};

// Function: state_to_elements
//
// Inverse of elements_to_state for the perigee-at-node family. theta is
// returned as the argument of latitude, which equals the true anomaly inside
// the family and stays defined for circular orbits.
//
// Near-equatorial states have no node line. Then raan carries the perigee
// longitude (or 0 for near-circular orbits) and theta the remainder, so that
// raan + theta is the true longitude.
inline ElementsFit state_to_elements(const StateVector& s, const GravityModel& g = {}) {
  validate(g);

  const Vec3& r = s.position;
  const Vec3& v = s.velocity;
  const double rn = norm(r);
  const Vec3 h = cross(r, v);
  const double hn = norm(h);
  if(!(rn > 0.0) || !(hn > 0.0)) {
    throw std::invalid_argument("state_to_elements: degenerate (rectilinear) state");
  }

  const double energy = 0.5 * dot(v, v) - g.mu / rn;
  if(!(energy < 0.0)) {
    throw std::invalid_argument("state_to_elements: unbound state (e >= 1)");
  }

  ElementsFit fit;
  OrbitalElements& el = fit.elements;
  el.epoch = s.epoch;
  el.a = -g.mu / (2.0 * energy);

  const Vec3 e_vec = cross(v, h) * (1.0 / g.mu) - r * (1.0 / rn);
  el.e = norm(e_vec);
  el.inc = std::atan2(std::hypot(h.x, h.y), h.z);

  fit.near_equatorial = el.inc < 1e-9;
  fit.near_circular = el.e < 1e-12;

  if(!fit.near_equatorial) {
    el.raan = std::atan2(h.x, -h.y);
    // argument of latitude: angle from the node line to r in the orbit plane
    const Vec3 node {std::cos(el.raan), std::sin(el.raan), 0.0};
    const Vec3 q = cross(h, node) * (1.0 / hn);
    el.theta = std::atan2(dot(r, q), dot(r, node));
  }
  else {
    const double true_longitude = std::atan2(r.y, r.x);
    el.raan = fit.near_circular ? 0.0 : std::atan2(e_vec.y, e_vec.x);
    el.theta = true_longitude - el.raan;
  }
  el.raan = wrap_angle(el.raan);
  el.theta = wrap_angle(el.theta);
  return fit;
}

// ----------------------------------------------------------------------------
// Propagation
// ----------------------------------------------------------------------------

// Elements of the same orbit with theta advanced to time t.
inline OrbitalElements advance(const OrbitalElements& el, double t, const GravityModel& g = {}) {
  validate(el);
  validate(g);
  if(t < el.epoch) {
    std::ostringstream oss;
    oss << "propagate: target time " << t << " precedes epoch " << el.epoch;
    throw std::invalid_argument(oss.str());
  }
  const double mean_motion = std::sqrt(g.mu / (el.a * el.a * el.a));
  const double E0 = true_to_eccentric(el.theta, el.e);
  const double M0 = E0 - el.e * std::sin(E0);
  const double M = wrap_angle(M0 + mean_motion * (t - el.epoch));
  const double E = solve_kepler(M, el.e);

  OrbitalElements out = el;
  out.theta = eccentric_to_true(E, el.e);
  out.epoch = t;
  return out;
}

inline StateVector propagate(const OrbitalElements& el, double t, const GravityModel& g = {}) {
  return elements_to_state(advance(el, t, g), g);
}

}  // end of namespace multitrack -------------------------------------------
