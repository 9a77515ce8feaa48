#pragma once

// Synthetic near-geostationary observation campaign: truth orbits, the
// nightly photograph schedule, spurious detections and ground-truth labels.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "assignment.hpp"
#include "fitness.hpp"
#include "observation.hpp"
#include "orbit.hpp"
#include "random.hpp"
#include "swarm.hpp"

namespace multitrack {

// Label of a measurement row that no object produced.
inline constexpr int kFictitious = -1;

// Start of the first night relative to t0 = 0. Found with
// best_night_offset() on the reference catalogue and pinned here.
inline constexpr double kDefaultNightOffset = 27600.0;

// Reference catalogue: ten near-GEO objects, perigee at the ascending node.
inline std::vector<OrbitalElements> default_truth() {
  struct Row { double da, e, inc_deg, raan_deg, theta_deg; };
  static constexpr std::array<Row, 10> rows {{
    {-100.0, 0.02, 0.5,  0.0, -40.0},
    { 100.0, 0.04, 1.0, 10.0, -52.0},
    { -50.0, 0.06, 0.6, 20.0, -64.0},
    {  50.0, 0.08, 1.1,  0.0, -46.0},
    { -20.0, 0.03, 0.7, 10.0, -58.0},
    {  20.0, 0.05, 1.2, 20.0, -70.0},
    { -80.0, 0.02, 0.8,  0.0, -42.0},
    {  80.0, 0.04, 1.3, 10.0, -54.0},
    { -40.0, 0.06, 0.9, 20.0, -66.0},
    {  40.0, 0.08, 1.4,  0.0, -48.0},
  }};
  std::vector<OrbitalElements> out;
  out.reserve(rows.size());
  for(const auto& r : rows) {
    out.push_back({kGeoRadius + r.da, r.e, deg2rad(r.inc_deg), deg2rad(r.raan_deg),
                   deg2rad(r.theta_deg), 0.0});
  }
  return out;
}

// Subset of the reference catalogue by 1-based row numbers.
inline std::vector<OrbitalElements> truth_subset(const std::vector<int>& rows) {
  const auto all = default_truth();
  std::vector<OrbitalElements> out;
  for(int r : rows) {
    if(r < 1 || r > static_cast<int>(all.size())) {
      throw std::invalid_argument("truth_subset: catalogue row " + std::to_string(r) +
                                  " outside 1.." + std::to_string(all.size()));
    }
    out.push_back(all[static_cast<std::size_t>(r - 1)]);
  }
  return out;
}

struct ScenarioConfig {
  std::vector<OrbitalElements> truth {default_truth()};
  std::size_t nights {3};
  std::size_t photos_per_night {10};
  double photo_interval {1800.0};                  // s
  std::vector<double> night_start_offsets {kDefaultNightOffset,
                                           kDefaultNightOffset + 86400.0,
                                           kDefaultNightOffset + 2.0 * 86400.0};
  GroundStation station {0.0, deg2rad(45.0)};
  Uncertainty sigma {};
  std::vector<std::size_t> fictitious_counts {default_fictitious_counts(30)};
  double measurement_noise_sigma {0.0};            // rad, additive Gaussian
  double fictitious_margin {deg2rad(0.5)};
  double min_elevation {deg2rad(10.0)};            // rad, visibility floor for truth objects
  GravityModel gravity {};
  std::uint64_t seed {1};

  // 0, 1, 2, 0, 1, 2, ...: batches of n, n+1 and n+2 rows in equal share.
  static std::vector<std::size_t> default_fictitious_counts(std::size_t dates) {
    std::vector<std::size_t> c(dates);
    for(std::size_t j = 0; j < dates; ++j) c[j] = j % 3;
    return c;
  }

  std::size_t date_count() const { return nights * photos_per_night; }

  void validate() const {
    if(truth.empty()) throw std::invalid_argument("ScenarioConfig: truth is empty");
    for(const auto& el : truth) multitrack::validate(el);
    if(nights == 0 || photos_per_night == 0) {
      throw std::invalid_argument("ScenarioConfig: nights and photos_per_night must be >= 1");
    }
    if(!(photo_interval > 0.0)) throw std::invalid_argument("ScenarioConfig: photo_interval must be > 0");
    if(night_start_offsets.size() != nights) {
      throw std::invalid_argument("ScenarioConfig: night_start_offsets needs one entry per night");
    }
    if(fictitious_counts.size() != date_count()) {
      throw std::invalid_argument("ScenarioConfig: fictitious_counts needs one entry per date (" +
                                  std::to_string(date_count()) + ")");
    }
    multitrack::validate(station);
    multitrack::validate(sigma);
    multitrack::validate(gravity);
    if(!(measurement_noise_sigma >= 0.0)) {
      throw std::invalid_argument("ScenarioConfig: measurement_noise_sigma must be >= 0");
    }
  }
};

struct LabeledObservationSet {
  ObservationSet observations;
  std::vector<std::vector<int>> labels;   // [date][row] -> object index or kFictitious
  Candidate truth;
};

// Function: schedule
//
// Photo p of night g is taken at night_start_offsets[g] + p * photo_interval.
inline std::vector<double> schedule(const ScenarioConfig& config) {
  if(config.night_start_offsets.size() != config.nights) {
    throw std::invalid_argument("schedule: night_start_offsets needs one entry per night");
  }
  std::vector<double> dates;
  dates.reserve(config.date_count());
  for(std::size_t g = 0; g < config.nights; ++g) {
    const double start = config.night_start_offsets[g];
    if(!dates.empty() && !(start > dates.back())) {
      throw std::invalid_argument("schedule: night " + std::to_string(g) +
                                  " overlaps the previous night");
    }
    for(std::size_t p = 0; p < config.photos_per_night; ++p) {
      dates.push_back(start + static_cast<double>(p) * config.photo_interval);
    }
  }
  return dates;
}

// Lowest elevation of any truth object over the schedule.
inline double min_truth_elevation(const ScenarioConfig& config) {
  double lowest = kPi;
  for(double t : schedule(config)) {
    for(const auto& el : config.truth) {
      lowest = std::min(lowest, observe(propagate(el, t, config.gravity), config.station).elevation);
    }
  }
  return lowest;
}

// Night start (first night; later nights follow at 86400 s spacing)
// that maximizes the lowest truth elevation, scanned on a `step` grid.
inline double best_night_offset(ScenarioConfig config, double step = 300.0) {
  const double span = static_cast<double>(config.photos_per_night - 1) * config.photo_interval;
  double best_offset = 0.0, best_elev = -kPi;
  for(double off = 0.0; off + span < 86400.0; off += step) {
    for(std::size_t g = 0; g < config.nights; ++g) {
      config.night_start_offsets[g] = off + static_cast<double>(g) * 86400.0;
    }
    const double e = min_truth_elevation(config);
    if(e > best_elev) {
      best_elev = e;
      best_offset = off;
    }
  }
  return best_offset;
}

// Function: generate
//
// Per date: observe every truth object, add optional Gaussian noise, append
// the configured number of spurious detections drawn uniformly in the
// bounding box of the true detections inflated by fictitious_margin, then
// shuffle the rows. Throws if a truth object is below min_elevation.
inline LabeledObservationSet generate(const ScenarioConfig& config) {
  config.validate();

  Rng rng(config.seed);
  const auto dates = schedule(config);
  const std::size_t n = config.truth.size();

  LabeledObservationSet out;
  ObservationSet& obs = out.observations;
  obs.dates = dates;
  obs.station = config.station;
  obs.gravity = config.gravity;
  out.truth.elements = config.truth;

  for(std::size_t j = 0; j < dates.size(); ++j) {
    const double t = dates[j];
    std::vector<Measurement> rows;
    std::vector<int> labels;
    for(std::size_t i = 0; i < n; ++i) {
      Measurement z = observe(propagate(config.truth[i], t, config.gravity), config.station);
      if(z.elevation < config.min_elevation) {
        std::ostringstream oss;
        oss << "generate: object " << i + 1 << " at elevation " << rad2deg(z.elevation)
            << " deg below the visibility floor on date " << j;
        throw std::runtime_error(oss.str());
      }
      if(config.measurement_noise_sigma > 0.0) {
        z.elevation = std::clamp(z.elevation + config.measurement_noise_sigma * rng.normal(),
                                 -kPi / 2.0, kPi / 2.0);
        z.azimuth = wrap_angle(z.azimuth + config.measurement_noise_sigma * rng.normal());
      }
      rows.push_back(z);
      labels.push_back(static_cast<int>(i));
    }

    // bounding box, azimuth taken relative to the first row to stay off the seam
    const double az_ref = rows.front().azimuth;
    double el_lo = rows.front().elevation, el_hi = el_lo, daz_lo = 0.0, daz_hi = 0.0;
    for(const auto& z : rows) {
      el_lo = std::min(el_lo, z.elevation);
      el_hi = std::max(el_hi, z.elevation);
      const double daz = wrap_angle(z.azimuth - az_ref);
      daz_lo = std::min(daz_lo, daz);
      daz_hi = std::max(daz_hi, daz);
    }
    const double m = config.fictitious_margin;
    for(std::size_t f = 0; f < config.fictitious_counts[j]; ++f) {
      Measurement z;
      z.epoch = t;
      z.elevation = std::clamp(rng.uniform(el_lo - m, el_hi + m), -kPi / 2.0, kPi / 2.0);
      z.azimuth = wrap_angle(az_ref + rng.uniform(daz_lo - m, daz_hi + m));
      rows.push_back(z);
      labels.push_back(kFictitious);
    }

    // Fisher-Yates
    for(std::size_t k = rows.size(); k > 1; --k) {
      const std::size_t pick = rng.index(k);
      std::swap(rows[k - 1], rows[pick]);
      std::swap(labels[k - 1], labels[pick]);
    }

    obs.batches.push_back(std::move(rows));
    out.labels.push_back(std::move(labels));
    obs.sigmas.push_back(config.sigma);
    obs.nights.push_back(static_cast<int>(j / config.photos_per_night));
  }
  return out;
}

// Working hypothesis: reconstruct as many objects as the sparsest photograph shows.
inline std::size_t target_count(const ObservationSet& obs) {
  return obs.min_batch_size();
}

// Search box per object: a0 +- da_km, e in [0, e_max], inc in [0, inc_max],
// raan and theta over the full circle.
inline SearchBounds orbit_search_bounds(std::size_t objects, double a_center = kGeoRadius,
                                        double a_half_width = 200.0, double e_max = 0.1,
                                        double inc_max = deg2rad(1.5)) {
  SearchBounds b;
  for(std::size_t i = 0; i < objects; ++i) {
    b.lower.insert(b.lower.end(), {a_center - a_half_width, 0.0, 0.0, -kPi, -kPi});
    b.upper.insert(b.upper.end(), {a_center + a_half_width, e_max, inc_max, kPi, kPi});
  }
  return b;
}

struct AssignmentScore {
  double purity {0.0};                      // share of picks landing on true rows
  double consistency {0.0};                 // share explained by one object relabeling
  std::vector<double> per_date_purity;
  std::vector<std::size_t> relabel;         // estimated object -> truth object
};

// Function: score_assignments
//
// Consistency uses the relabeling that maximizes agreement, found by solving
// an assignment on the (truth x estimated) disagreement counts.
inline AssignmentScore score_assignments(const FitnessReport& report,
                                         const std::vector<std::vector<int>>& labels,
                                         std::size_t truth_objects) {
  const std::size_t M = report.assignments.size();
  if(labels.size() != M) {
    throw std::invalid_argument("score_assignments: " + std::to_string(labels.size()) +
                                " label dates vs " + std::to_string(M) + " report dates");
  }
  if(M == 0) throw std::invalid_argument("score_assignments: empty report");
  const std::size_t n = report.assignments.front().row_of.size();
  if(n == 0 || truth_objects < n) {
    throw std::invalid_argument("score_assignments: more estimated objects than truth objects");
  }

  AssignmentScore score;
  std::vector<std::vector<std::size_t>> agree(truth_objects, std::vector<std::size_t>(n, 0));
  std::size_t pure = 0;
  for(std::size_t j = 0; j < M; ++j) {
    const auto& row_of = report.assignments[j].row_of;
    if(row_of.size() != n) throw std::invalid_argument("score_assignments: ragged assignments");
    std::size_t pure_j = 0;
    for(std::size_t i = 0; i < n; ++i) {
      if(row_of[i] >= labels[j].size()) {
        throw std::invalid_argument("score_assignments: row index beyond labelled rows on date " +
                                    std::to_string(j));
      }
      const int label = labels[j][row_of[i]];
      if(label != kFictitious) {
        ++pure_j;
        ++agree[static_cast<std::size_t>(label)][i];
      }
    }
    pure += pure_j;
    score.per_date_purity.push_back(static_cast<double>(pure_j) / static_cast<double>(n));
  }
  const double total = static_cast<double>(n * M);
  score.purity = static_cast<double>(pure) / total;

  CostMatrix miss(truth_objects, n);
  for(std::size_t t = 0; t < truth_objects; ++t) {
    for(std::size_t i = 0; i < n; ++i) {
      miss(t, i) = static_cast<double>(M - agree[t][i]);
    }
  }
  const Assignment best = solve(miss);
  std::size_t matched = 0;
  for(std::size_t i = 0; i < n; ++i) matched += agree[best.row_of[i]][i];
  score.consistency = static_cast<double>(matched) / total;
  score.relabel = best.row_of;
  return score;
}

}  // end of namespace multitrack -------------------------------------------
