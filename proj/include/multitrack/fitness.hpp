#pragma once

// Fitness of a candidate set of initial conditions against an observation
// campaign: propagate every object, observe it at each date, solve the
// per-date assignment and accumulate the optimal costs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "assignment.hpp"
#include "observation.hpp"
#include "orbit.hpp"

namespace multitrack {

// Decision vector: one element set per object. Flattened as
// (a, e, inc, raan, theta) per object.
struct Candidate {
  std::vector<OrbitalElements> elements;

  static constexpr std::size_t kElementsPerObject = 5;

  std::size_t size() const { return elements.size(); }

  std::vector<double> flatten() const {
    std::vector<double> x;
    x.reserve(elements.size() * kElementsPerObject);
    for(const auto& el : elements) {
      x.insert(x.end(), {el.a, el.e, el.inc, el.raan, el.theta});
    }
    return x;
  }

  static Candidate unflatten(std::span<const double> x, double epoch = 0.0) {
    if(x.size() % kElementsPerObject != 0) {
      throw std::invalid_argument("Candidate::unflatten: length is not a multiple of 5");
    }
    Candidate c;
    c.elements.reserve(x.size() / kElementsPerObject);
    for(std::size_t k = 0; k < x.size(); k += kElementsPerObject) {
      c.elements.push_back({x[k], x[k + 1], x[k + 2], x[k + 3], x[k + 4], epoch});
    }
    return c;
  }
};

// Immutable once built; shared read-only by concurrent evaluations.
struct ObservationSet {
  std::vector<double> dates;                        // strictly increasing, s
  std::vector<std::vector<Measurement>> batches;    // one row per measurement
  std::vector<Uncertainty> sigmas;                  // one per date
  std::vector<int> nights;                          // night index per date
  GroundStation station;
  GravityModel gravity;

  std::size_t date_count() const { return dates.size(); }

  // Largest number of objects the campaign can support: the smallest batch.
  std::size_t min_batch_size() const {
    std::size_t m = batches.empty() ? 0 : batches.front().size();
    for(const auto& b : batches) m = std::min(m, b.size());
    return m;
  }

  void validate() const {
    const std::size_t M = dates.size();
    if(M == 0) {
      throw std::invalid_argument("ObservationSet: no dates");
    }
    if(batches.size() != M || sigmas.size() != M || nights.size() != M) {
      throw std::invalid_argument("ObservationSet: dates/batches/sigmas/nights length mismatch");
    }
    multitrack::validate(station);
    multitrack::validate(gravity);
    for(std::size_t j = 0; j < M; ++j) {
      if(j > 0 && !(dates[j] > dates[j - 1])) {
        throw std::invalid_argument("ObservationSet: dates not strictly increasing at index " +
                                    std::to_string(j));
      }
      multitrack::validate(sigmas[j]);
      for(const auto& z : batches[j]) {
        if(z.epoch != dates[j]) {
          throw std::invalid_argument("ObservationSet: measurement epoch differs from date " +
                                      std::to_string(j));
        }
      }
    }
  }
};

struct FitnessReport {
  double fitness {0.0};
  std::vector<double> per_date_costs;               // K_j
  std::vector<std::vector<double>> residuals;       // running R_i after each date [date][object]
  std::vector<Assignment> assignments;              // per date

  std::vector<double> final_residuals() const {
    return residuals.empty() ? std::vector<double>{} : residuals.back();
  }
};

// Predicted measurements of every candidate object at date j.
inline std::vector<Measurement> pseudo_measurements(const Candidate& c,
                                                    const ObservationSet& obs,
                                                    std::size_t j) {
  if(j >= obs.date_count()) {
    throw std::out_of_range("pseudo_measurements: date index " + std::to_string(j) + " out of range");
  }
  std::vector<Measurement> y;
  y.reserve(c.size());
  for(std::size_t i = 0; i < c.size(); ++i) {
    try {
      y.push_back(observe(propagate(c.elements[i], obs.dates[j], obs.gravity), obs.station));
    }
    catch(const std::exception& ex) {
      throw std::runtime_error("object " + std::to_string(i) + " at date " + std::to_string(j) +
                               ": " + ex.what());
    }
  }
  return y;
}

// Entry (k, i): cost of measurement k explained by object i.
inline CostMatrix build_cost_matrix(std::span<const Measurement> predicted,
                                    std::span<const Measurement> measured,
                                    const Uncertainty& sigma,
                                    std::size_t date_index = 0) {
  if(measured.size() < predicted.size()) {
    std::ostringstream oss;
    oss << "build_cost_matrix: date " << date_index << " has " << measured.size()
        << " measurements for " << predicted.size() << " objects";
    throw std::invalid_argument(oss.str());
  }
  CostMatrix C(measured.size(), predicted.size());
  for(std::size_t k = 0; k < measured.size(); ++k) {
    for(std::size_t i = 0; i < predicted.size(); ++i) {
      C(k, i) = assignment_cost(measured[k], predicted[i], sigma);
    }
  }
  return C;
}

// Optimal cost of one date. The selected entries are summed in ascending
// value order, so the result depends neither on object labelling nor on the
// row order of the batch.
inline double date_cost(const CostMatrix& C, const Assignment& a) {
  std::vector<double> picked;
  picked.reserve(a.row_of.size());
  for(std::size_t i = 0; i < a.row_of.size(); ++i) picked.push_back(C(a.row_of[i], i));
  std::sort(picked.begin(), picked.end());
  double total = 0.0;
  for(double c : picked) total += c;
  return total;
}

// Function: evaluate
//
// Full fitness pipeline. F is accumulated over dates in ascending order; the
// per-object residuals give a second route to the same total, and the two
// are checked against each other to 1e-9 relative.
inline FitnessReport evaluate(const Candidate& c, const ObservationSet& obs) {
  const std::size_t n = c.size();
  const std::size_t M = obs.date_count();
  if(n == 0) {
    throw std::invalid_argument("evaluate: empty candidate");
  }

  FitnessReport report;
  report.per_date_costs.reserve(M);
  report.residuals.reserve(M);
  report.assignments.reserve(M);

  std::vector<double> running(n, 0.0);
  for(std::size_t j = 0; j < M; ++j) {
    const auto predicted = pseudo_measurements(c, obs, j);
    const CostMatrix C = build_cost_matrix(predicted, obs.batches[j], obs.sigmas[j], j);
    Assignment a = solve(C);
    const double K = date_cost(C, a);
    for(std::size_t i = 0; i < n; ++i) {
      running[i] += C(a.row_of[i], i);
    }
    report.fitness += K;
    report.per_date_costs.push_back(K);
    report.residuals.push_back(running);
    report.assignments.push_back(std::move(a));
  }

  double by_object = 0.0;
  for(double r : running) by_object += r;
  const double scale = std::max(report.fitness, std::numeric_limits<double>::min());
  if(!(std::abs(by_object - report.fitness) <= 1e-9 * scale) &&
     !(by_object == report.fitness)) {
    std::ostringstream oss;
    oss.precision(17);
    oss << "evaluate: date sum " << report.fitness << " disagrees with residual sum " << by_object;
    throw std::logic_error(oss.str());
  }
  return report;
}

// Fitness only; +inf when the evaluation cannot be completed.
inline double fitness_or_inf(const Candidate& c, const ObservationSet& obs) noexcept {
  try {
    return evaluate(c, obs).fitness;
  }
  catch(...) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // end of namespace multitrack -------------------------------------------
