#pragma once

// End-to-end trajectory reconstruction: swarm search over initial
// conditions with the assignment-based fitness.

#include <algorithm>
#include <array>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "fitness.hpp"
#include "swarm.hpp"

namespace multitrack {

// Orders the object blocks of a flattened candidate by total longitude
// raan + theta (ties by the remaining elements), permuting the velocity blocks
// alongside. The fitness is invariant under object relabeling.
inline void sort_objects_by_longitude(std::span<double> x, std::span<double> v) {
  constexpr std::size_t B = Candidate::kElementsPerObject;
  const std::size_t n = x.size() / B;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](std::size_t i) {
    const double* b = &x[i * B];
    return std::array<double, 4> {b[3] + b[4], b[0], b[1], b[2]};
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t p, std::size_t q) { return key(p) < key(q); });
  const std::vector<double> x0(x.begin(), x.end());
  const std::vector<double> v0(v.begin(), v.end());
  for(std::size_t k = 0; k < n; ++k) {
    for(std::size_t d = 0; d < B; ++d) {
      x[k * B + d] = x0[order[k] * B + d];
      if(!v.empty()) v[k * B + d] = v0[order[k] * B + d];
    }
  }
}

struct Reconstruction {
  Candidate best;
  FitnessReport report;
  SwarmResult swarm;
};

// `objects` = 0 reconstructs as many objects as the smallest batch holds.
// `warm_start`, when given, seeds the first particle. Pass
// sort_objects_by_longitude as `symmetry` to keep particles canonical.
inline Reconstruction reconstruct(const ObservationSet& obs, const SearchBounds& bounds,
                                  const SwarmConfig& config, std::size_t objects = 0,
                                  const ProgressCallback& progress = {},
                                  const std::optional<Candidate>& warm_start = std::nullopt,
                                  const SymmetryMap& symmetry = {}) {
  obs.validate();
  const std::size_t n = objects ? objects : obs.min_batch_size();
  if(n == 0 || n > obs.min_batch_size()) {
    throw std::invalid_argument("reconstruct: object count must lie in 1..smallest batch size");
  }
  if(bounds.dimension() != n * Candidate::kElementsPerObject) {
    throw std::invalid_argument("reconstruct: bounds dimension does not match object count");
  }

  auto fitness = [&obs](std::span<const double> x) {
    return fitness_or_inf(Candidate::unflatten(x), obs);
  };

  std::vector<std::vector<double>> seeds;
  if(warm_start) {
    if(warm_start->size() != n) {
      throw std::invalid_argument("reconstruct: warm start has the wrong object count");
    }
    seeds.push_back(warm_start->flatten());
  }

  Reconstruction out;
  out.swarm = optimize(fitness, bounds, config, progress, seeds, symmetry);
  out.best = Candidate::unflatten(out.swarm.best_position);
  out.report = evaluate(out.best, obs);
  return out;
}

}  // end of namespace multitrack -------------------------------------------
