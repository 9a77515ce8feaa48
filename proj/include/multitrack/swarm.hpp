#pragma once

// Repulsive particle swarm over a bounded box.
//
// One iteration: velocity update from personal, neighbourhood and (optional)
// global bests plus a random perturbation; move and clamp; evaluate; probe
// along and against the velocity; reinitialize the worst particles.
//
// All random draws come from one master stream consumed sequentially by the
// owning thread. Only fitness evaluations are dispatched to workers, and
// their results land in per-particle slots, so the outcome does not depend
// on the worker count.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "parallel.hpp"
#include "random.hpp"

namespace multitrack {

struct SearchBounds {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dimension() const { return lower.size(); }
  double width(std::size_t d) const { return upper[d] - lower[d]; }

  void validate() const {
    if(lower.empty() || lower.size() != upper.size()) {
      throw std::invalid_argument("SearchBounds: empty or mismatched lower/upper");
    }
    for(std::size_t d = 0; d < lower.size(); ++d) {
      if(!(lower[d] < upper[d]) || !std::isfinite(lower[d]) || !std::isfinite(upper[d])) {
        throw std::invalid_argument("SearchBounds: need finite lower < upper in dimension " +
                                    std::to_string(d));
      }
    }
  }

  bool contains(std::span<const double> x) const {
    if(x.size() != lower.size()) return false;
    for(std::size_t d = 0; d < x.size(); ++d) {
      if(!(x[d] >= lower[d] && x[d] <= upper[d])) return false;
    }
    return true;
  }
};

enum class Topology { closest, ring, random };

inline const char* to_string(Topology t) {
  switch(t) {
    case Topology::closest: return "closest";
    case Topology::ring:    return "ring";
    case Topology::random:  return "random";
  }
  return "?";
}

inline Topology parse_topology(const std::string& s) {
  if(s == "closest") return Topology::closest;
  if(s == "ring") return Topology::ring;
  if(s == "random") return Topology::random;
  throw std::invalid_argument("unknown topology '" + s + "' (closest | ring | random)");
}

struct SwarmConfig {
  std::size_t particles {40};
  std::size_t iterations {150};
  std::optional<std::size_t> eval_budget;
  std::size_t neighbors {20};
  Topology topology {Topology::closest};
  std::size_t local_search_steps {2};
  std::size_t worst_reset {2};
  double inertia {0.72};
  double cognitive {1.49};      // pull toward the personal best
  double social {1.49};         // pull toward the neighbourhood best
  double global {0.0};          // pull toward the swarm best
  double repulsion {0.05};      // random perturbation: c3 * r3 * z * width, z in [-1/2, 1/2]
  double v_max_frac {0.5};
  double v_init_frac {0.1};
  std::uint64_t seed {20190101};
  std::size_t workers {1};

  void validate() const {
    if(particles < 1) throw std::invalid_argument("SwarmConfig: particles must be >= 1");
    if(particles > 1 && neighbors >= particles) {
      throw std::invalid_argument("SwarmConfig: neighbors must be < particles");
    }
    if(worst_reset >= particles && worst_reset > 0) {
      throw std::invalid_argument("SwarmConfig: worst_reset must be < particles");
    }
    if(workers < 1) throw std::invalid_argument("SwarmConfig: workers must be >= 1");
    for(double w : {inertia, cognitive, social, global, repulsion, v_max_frac, v_init_frac}) {
      if(!std::isfinite(w)) throw std::invalid_argument("SwarmConfig: non-finite weight");
    }
    if(!(v_max_frac > 0.0)) throw std::invalid_argument("SwarmConfig: v_max_frac must be > 0");
  }
};

struct Particle {
  std::vector<double> position;
  std::vector<double> velocity;
  std::vector<double> best_position;
  double best_fitness {std::numeric_limits<double>::infinity()};
  double fitness {std::numeric_limits<double>::infinity()};
};

struct TraceRow {
  std::size_t iteration {0};
  double best_fitness {0.0};
  double mean_fitness {0.0};
  std::size_t evaluations {0};

  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

// Row 0 is the initial population; row t follows iteration t.
using ConvergenceTrace = std::vector<TraceRow>;

struct SwarmResult {
  std::vector<double> best_position;
  double best_fitness {std::numeric_limits<double>::infinity()};
  ConvergenceTrace trace;
  std::size_t evaluations {0};
};

using ProgressCallback = std::function<void(const TraceRow&)>;

// Rewrites a position into a canonical representative of its symmetry class
// (the fitness must be invariant under it), applying the same rearrangement
// to the velocity when one is given (non-empty span).
using SymmetryMap = std::function<void(std::span<double> position, std::span<double> velocity)>;

namespace detail {

// NaN and thrown errors count as +inf.
template <typename F>
double safe_call(F& fitness, std::span<const double> x) noexcept {
  try {
    const double f = fitness(x);
    return std::isnan(f) ? std::numeric_limits<double>::infinity() : f;
  }
  catch(...) {
    return std::numeric_limits<double>::infinity();
  }
}

inline void clamp_into(std::vector<double>& x, std::vector<double>* v, const SearchBounds& b) {
  for(std::size_t d = 0; d < x.size(); ++d) {
    if(x[d] < b.lower[d]) {
      x[d] = b.lower[d];
      if(v) (*v)[d] = 0.0;
    }
    else if(x[d] > b.upper[d]) {
      x[d] = b.upper[d];
      if(v) (*v)[d] = 0.0;
    }
  }
}

inline void canonicalize(Particle& p, const SymmetryMap& map) {
  if(!map) return;
  map(p.position, p.velocity);
  map(p.best_position, {});
}

inline void adopt_if_better(Particle& p) {
  if(p.fitness < p.best_fitness) {
    p.best_fitness = p.fitness;
    p.best_position = p.position;
  }
}

}  // namespace detail

// Fresh particle drawn uniformly in the box; velocity uniform in
// +-width * v_init_frac. Not evaluated.
inline Particle random_particle(const SearchBounds& bounds, const SwarmConfig& config, Rng& rng) {
  Particle p;
  const std::size_t D = bounds.dimension();
  p.position.resize(D);
  p.velocity.resize(D);
  for(std::size_t d = 0; d < D; ++d) {
    p.position[d] = rng.uniform(bounds.lower[d], bounds.upper[d]);
  }
  for(std::size_t d = 0; d < D; ++d) {
    const double vmax = bounds.width(d) * config.v_init_frac;
    p.velocity[d] = rng.uniform(-vmax, vmax);
  }
  p.best_position = p.position;
  return p;
}

// Evaluates the listed particles in parallel and resets their personal bests
// to the new evaluation.
template <typename F>
void evaluate_fresh(std::vector<Particle>& pop, std::span<const std::size_t> which, F& fitness,
                    std::size_t workers) {
  parallel_for(which.size(), workers, [&](std::size_t k) {
    Particle& p = pop[which[k]];
    p.fitness = detail::safe_call(fitness, p.position);
    p.best_fitness = p.fitness;
    p.best_position = p.position;
  });
}

// Function: initialize
//
// Uniform population, evaluated. `seeds` replace the positions of the first
// particles after the random draws, so the stream is the same either way.
template <typename F>
std::vector<Particle> initialize(const SearchBounds& bounds, const SwarmConfig& config, Rng& rng,
                                 F& fitness, std::span<const std::vector<double>> seeds = {}) {
  config.validate();
  bounds.validate();
  std::vector<Particle> pop;
  pop.reserve(config.particles);
  for(std::size_t i = 0; i < config.particles; ++i) {
    pop.push_back(random_particle(bounds, config, rng));
  }
  for(std::size_t s = 0; s < std::min(seeds.size(), pop.size()); ++s) {
    if(seeds[s].size() != bounds.dimension()) {
      throw std::invalid_argument("initialize: seed dimension mismatch");
    }
    pop[s].position = seeds[s];
    detail::clamp_into(pop[s].position, nullptr, bounds);
  }
  std::vector<std::size_t> all(pop.size());
  std::iota(all.begin(), all.end(), 0);
  evaluate_fresh(pop, all, fitness, config.workers);
  return pop;
}

// Function: neighborhood
//
// Indices of the particles that inform particle i, excluding i itself.
//   closest: k nearest by box-normalized Euclidean distance (ties by index)
//   ring:    k/2 on each side by index, the odd one on the upper side
//   random:  k distinct uniform picks, redrawn on every call
inline std::vector<std::size_t> neighborhood(std::size_t i, std::span<const Particle> pop,
                                             const SwarmConfig& config, const SearchBounds& bounds,
                                             Rng& rng) {
  const std::size_t N = pop.size();
  const std::size_t k = std::min(config.neighbors, N - 1);
  std::vector<std::size_t> out;
  out.reserve(k);
  if(k == 0) return out;

  switch(config.topology) {
    case Topology::closest: {
      std::vector<std::pair<double, std::size_t>> dist;
      dist.reserve(N - 1);
      for(std::size_t j = 0; j < N; ++j) {
        if(j == i) continue;
        double d2 = 0.0;
        for(std::size_t d = 0; d < bounds.dimension(); ++d) {
          const double t = (pop[j].position[d] - pop[i].position[d]) / bounds.width(d);
          d2 += t * t;
        }
        dist.emplace_back(d2, j);
      }
      std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
      for(std::size_t q = 0; q < k; ++q) out.push_back(dist[q].second);
      break;
    }
    case Topology::ring: {
      const std::size_t below = k / 2;
      const std::size_t above = k - below;
      for(std::size_t s = 1; s <= below; ++s) out.push_back((i + N - s % N) % N);
      for(std::size_t s = 1; s <= above; ++s) out.push_back((i + s) % N);
      break;
    }
    case Topology::random: {
      std::vector<std::size_t> others;
      others.reserve(N - 1);
      for(std::size_t j = 0; j < N; ++j) if(j != i) others.push_back(j);
      for(std::size_t q = 0; q < k; ++q) {
        const std::size_t pick = q + rng.index(others.size() - q);
        std::swap(others[q], others[pick]);
        out.push_back(others[q]);
      }
      break;
    }
  }
  return out;
}

// Best personal-best position among particle i and its informers.
inline std::size_t neighborhood_best(std::size_t i, std::span<const std::size_t> informers,
                                     std::span<const Particle> pop) {
  std::size_t best = i;
  for(std::size_t j : informers) {
    const double fj = pop[j].best_fitness, fb = pop[best].best_fitness;
    if(fj < fb || (fj == fb && j < best)) best = j;
  }
  return best;
}

// Function: update_velocity
//
//   v <- w v + c1 r1 (p_best - x) + c2 r2 (n_best - x) + cg rg (g_best - x)
//          + c3 r3 z width
//
// with r* uniform [0,1] per dimension and z uniform [-1,1] per dimension.
// Each component is clamped to +-v_max_frac * width.
inline std::vector<double> update_velocity(const Particle& p,
                                           std::span<const double> neighborhood_best,
                                           std::span<const double> global_best,
                                           const SwarmConfig& config, const SearchBounds& bounds,
                                           Rng& rng) {
  const std::size_t D = p.position.size();
  std::vector<double> v(D);
  for(std::size_t d = 0; d < D; ++d) {
    const double x = p.position[d];
    const double r1 = rng.uniform();
    const double r2 = rng.uniform();
    const double rg = rng.uniform();
    const double r3 = rng.uniform();
    const double z = rng.uniform(-0.5, 0.5);      // unit box, centred
    double vd = config.inertia * p.velocity[d]
              + config.cognitive * r1 * (p.best_position[d] - x)
              + config.social * r2 * (neighborhood_best[d] - x)
              + config.global * rg * (global_best[d] - x)
              + config.repulsion * r3 * z * bounds.width(d);
    const double vmax = config.v_max_frac * bounds.width(d);
    v[d] = std::clamp(vd, -vmax, vmax);
  }
  return v;
}

// Function: local_search
//
// For s = 1..steps probes x + v / 2^(s-1) and x - v / 2^(s-1) (clamped to
// the box) and moves to the better probe if it strictly improves the current
// fitness. Velocity is left untouched. Returns the number of evaluations.
template <typename F>
std::size_t local_search(Particle& p, F& fitness, std::size_t steps, const SearchBounds& bounds) {
  const bool moving = std::any_of(p.velocity.begin(), p.velocity.end(),
                                  [](double v) { return v != 0.0; });
  if(!moving) return 0;

  std::size_t evals = 0;
  double scale = 1.0;
  for(std::size_t s = 0; s < steps; ++s, scale *= 0.5) {
    std::vector<double> fwd = p.position, bwd = p.position;
    for(std::size_t d = 0; d < fwd.size(); ++d) {
      fwd[d] += scale * p.velocity[d];
      bwd[d] -= scale * p.velocity[d];
    }
    detail::clamp_into(fwd, nullptr, bounds);
    detail::clamp_into(bwd, nullptr, bounds);
    const double f_fwd = detail::safe_call(fitness, fwd);
    const double f_bwd = detail::safe_call(fitness, bwd);
    evals += 2;
    if(f_fwd <= f_bwd) {
      if(f_fwd < p.fitness) { p.position = std::move(fwd); p.fitness = f_fwd; }
    }
    else if(f_bwd < p.fitness) {
      p.position = std::move(bwd);
      p.fitness = f_bwd;
    }
  }
  return evals;
}

// Function: reset_worst
//
// Re-draws the `count` particles with the highest current fitness (ties: the
// lower index is treated as worse) and evaluates them. Returns their indices.
template <typename F>
std::vector<std::size_t> reset_worst(std::vector<Particle>& pop, std::size_t count,
                                     const SearchBounds& bounds, const SwarmConfig& config,
                                     Rng& rng, F& fitness) {
  if(count == 0) return {};
  if(count >= pop.size()) {
    throw std::invalid_argument("reset_worst: count must be < population size");
  }
  std::vector<std::size_t> order(pop.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pop[a].fitness > pop[b].fitness;
  });
  order.resize(count);
  std::sort(order.begin(), order.end());
  for(std::size_t i : order) {
    pop[i] = random_particle(bounds, config, rng);
  }
  evaluate_fresh(pop, order, fitness, config.workers);
  return order;
}

// Function: optimize
//
// Minimizes `fitness` (callable as double(std::span<const double>), safe for
// concurrent calls) over the box, optionally warm-started from `seeds`.
// A `symmetry` map, when given, keeps every particle in canonical form so
// that particles describing the same solution also share coordinates.
//
// Stops after config.iterations or before an iteration that could overrun
// config.eval_budget.
template <typename F>
SwarmResult optimize(F&& fitness, const SearchBounds& bounds, const SwarmConfig& config,
                     const ProgressCallback& progress = {},
                     std::span<const std::vector<double>> seeds = {},
                     const SymmetryMap& symmetry = {}) {
  config.validate();
  bounds.validate();

  Rng rng(config.seed);
  const std::size_t N = config.particles;
  const std::size_t D = bounds.dimension();

  std::vector<Particle> pop = initialize(bounds, config, rng, fitness, seeds);
  for(auto& p : pop) detail::canonicalize(p, symmetry);

  SwarmResult result;
  result.evaluations = N;

  auto absorb = [&]() {
    for(std::size_t i = 0; i < N; ++i) {
      if(pop[i].best_fitness < result.best_fitness) {
        result.best_fitness = pop[i].best_fitness;
        result.best_position = pop[i].best_position;
      }
    }
  };

  auto record = [&](std::size_t iteration) {
    absorb();
    double sum = 0.0;
    std::size_t finite = 0;
    for(const auto& p : pop) {
      if(std::isfinite(p.fitness)) { sum += p.fitness; ++finite; }
    }
    TraceRow row {iteration, result.best_fitness,
                  finite ? sum / static_cast<double>(finite) : std::numeric_limits<double>::infinity(),
                  result.evaluations};
    result.trace.push_back(row);
    if(progress) progress(row);
  };

  // first particle is the fallback when every evaluation failed
  result.best_position = pop.front().position;
  record(0);

  const std::size_t per_iteration = N * (1 + 2 * config.local_search_steps) + config.worst_reset;

  for(std::size_t it = 1; it <= config.iterations; ++it) {
    if(config.eval_budget && result.evaluations + per_iteration > *config.eval_budget) break;

    // informers and velocities, drawn sequentially
    std::vector<std::size_t> leader(N);
    for(std::size_t i = 0; i < N; ++i) {
      const auto informers = neighborhood(i, pop, config, bounds, rng);
      leader[i] = neighborhood_best(i, informers, pop);
    }
    const std::vector<double> global_best = result.best_position;
    std::vector<std::vector<double>> velocity(N);
    for(std::size_t i = 0; i < N; ++i) {
      velocity[i] = update_velocity(pop[i], pop[leader[i]].best_position, global_best, config,
                                    bounds, rng);
    }
    for(std::size_t i = 0; i < N; ++i) {
      Particle& p = pop[i];
      p.velocity = std::move(velocity[i]);
      for(std::size_t d = 0; d < D; ++d) p.position[d] += p.velocity[d];
      detail::clamp_into(p.position, &p.velocity, bounds);
      if(symmetry) symmetry(p.position, p.velocity);
    }

    // move, then probe along the new velocity
    std::vector<std::size_t> probes(N, 0);
    parallel_for(N, config.workers, [&](std::size_t i) {
      Particle& p = pop[i];
      p.fitness = detail::safe_call(fitness, p.position);
      detail::adopt_if_better(p);
      probes[i] = local_search(p, fitness, config.local_search_steps, bounds);
      detail::adopt_if_better(p);
      detail::canonicalize(p, symmetry);
    });
    result.evaluations += N;
    for(std::size_t c : probes) result.evaluations += c;

    // the best-ever record is elitist: absorb before any personal best is discarded
    absorb();
    const auto fresh = reset_worst(pop, config.worst_reset, bounds, config, rng, fitness);
    for(std::size_t i : fresh) detail::canonicalize(pop[i], symmetry);
    result.evaluations += fresh.size();
    record(it);
  }

  return result;
}

}  // end of namespace multitrack -------------------------------------------
