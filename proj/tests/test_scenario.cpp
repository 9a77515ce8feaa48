#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "multitrack/scenario.hpp"

using namespace multitrack;

namespace {

const LabeledObservationSet& default_campaign() {
  static const LabeledObservationSet set = generate(ScenarioConfig {});
  return set;
}

void expect_elements(const OrbitalElements& el, double a, double e, double inc_deg, double raan_deg,
                     double theta_deg) {
  EXPECT_EQ(el.a, a);
  EXPECT_EQ(el.e, e);
  EXPECT_NEAR(el.inc, deg2rad(inc_deg), 1e-15);
  EXPECT_NEAR(el.raan, deg2rad(raan_deg), 1e-15);
  EXPECT_NEAR(el.theta, deg2rad(theta_deg), 1e-15);
  EXPECT_EQ(el.epoch, 0.0);
}

}  // namespace

TEST(Truth, CatalogueRows) {
  const auto t = default_truth();
  ASSERT_EQ(t.size(), 10u);
  expect_elements(t[0], 42064, 0.02, 0.5, 0, -40);
  expect_elements(t[1], 42264, 0.04, 1.0, 10, -52);
  expect_elements(t[2], 42114, 0.06, 0.6, 20, -64);
  expect_elements(t[3], 42214, 0.08, 1.1, 0, -46);
  expect_elements(t[4], 42144, 0.03, 0.7, 10, -58);
  expect_elements(t[5], 42184, 0.05, 1.2, 20, -70);
  expect_elements(t[6], 42084, 0.02, 0.8, 0, -42);
  expect_elements(t[7], 42244, 0.04, 1.3, 10, -54);
  expect_elements(t[8], 42124, 0.06, 0.9, 20, -66);
  expect_elements(t[9], 42204, 0.08, 1.4, 0, -48);
  for(const auto& el : t) EXPECT_NO_THROW(validate(el));
}

TEST(Truth, SubsetUsesOneBasedRows) {
  const auto s = truth_subset({1, 2, 6});
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[2], default_truth()[5]);
  EXPECT_THROW(truth_subset({0}), std::invalid_argument);
  EXPECT_THROW(truth_subset({11}), std::invalid_argument);
}

TEST(Schedule, DefaultHasThirtyDates) {
  const auto d = schedule(ScenarioConfig {});
  ASSERT_EQ(d.size(), 30u);
  for(std::size_t j = 1; j < d.size(); ++j) {
    EXPECT_GT(d[j], d[j - 1]);
    if(j % 10 != 0) {
      EXPECT_EQ(d[j] - d[j - 1], 1800.0);
    }
  }
  EXPECT_EQ(d[0], kDefaultNightOffset);
  EXPECT_EQ(d[10], kDefaultNightOffset + 86400.0);
  // ten photos span 4.5 h of a 5 h night
  EXPECT_EQ(d[9] - d[0], 4.5 * 3600.0);
}

TEST(Schedule, SingleDate) {
  ScenarioConfig c;
  c.nights = 1;
  c.photos_per_night = 1;
  c.night_start_offsets = {1234.0};
  EXPECT_EQ(schedule(c), (std::vector<double> {1234.0}));
}

TEST(Schedule, OverlappingNightsRejected) {
  ScenarioConfig c;
  c.night_start_offsets = {0.0, 10000.0, 200000.0};
  EXPECT_THROW(schedule(c), std::invalid_argument);
}

TEST(Schedule, PinnedOffsetIsTheGridOptimum) {
  EXPECT_EQ(best_night_offset(ScenarioConfig {}, 300.0), kDefaultNightOffset);
  EXPECT_GE(min_truth_elevation(ScenarioConfig {}), deg2rad(10.0));
}

TEST(Generate, BatchSizesFollowFictitiousCounts) {
  const auto& set = default_campaign();
  const auto counts = ScenarioConfig::default_fictitious_counts(30);
  ASSERT_EQ(set.observations.date_count(), 30u);
  std::set<std::size_t> sizes;
  for(std::size_t j = 0; j < 30; ++j) {
    const std::size_t m = set.observations.batches[j].size();
    EXPECT_EQ(m, 10 + counts[j]);
    sizes.insert(m);
  }
  EXPECT_EQ(sizes, (std::set<std::size_t> {10, 11, 12}));
}

TEST(Generate, LabelsAreCompleteAndInjective) {
  const auto& set = default_campaign();
  for(std::size_t j = 0; j < 30; ++j) {
    const auto& labels = set.labels[j];
    ASSERT_EQ(labels.size(), set.observations.batches[j].size());
    std::vector<int> objects;
    for(int l : labels) if(l != kFictitious) objects.push_back(l);
    std::sort(objects.begin(), objects.end());
    std::vector<int> expect(10);
    std::iota(expect.begin(), expect.end(), 0);
    EXPECT_EQ(objects, expect);
  }
}

TEST(Generate, NoFictitiousNoNoiseGivesZeroFitness) {
  ScenarioConfig c;
  c.fictitious_counts.assign(30, 0);
  const auto set = generate(c);
  EXPECT_EQ(evaluate(set.truth, set.observations).fitness, 0.0);
}

TEST(Generate, TruthZeroWithFictitiousRows) {
  const auto& set = default_campaign();
  const auto report = evaluate(set.truth, set.observations);
  EXPECT_EQ(report.fitness, 0.0);
  const auto score = score_assignments(report, set.labels, 10);
  EXPECT_EQ(score.purity, 1.0);
  EXPECT_EQ(score.consistency, 1.0);
}

TEST(Generate, SameSeedSameCampaign) {
  const auto a = generate(ScenarioConfig {});
  const auto& b = default_campaign();
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.observations.dates, b.observations.dates);
  for(std::size_t j = 0; j < 30; ++j) EXPECT_EQ(a.observations.batches[j], b.observations.batches[j]);
}

TEST(Generate, DifferentSeedShufflesDifferently) {
  ScenarioConfig c;
  c.seed = 2;
  EXPECT_NE(generate(c).labels, default_campaign().labels);
}

TEST(Generate, FictitiousRowsInsideInflatedBox) {
  const auto& set = default_campaign();
  const double margin = deg2rad(0.5);
  for(std::size_t j = 0; j < 30; ++j) {
    const auto& rows = set.observations.batches[j];
    double el_lo = 10, el_hi = -10, az_lo = 10, az_hi = -10;
    double ref = 0.0;
    for(std::size_t k = 0; k < rows.size(); ++k) {
      if(set.labels[j][k] != 0) continue;
      ref = rows[k].azimuth;
    }
    for(std::size_t k = 0; k < rows.size(); ++k) {
      if(set.labels[j][k] == kFictitious) continue;
      el_lo = std::min(el_lo, rows[k].elevation);
      el_hi = std::max(el_hi, rows[k].elevation);
      const double daz = wrap_angle(rows[k].azimuth - ref);
      az_lo = std::min(az_lo, daz);
      az_hi = std::max(az_hi, daz);
    }
    for(std::size_t k = 0; k < rows.size(); ++k) {
      if(set.labels[j][k] != kFictitious) continue;
      EXPECT_GE(rows[k].elevation, el_lo - margin - 1e-12);
      EXPECT_LE(rows[k].elevation, el_hi + margin + 1e-12);
      const double daz = wrap_angle(rows[k].azimuth - ref);
      EXPECT_GE(daz, az_lo - margin - 1e-12);
      EXPECT_LE(daz, az_hi + margin + 1e-12);
    }
  }
}

TEST(Generate, NoiseMakesTruthImperfect) {
  ScenarioConfig c;
  c.measurement_noise_sigma = deg2rad(0.01);
  const auto a = generate(c), b = generate(c);
  const double f = evaluate(a.truth, a.observations).fitness;
  EXPECT_GT(f, 0.0);
  EXPECT_EQ(f, evaluate(b.truth, b.observations).fitness);
  // about two unit-sigma components per true row
  EXPECT_NEAR(f / (2.0 * 300.0), 1.0, 0.3);
}

TEST(Generate, InvisibleTruthIsReported) {
  ScenarioConfig c;
  c.min_elevation = deg2rad(60.0);
  try {
    generate(c);
    FAIL();
  }
  catch(const std::runtime_error& ex) {
    EXPECT_NE(std::string(ex.what()).find("object"), std::string::npos);
  }
}

TEST(Generate, ConfigValidation) {
  ScenarioConfig c;
  c.fictitious_counts.pop_back();
  EXPECT_THROW(generate(c), std::invalid_argument);
  c = ScenarioConfig {};
  c.truth.clear();
  EXPECT_THROW(generate(c), std::invalid_argument);
  c = ScenarioConfig {};
  c.station.latitude = deg2rad(95.0);
  EXPECT_THROW(generate(c), std::invalid_argument);
}

TEST(Generate, RowShuffleInvariance) {
  const auto& set = default_campaign();
  LabeledObservationSet shuffled = set;
  std::mt19937_64 gen(3);
  for(std::size_t j = 0; j < 30; ++j) {
    auto& rows = shuffled.observations.batches[j];
    auto& labels = shuffled.labels[j];
    std::vector<std::size_t> perm(rows.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    std::vector<Measurement> r2;
    std::vector<int> l2;
    for(std::size_t k : perm) {
      r2.push_back(set.observations.batches[j][k]);
      l2.push_back(set.labels[j][k]);
    }
    rows = r2;
    labels = l2;
  }
  Candidate c = set.truth;
  c.elements[0].a += 5.0;
  c.elements[3].theta += 0.001;
  const auto a = evaluate(c, set.observations), b = evaluate(c, shuffled.observations);
  EXPECT_EQ(a.fitness, b.fitness);
  EXPECT_EQ(a.per_date_costs, b.per_date_costs);
  EXPECT_EQ(score_assignments(a, set.labels, 10).purity,
            score_assignments(b, shuffled.labels, 10).purity);
}

TEST(Score, AdversarialFictitiousOnlyGivesZeroPurity) {
  // two dates, one object, a fictitious row at index 1 on each date
  FitnessReport r;
  r.assignments = {{{1}, 0.0}, {{1}, 0.0}};
  const std::vector<std::vector<int>> labels {{0, kFictitious}, {0, kFictitious}};
  const auto s = score_assignments(r, labels, 1);
  EXPECT_EQ(s.purity, 0.0);
  EXPECT_EQ(s.consistency, 0.0);
}

TEST(Score, SwappedIdentityHalfwayIsInconsistent) {
  // two objects keep their rows pure but swap identities on the second date
  FitnessReport r;
  r.assignments = {{{0, 1}, 0.0}, {{1, 0}, 0.0}};
  const std::vector<std::vector<int>> labels {{0, 1}, {0, 1}};
  const auto s = score_assignments(r, labels, 2);
  EXPECT_EQ(s.purity, 1.0);
  EXPECT_EQ(s.consistency, 0.5);
}

TEST(Score, RelabelingIsFound) {
  FitnessReport r;
  r.assignments = {{{1, 0}, 0.0}, {{0, 2}, 0.0}};
  const std::vector<std::vector<int>> labels {{0, 1, kFictitious}, {1, kFictitious, 0}};
  const auto s = score_assignments(r, labels, 2);
  EXPECT_EQ(s.purity, 1.0);
  EXPECT_EQ(s.consistency, 1.0);
  EXPECT_EQ(s.relabel, (std::vector<std::size_t> {1, 0}));
  EXPECT_EQ(s.per_date_purity, (std::vector<double> {1.0, 1.0}));
}

TEST(Score, RandomCandidateInRange) {
  const auto& set = default_campaign();
  std::mt19937_64 gen(5);
  const SearchBounds b = orbit_search_bounds(10);
  for(int trial = 0; trial < 10; ++trial) {
    std::vector<double> x(b.dimension());
    for(std::size_t d = 0; d < x.size(); ++d)
      x[d] = std::uniform_real_distribution<double>(b.lower[d], b.upper[d])(gen);
    const auto s = score_assignments(evaluate(Candidate::unflatten(x), set.observations), set.labels, 10);
    EXPECT_GE(s.purity, 0.0);
    EXPECT_LE(s.purity, 1.0);
    EXPECT_GE(s.consistency, 0.0);
    EXPECT_LE(s.consistency, s.purity);
  }
}

TEST(Score, SizeMismatchRejected) {
  const auto& set = default_campaign();
  const auto report = evaluate(set.truth, set.observations);
  auto labels = set.labels;
  labels.pop_back();
  EXPECT_THROW(score_assignments(report, labels, 10), std::invalid_argument);
  EXPECT_THROW(score_assignments(report, set.labels, 9), std::invalid_argument);
}

TEST(Bounds, OrbitBoxLayout) {
  const auto b = orbit_search_bounds(2);
  ASSERT_EQ(b.dimension(), 10u);
  EXPECT_EQ(b.lower[0], 42164.0 - 200.0);
  EXPECT_EQ(b.upper[0], 42164.0 + 200.0);
  EXPECT_EQ(b.upper[1], 0.1);
  EXPECT_NEAR(b.upper[2], deg2rad(1.5), 1e-15);
  EXPECT_EQ(b.lower[3], -kPi);
  EXPECT_EQ(b.upper[9], kPi);
  EXPECT_NO_THROW(b.validate());
}
