#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "multitrack/assignment.hpp"

using namespace multitrack;

namespace {

// Independent oracle: enumerate every ordered choice of n distinct rows with
// std::next_permutation over a 0/1 selection mask and all its orderings.
double enumerate_min(const CostMatrix& C) {
  const std::size_t m = C.rows(), n = C.cols();
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> mask(m, 0);
  std::fill(mask.end() - static_cast<std::ptrdiff_t>(n), mask.end(), 1);
  do {
    std::vector<std::size_t> rows;
    for(std::size_t k = 0; k < m; ++k) if(mask[k]) rows.push_back(k);
    do {
      double s = 0.0;
      for(std::size_t i = 0; i < n; ++i) s += C(rows[i], i);
      best = std::min(best, s);
    } while(std::next_permutation(rows.begin(), rows.end()));
  } while(std::next_permutation(mask.begin(), mask.end()));
  return best;
}

CostMatrix random_matrix(std::mt19937_64& gen, std::size_t m, std::size_t n) {
  std::uniform_real_distribution<double> U(0.0, 10.0);
  CostMatrix C(m, n);
  for(std::size_t r = 0; r < m; ++r)
    for(std::size_t c = 0; c < n; ++c) C(r, c) = U(gen);
  return C;
}

bool injective(const std::vector<std::size_t>& row_of, std::size_t m) {
  std::set<std::size_t> seen(row_of.begin(), row_of.end());
  return seen.size() == row_of.size() &&
         std::all_of(row_of.begin(), row_of.end(), [m](std::size_t r) { return r < m; });
}

}  // namespace

TEST(Assignment, ZeroDiagonalTwoByTwo) {
  const auto a = solve(CostMatrix {{0, 1}, {1, 0}});
  EXPECT_EQ(a.row_of, (std::vector<std::size_t> {0, 1}));
  EXPECT_EQ(a.total_cost, 0.0);
}

TEST(Assignment, ThreeByTwoExampleMatchesEnumeration) {
  // maps: (0,1)=4 (0,2)=6 (1,0)=3 (1,2)=4 (2,0)=3 (2,1)=3
  const CostMatrix C {{4, 1}, {2, 0}, {3, 2}};
  const auto a = solve(C);
  EXPECT_EQ(a.total_cost, 3.0);
  EXPECT_EQ(a.total_cost, enumerate_min(C));
  EXPECT_TRUE(injective(a.row_of, 3));
  EXPECT_EQ(selection_cost(C, a.row_of), 3.0);
  EXPECT_EQ(brute_force_solve(C).total_cost, 3.0);
}

TEST(Assignment, AllEqualSquareGivesIdentity) {
  for(std::size_t n : {1u, 2u, 5u, 8u}) {
    CostMatrix C(n, n, 2.5);
    const auto a = solve(C);
    EXPECT_EQ(a.total_cost, 2.5 * static_cast<double>(n));
    std::vector<std::size_t> id(n);
    std::iota(id.begin(), id.end(), 0);
    EXPECT_EQ(a.row_of, id);
  }
}

TEST(Assignment, AllZeroTwoByTwoTieBreak) {
  const CostMatrix C {{0, 0}, {0, 0}};
  EXPECT_EQ(solve(C).row_of, (std::vector<std::size_t> {0, 1}));
  const auto b = brute_force_solve(C);
  EXPECT_EQ(b.total_cost, 0.0);
  EXPECT_EQ(b.row_of, (std::vector<std::size_t> {0, 1}));
}

TEST(Assignment, OneByOne) {
  EXPECT_EQ(brute_force_solve(CostMatrix {{7.25}}).total_cost, 7.25);
  EXPECT_EQ(solve(CostMatrix {{7.25}}).total_cost, 7.25);
}

TEST(Assignment, OracleEquivalenceOnRandomMatrices) {
  std::mt19937_64 gen(42);
  std::uniform_int_distribution<std::size_t> M(2, 7);
  for(int trial = 0; trial < 200; ++trial) {
    const std::size_t m = M(gen);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, m)(gen);
    const CostMatrix C = random_matrix(gen, m, n);
    const auto a = solve(C);
    ASSERT_TRUE(injective(a.row_of, m)) << "trial " << trial;
    ASSERT_EQ(a.total_cost, selection_cost(C, a.row_of)) << "trial " << trial;
    ASSERT_EQ(a.total_cost, brute_force_solve(C).total_cost) << "trial " << trial;
    ASSERT_EQ(a.total_cost, enumerate_min(C)) << "trial " << trial;
  }
}

TEST(Assignment, ColumnShiftKeepsArgmin) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> shift(0.0, 50.0);
  for(int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 6, n = 4;
    const CostMatrix C = random_matrix(gen, m, n);
    CostMatrix S = C;
    for(std::size_t c = 0; c < n; ++c) {
      const double s = shift(gen);
      for(std::size_t r = 0; r < m; ++r) S(r, c) += s;
    }
    EXPECT_EQ(solve(C).row_of, solve(S).row_of) << "trial " << trial;
  }
}

TEST(Assignment, ScalingMultipliesCost) {
  std::mt19937_64 gen(11);
  for(int trial = 0; trial < 100; ++trial) {
    const CostMatrix C = random_matrix(gen, 7, 5);
    CostMatrix S = C;
    const double lambda = 4.0;   // power of two: scaled sums stay exact
    for(std::size_t r = 0; r < 7; ++r)
      for(std::size_t c = 0; c < 5; ++c) S(r, c) *= lambda;
    const auto a = solve(C), b = solve(S);
    EXPECT_EQ(a.row_of, b.row_of);
    EXPECT_EQ(b.total_cost, lambda * a.total_cost);
  }
}

TEST(Assignment, LargerProblemsStayOptimalAgainstBruteForce) {
  std::mt19937_64 gen(3);
  for(int trial = 0; trial < 20; ++trial) {
    const CostMatrix C = random_matrix(gen, 9, 6);
    EXPECT_EQ(solve(C).total_cost, brute_force_solve(C).total_cost);
  }
}

TEST(Assignment, IntegerTiesStillOptimal) {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> U(0, 2);
  for(int trial = 0; trial < 200; ++trial) {
    CostMatrix C(5, 4);
    for(std::size_t r = 0; r < 5; ++r)
      for(std::size_t c = 0; c < 4; ++c) C(r, c) = U(gen);
    const auto a = solve(C);
    EXPECT_TRUE(injective(a.row_of, 5));
    EXPECT_EQ(a.total_cost, enumerate_min(C));
  }
}

TEST(Assignment, Deterministic) {
  std::mt19937_64 gen(9);
  const CostMatrix C = random_matrix(gen, 12, 10);
  const auto a = solve(C), b = solve(C);
  EXPECT_EQ(a.row_of, b.row_of);
  EXPECT_EQ(a.total_cost, b.total_cost);
}

TEST(AssignmentErrors, FewerRowsThanColumns) {
  EXPECT_THROW(solve(CostMatrix {{1, 2, 3}}), std::invalid_argument);
}

TEST(AssignmentErrors, NoColumns) {
  EXPECT_THROW(solve(CostMatrix(3, 0)), std::invalid_argument);
}

TEST(AssignmentErrors, InvalidEntriesNameTheIndex) {
  const double bad[] = {-1.0, std::numeric_limits<double>::quiet_NaN(),
                        std::numeric_limits<double>::infinity()};
  for(double v : bad) {
    CostMatrix C(3, 2, 1.0);
    C(2, 1) = v;
    try {
      solve(C);
      FAIL() << "accepted " << v;
    }
    catch(const std::invalid_argument& ex) {
      EXPECT_NE(std::string(ex.what()).find("(2, 1)"), std::string::npos) << ex.what();
    }
  }
}

TEST(AssignmentErrors, BruteForceRejectsLargeM) {
  EXPECT_THROW(brute_force_solve(CostMatrix(10, 2, 1.0)), std::invalid_argument);
}

TEST(AssignmentErrors, RaggedInitializer) {
  EXPECT_THROW((CostMatrix {{1, 2}, {3}}), std::invalid_argument);
}
