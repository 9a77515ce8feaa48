#pragma once

// Rectangular linear assignment (Kuhn-Munkres, shortest augmenting path).
//
// Rows are measurements, columns are objects, rows >= columns. Every object
// receives exactly one distinct measurement; surplus measurements stay unused.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace multitrack {

// Class: CostMatrix
//
// Dense row-major m x n grid of nonnegative finite costs.
class CostMatrix {

  public:

    CostMatrix() = default;

    CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : _rows(rows), _cols(cols), _data(rows * cols, fill) {}

    CostMatrix(std::initializer_list<std::initializer_list<double>> init) {
      _rows = init.size();
      _cols = _rows ? init.begin()->size() : 0;
      _data.reserve(_rows * _cols);
      for(const auto& row : init) {
        if(row.size() != _cols) {
          throw std::invalid_argument("CostMatrix: ragged initializer");
        }
        _data.insert(_data.end(), row.begin(), row.end());
      }
    }

    std::size_t rows() const { return _rows; }
    std::size_t cols() const { return _cols; }

    double& operator()(std::size_t r, std::size_t c) { return _data[r * _cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return _data[r * _cols + c]; }

    // Throws std::invalid_argument unless rows >= cols >= 1 and every entry
    // is finite and nonnegative. The message names the offending index.
    void validate() const {
      if(_cols == 0) {
        throw std::invalid_argument("CostMatrix: no columns (need n >= 1)");
      }
      if(_rows < _cols) {
        std::ostringstream oss;
        oss << "CostMatrix: " << _rows << " rows < " << _cols << " columns";
        throw std::invalid_argument(oss.str());
      }
      for(std::size_t r = 0; r < _rows; ++r) {
        for(std::size_t c = 0; c < _cols; ++c) {
          const double v = (*this)(r, c);
          if(!std::isfinite(v) || v < 0.0) {
            std::ostringstream oss;
            oss << "CostMatrix: invalid entry " << v << " at (" << r << ", " << c << ")";
            throw std::invalid_argument(oss.str());
          }
        }
      }
    }

  private:

    std::size_t _rows {0};
    std::size_t _cols {0};
    std::vector<double> _data;
};

struct Assignment {
  std::vector<std::size_t> row_of;   // object index -> measurement row
  double total_cost {0.0};
};

// Sum of the selected entries, accumulated in ascending object order.
inline double selection_cost(const CostMatrix& costs, const std::vector<std::size_t>& row_of) {
  double total = 0.0;
  for(std::size_t i = 0; i < row_of.size(); ++i) {
    total += costs(row_of[i], i);
  }
  return total;
}

// Function: solve
//
// Exact minimum-cost injective map objects -> measurements. Runs one
// Dijkstra-like augmentation per object over the measurement rows with dual
// potentials, O(n^2 m). Ties go to the lowest measurement index reached
// first in the ascending scan.
//
// No epsilon is used on reduced costs. Near-ties within rounding may select
// either optimum.
inline Assignment solve(const CostMatrix& costs) {

  costs.validate();

  const std::size_t m = costs.rows();
  const std::size_t n = costs.cols();
  constexpr double inf = std::numeric_limits<double>::infinity();
  constexpr std::size_t none = 0;

  // 1-based indices; slot 0 of the row arrays is the virtual root.
  std::vector<double> u(n + 1, 0.0);         // object potentials
  std::vector<double> v(m + 1, 0.0);         // measurement potentials
  std::vector<std::size_t> owner(m + 1, none);  // row -> object
  std::vector<std::size_t> way(m + 1, 0);
  std::vector<double> minv(m + 1);
  std::vector<char> used(m + 1);

  for(std::size_t i = 1; i <= n; ++i) {
    owner[0] = i;
    std::size_t r0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[r0] = 1;
      const std::size_t i0 = owner[r0];
      double delta = inf;
      std::size_t r1 = 0;
      for(std::size_t r = 1; r <= m; ++r) {
        if(used[r]) continue;
        const double cur = costs(r - 1, i0 - 1) - u[i0] - v[r];
        if(cur < minv[r]) {
          minv[r] = cur;
          way[r] = r0;
        }
        if(minv[r] < delta) {
          delta = minv[r];
          r1 = r;
        }
      }
      for(std::size_t r = 0; r <= m; ++r) {
        if(used[r]) {
          u[owner[r]] += delta;
          v[r] -= delta;
        }
        else {
          minv[r] -= delta;
        }
      }
      r0 = r1;
    } while(owner[r0] != none);

    // flip the alternating path back to the root
    do {
      const std::size_t r1 = way[r0];
      owner[r0] = owner[r1];
      r0 = r1;
    } while(r0 != 0);
  }

  Assignment result;
  result.row_of.assign(n, 0);
  for(std::size_t r = 1; r <= m; ++r) {
    if(owner[r] != none) {
      result.row_of[owner[r] - 1] = r - 1;
    }
  }
  result.total_cost = selection_cost(costs, result.row_of);
  return result;
}

// Function: brute_force_solve
//
// Exhaustive enumeration of all m!/(m-n)! injective maps. Test oracle only;
// refuses m > 9. The first optimum in lexicographic order of row_of wins.
inline Assignment brute_force_solve(const CostMatrix& costs) {

  costs.validate();

  const std::size_t m = costs.rows();
  const std::size_t n = costs.cols();
  if(m > 9) {
    throw std::invalid_argument("brute_force_solve: m = " + std::to_string(m) + " exceeds 9");
  }

  Assignment best;
  best.total_cost = std::numeric_limits<double>::infinity();

  std::vector<std::size_t> row_of(n);
  std::vector<char> taken(m, 0);

  auto recurse = [&](auto&& self, std::size_t obj) -> void {
    if(obj == n) {
      const double total = selection_cost(costs, row_of);
      if(total < best.total_cost) {
        best.total_cost = total;
        best.row_of = row_of;
      }
      return;
    }
    for(std::size_t r = 0; r < m; ++r) {
      if(taken[r]) continue;
      taken[r] = 1;
      row_of[obj] = r;
      self(self, obj + 1);
      taken[r] = 0;
    }
  };
  recurse(recurse, 0);

  return best;
}

}  // end of namespace multitrack -------------------------------------------
