#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace tabsniper {

/// Dense row-major cost matrix.
template <typename T>
class CostMatrix {
 public:
  CostMatrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

 private:
  std::size_t rows_, cols_;
  std::vector<T> data_;
};

// Shortest augmenting path Hungarian method with row/column potentials,
// O(rows^2 * cols). Requires rows <= cols; every row is assigned a distinct
// column and the total cost is minimal. Returns column index per row.
template <typename T>
std::vector<std::size_t> solve_assignment(const CostMatrix<T>& cost) {
  const std::size_t n = cost.rows();
  const std::size_t m = cost.cols();
  if (n > m) throw std::invalid_argument("solve_assignment: more rows than columns");
  if (n == 0) return {};

  const T inf = std::numeric_limits<T>::max() / 4;
  // 1-based indexing; index 0 is the virtual source.
  std::vector<T> u(n + 1, 0), v(m + 1, 0);
  std::vector<std::size_t> match_col(m + 1, 0), way(m + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    match_col[0] = i;
    std::size_t j0 = 0;
    std::vector<T> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match_col[j0];
      T delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const T cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[match_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match_col[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match_col[j0] = match_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> row_to_col(n, 0);
  for (std::size_t j = 1; j <= m; ++j)
    if (match_col[j] != 0) row_to_col[match_col[j] - 1] = j - 1;
  return row_to_col;
}

}  // namespace tabsniper
