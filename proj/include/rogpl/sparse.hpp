#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rogpl/types.hpp"

namespace rogpl {

struct Triplet {
  int row;
  int col;
  double value;
};

/// How duplicate (row, col) entries are merged when assembling a matrix.
enum class DuplicatePolicy { kSum, kMax };

/// Compressed sparse row matrix with sorted column indices per row.
struct CsrMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<int> col_idx;
  std::vector<double> values;

  static CsrMatrix from_triplets(int rows, int cols, std::vector<Triplet> entries,
                                 DuplicatePolicy policy = DuplicatePolicy::kSum);
  static CsrMatrix identity(int n);
  /// Keeps entries whose magnitude exceeds `drop_tol`.
  static CsrMatrix from_dense(const Matrix& dense, double drop_tol = 0.0);

  std::size_t nnz() const { return col_idx.size(); }
  Matrix to_dense() const;
  /// Value at (i, j), zero if not stored. Binary search within the row.
  double at(int i, int j) const;
  bool is_symmetric(double tol = 0.0) const;

  std::span<const int> row_cols(int i) const {
    return {col_idx.data() + row_ptr[i], row_ptr[i + 1] - row_ptr[i]};
  }
  std::span<const double> row_values(int i) const {
    return {values.data() + row_ptr[i], row_ptr[i + 1] - row_ptr[i]};
  }
};

/// m * x. Throws DimensionError when m.cols != x.rows().
Matrix spmm(const CsrMatrix& m, const Matrix& x);

/// transpose(m) * x without materializing the transpose.
Matrix spmm_transposed(const CsrMatrix& m, const Matrix& x);

}  // namespace rogpl
