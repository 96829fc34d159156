#include "rogpl/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rogpl {

CsrMatrix CsrMatrix::from_triplets(int rows, int cols, std::vector<Triplet> entries,
                                   DuplicatePolicy policy) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix dimension");
  for (const auto& t : entries) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
      throw DimensionError("triplet (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                           ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  CsrMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.row_ptr.assign(static_cast<std::size_t>(rows) + 1, 0);
  m.col_idx.reserve(entries.size());
  m.values.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& t = entries[k];
    const bool duplicate = !m.col_idx.empty() && k > 0 && entries[k - 1].row == t.row &&
                           entries[k - 1].col == t.col;
    if (duplicate) {
      double& v = m.values.back();
      v = policy == DuplicatePolicy::kSum ? v + t.value : std::max(v, t.value);
      continue;
    }
    m.col_idx.push_back(t.col);
    m.values.push_back(t.value);
    ++m.row_ptr[static_cast<std::size_t>(t.row) + 1];
  }
  for (int i = 0; i < rows; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
  return m;
}

CsrMatrix CsrMatrix::identity(int n) {
  CsrMatrix m;
  m.rows = n;
  m.cols = n;
  m.row_ptr.resize(static_cast<std::size_t>(n) + 1);
  m.col_idx.resize(n);
  m.values.assign(n, 1.0);
  for (int i = 0; i <= n; ++i) m.row_ptr[i] = static_cast<std::size_t>(i);
  for (int i = 0; i < n; ++i) m.col_idx[i] = i;
  return m;
}

CsrMatrix CsrMatrix::from_dense(const Matrix& dense, double drop_tol) {
  CsrMatrix m;
  m.rows = static_cast<int>(dense.rows());
  m.cols = static_cast<int>(dense.cols());
  m.row_ptr.assign(static_cast<std::size_t>(m.rows) + 1, 0);
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < m.cols; ++j) {
      const double v = dense(i, j);
      if (std::abs(v) > drop_tol) {
        m.col_idx.push_back(j);
        m.values.push_back(v);
      }
    }
    m.row_ptr[i + 1] = m.col_idx.size();
  }
  return m;
}

Matrix CsrMatrix::to_dense() const {
  Matrix d = Matrix::Zero(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) d(i, col_idx[k]) = values[k];
  }
  return d;
}

double CsrMatrix::at(int i, int j) const {
  const auto cols_i = row_cols(i);
  const auto it = std::lower_bound(cols_i.begin(), cols_i.end(), j);
  if (it == cols_i.end() || *it != j) return 0.0;
  return values[row_ptr[i] + static_cast<std::size_t>(it - cols_i.begin())];
}

bool CsrMatrix::is_symmetric(double tol) const {
  if (rows != cols) return false;
  for (int i = 0; i < rows; ++i) {
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      const int j = col_idx[k];
      const auto cols_j = row_cols(j);
      if (!std::binary_search(cols_j.begin(), cols_j.end(), i)) return false;
      if (std::abs(at(j, i) - values[k]) > tol) return false;
    }
  }
  return true;
}

Matrix spmm(const CsrMatrix& m, const Matrix& x) {
  if (m.cols != x.rows()) {
    throw DimensionError("spmm: " + std::to_string(m.rows) + "x" + std::to_string(m.cols) +
                         " times " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
  }
  Matrix y = Matrix::Zero(m.rows, x.cols());
  for (int i = 0; i < m.rows; ++i) {
    auto yi = y.row(i);
    for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
      yi.noalias() += m.values[k] * x.row(m.col_idx[k]);
    }
  }
  return y;
}

Matrix spmm_transposed(const CsrMatrix& m, const Matrix& x) {
  if (m.rows != x.rows()) {
    throw DimensionError("spmm_transposed: (" + std::to_string(m.rows) + "x" +
                         std::to_string(m.cols) + ")^T times " + std::to_string(x.rows()) + "x" +
                         std::to_string(x.cols()));
  }
  Matrix y = Matrix::Zero(m.cols, x.cols());
  for (int i = 0; i < m.rows; ++i) {
    const auto xi = x.row(i);
    for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
      y.row(m.col_idx[k]).noalias() += m.values[k] * xi;
    }
  }
  return y;
}

}  // namespace rogpl
