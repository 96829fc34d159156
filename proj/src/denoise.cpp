#include "rogpl/denoise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rogpl {
namespace {

constexpr int kKnnBlockRows = 256;

// y = (I - alpha*S) x, with S given as a CSR matrix.
void apply_system(const CsrMatrix& s, double alpha, const Vector& x, Vector& y) {
  for (int i = 0; i < s.rows; ++i) {
    double acc = 0.0;
    for (std::size_t k = s.row_ptr[i]; k < s.row_ptr[i + 1]; ++k) {
      acc += s.values[k] * x[s.col_idx[k]];
    }
    y[i] = x[i] - alpha * acc;
  }
}

}  // namespace

int CleanMask::count() const {
  return static_cast<int>(std::count(keep.begin(), keep.end(), true));
}

int PropagationResult::total_iterations() const {
  return std::accumulate(iterations.begin(), iterations.end(), 0);
}

AffinityGraph build_knn_affinity(const Matrix& z, int k, double beta) {
  const int n = static_cast<int>(z.rows());
  if (k < 1 || k >= n) {
    throw std::invalid_argument("build_knn_affinity: need 1 <= k < n, got k=" + std::to_string(k) +
                                " n=" + std::to_string(n));
  }
  if (!(beta > 0.0)) throw std::invalid_argument("build_knn_affinity: beta must be positive");
  if (!z.allFinite()) throw std::invalid_argument("build_knn_affinity: non-finite embedding");

  AffinityGraph out;
  out.k_nn = k;
  out.beta = beta;
  std::vector<bool> degenerate(n, false);
  for (int i = 0; i < n; ++i) {
    if (z.row(i).isZero(0.0)) {
      degenerate[i] = true;
      out.degenerate_nodes.push_back(i);
    }
  }

  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(n) * k * 2);
  std::vector<int> order(n);
  for (int start = 0; start < n; start += kKnnBlockRows) {
    const int rows = std::min(kKnnBlockRows, n - start);
    const Matrix sims = z.middleRows(start, rows) * z.transpose();
    for (int r = 0; r < rows; ++r) {
      const int i = start + r;
      if (degenerate[i]) continue;
      const auto row = sims.row(r);
      order.resize(n);
      std::iota(order.begin(), order.end(), 0);
      order.erase(order.begin() + i);
      const auto closer = [&](int a, int b) {
        return row[a] != row[b] ? row[a] > row[b] : a < b;
      };
      std::nth_element(order.begin(), order.begin() + (k - 1), order.end(), closer);
      for (int t = 0; t < k; ++t) {
        const int j = order[t];
        if (degenerate[j]) continue;
        const double sim = row[j];
        if (sim <= 0.0) continue;
        const double w = std::pow(sim, beta);
        entries.push_back({i, j, w});
        entries.push_back({j, i, w});
      }
    }
  }
  out.weights = CsrMatrix::from_triplets(n, n, std::move(entries), DuplicatePolicy::kMax);
  return out;
}

AffinityGraph affinity_from_adjacency(const CsrMatrix& adjacency) {
  AffinityGraph out;
  out.k_nn = 0;
  out.beta = 1.0;
  std::vector<Triplet> entries;
  for (int i = 0; i < adjacency.rows; ++i) {
    for (int j : adjacency.row_cols(i)) {
      if (j != i) entries.push_back({i, j, 1.0});
    }
  }
  out.weights = CsrMatrix::from_triplets(adjacency.rows, adjacency.cols, std::move(entries),
                                         DuplicatePolicy::kMax);
  return out;
}

Matrix softmax_rows(const Matrix& scores, double temperature) {
  if (!(temperature > 0.0)) throw std::invalid_argument("softmax temperature must be positive");
  Matrix out(scores.rows(), scores.cols());
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    const auto scaled = (scores.row(i).array() / temperature).eval();
    const auto e = (scaled - scaled.maxCoeff()).exp().eval();
    out.row(i) = e / e.sum();
  }
  return out;
}

SoftLabels assemble_seed_labels(std::span<const int> labels, const CleanMask& prev_clean,
                                const Matrix* scores, int n_classes, double temperature) {
  const int n = static_cast<int>(labels.size());
  if (prev_clean.keep.size() != labels.size()) {
    throw DimensionError("assemble_seed_labels: clean mask size differs from label count");
  }
  SoftLabels out;
  out.role = LabelRole::kSeed;
  out.values = Matrix::Zero(n, n_classes);
  for (int i = 0; i < n; ++i) {
    if (prev_clean.keep[i]) {
      if (labels[i] < 0 || labels[i] >= n_classes) {
        throw std::invalid_argument("assemble_seed_labels: label outside known classes");
      }
      out.values(i, labels[i]) = 1.0;
      continue;
    }
    if (scores == nullptr || scores->rows() != n || scores->cols() != n_classes) {
      throw std::invalid_argument("assemble_seed_labels: missing scores for non-clean node " +
                                  std::to_string(i));
    }
    out.values.row(i) = softmax_rows(scores->row(i), temperature);
  }
  return out;
}

PropagationResult propagate_labels(const AffinityGraph& w, const SoftLabels& seed, double alpha,
                                   double tol, int max_iter) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("propagate_labels: alpha must lie in [0, 1)");
  }
  const CsrMatrix& wm = w.weights;
  const int n = wm.rows;
  if (seed.values.rows() != n) throw DimensionError("propagate_labels: seed rows differ from W");
  if (!wm.is_symmetric(1e-12)) throw std::invalid_argument("propagate_labels: W is not symmetric");

  std::vector<double> inv_sqrt_deg(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double d = 0.0;
    for (double v : wm.row_values(i)) {
      if (v < 0.0) throw std::invalid_argument("propagate_labels: negative affinity");
      d += v;
    }
    inv_sqrt_deg[i] = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
  }
  CsrMatrix s = wm;
  for (int i = 0; i < n; ++i) {
    for (std::size_t k = s.row_ptr[i]; k < s.row_ptr[i + 1]; ++k) {
      s.values[k] *= inv_sqrt_deg[i] * inv_sqrt_deg[s.col_idx[k]];
    }
  }

  const int c = static_cast<int>(seed.values.cols());
  PropagationResult res;
  res.labels.role = LabelRole::kPropagated;
  res.labels.values.resize(n, c);
  res.iterations.assign(c, 0);
  res.residual_norms.assign(c, 0.0);

  Vector b(n), x(n), r(n), p(n), ap(n);
  for (int col = 0; col < c; ++col) {
    b = seed.values.col(col);
    x = b;
    apply_system(s, alpha, x, ap);
    r = b - ap;
    p = r;
    double rr = r.squaredNorm();
    int it = 0;
    while (std::sqrt(rr) > tol && it < max_iter) {
      apply_system(s, alpha, p, ap);
      const double step = rr / p.dot(ap);
      x += step * p;
      r -= step * ap;
      const double rr_next = r.squaredNorm();
      p = r + (rr_next / rr) * p;
      rr = rr_next;
      ++it;
    }
    res.iterations[col] = it;
    res.residual_norms[col] = std::sqrt(rr);
    if (std::sqrt(rr) > tol) res.converged = false;
    res.labels.values.col(col) = x;
  }
  return res;
}

CleanSelection select_clean(const SoftLabels& y_bar, std::span<const int> labels, double eta) {
  const int n = static_cast<int>(y_bar.values.rows());
  const int c = static_cast<int>(y_bar.values.cols());
  if (static_cast<int>(labels.size()) != n) {
    throw DimensionError("select_clean: label count differs from Ybar rows");
  }
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("select_clean: eta outside [0, 1]");
  CleanSelection out;
  out.mask.eta = eta;
  out.mask.keep.assign(n, false);
  out.pseudo_labels.assign(n, 0);
  out.normalized = y_bar.values.cwiseMax(0.0);
  const double chance = 1.0 / c;
  for (int i = 0; i < n; ++i) {
    auto row = out.normalized.row(i);
    const double total = row.sum();
    if (total > 0.0) {
      row /= total;
    } else {
      row.setConstant(chance);
    }
    const int y = labels[i];
    if (y >= 0 && y < c && row[y] > chance) {
      out.mask.keep[i] = true;
    } else {
      out.mask.keep[i] = row.maxCoeff() > eta;
    }
    out.pseudo_labels[i] = argmax_lowest(row);
  }
  return out;
}

}  // namespace rogpl
