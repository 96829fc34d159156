// Independent reference implementations used by the unit and acceptance
// tests. Everything here is dense and deliberately naive.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "rogpl/gcn.hpp"
#include "rogpl/prototypes.hpp"
#include "rogpl/types.hpp"

namespace oracle {

using rogpl::Matrix;
using rogpl::Vector;

inline Matrix normalized_adjacency(const Matrix& a) {
  const Eigen::Index n = a.rows();
  Matrix at = a + Matrix::Identity(n, n);
  Vector d = at.rowwise().sum();
  Matrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = at(i, j) / std::sqrt(d(i) * d(j));
  }
  return out;
}

inline Matrix gcn_forward(const rogpl::GcnParams& p, const Matrix& a, const Matrix& x) {
  const Matrix ah = normalized_adjacency(a);
  Matrix h = ah * x * p.w1;
  h.rowwise() += p.b1.transpose();
  h = h.cwiseMax(0.0);
  Matrix z = ah * h * p.w2;
  z.rowwise() += p.b2.transpose();
  return z;
}

/// Dense solve of (I - alpha S) Y = Yt, S = D^-1/2 W D^-1/2 (isolated rows of
/// S are zero).
inline Matrix lp_solve(const Matrix& w, const Matrix& yt, double alpha) {
  const Eigen::Index n = w.rows();
  Vector d = w.rowwise().sum();
  Matrix s = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (d(i) > 0 && d(j) > 0) s(i, j) = w(i, j) / std::sqrt(d(i) * d(j));
    }
  }
  Eigen::MatrixXd sys = Eigen::MatrixXd::Identity(n, n) - alpha * Eigen::MatrixXd(s);
  return sys.fullPivLu().solve(Eigen::MatrixXd(yt));
}

/// Eq. 5 on one row: clip at zero, renormalize, then the two branches.
inline bool clean_rule(std::vector<double> row, int y, double eta) {
  const double c = static_cast<double>(row.size());
  double sum = 0.0;
  for (double& v : row) {
    v = std::max(v, 0.0);
    sum += v;
  }
  for (double& v : row) v = sum > 0.0 ? v / sum : 1.0 / c;
  if (row[y] > 1.0 / c) return true;
  return *std::max_element(row.begin(), row.end()) > eta;
}

inline double macro_f1(const std::vector<int>& pred, const std::vector<int>& truth) {
  std::set<int> classes(truth.begin(), truth.end());
  classes.insert(pred.begin(), pred.end());
  std::map<std::pair<int, int>, int> confusion;
  for (std::size_t i = 0; i < pred.size(); ++i) ++confusion[{truth[i], pred[i]}];
  double total = 0.0;
  for (int c : classes) {
    double tp = confusion[{c, c}], fp = 0, fn = 0;
    for (int o : classes) {
      if (o == c) continue;
      fp += confusion[{o, c}];
      fn += confusion[{c, o}];
    }
    total += (tp == 0) ? 0.0 : 2 * tp / (2 * tp + fp + fn);
  }
  return total / static_cast<double>(classes.size());
}

inline double auroc(const std::vector<double>& score, const std::vector<bool>& positive) {
  double credit = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < score.size(); ++i) {
    if (!positive[i]) continue;
    for (std::size_t j = 0; j < score.size(); ++j) {
      if (positive[j]) continue;
      pairs += 1;
      if (score[i] > score[j]) credit += 1.0;
      else if (score[i] == score[j]) credit += 0.5;
    }
  }
  return credit / pairs;
}

/// Central difference of f with respect to *x.
inline double central_difference(double* x, const std::function<double()>& f, double h = 1e-5) {
  const double saved = *x;
  *x = saved + h;
  const double up = f();
  *x = saved - h;
  const double down = f();
  *x = saved;
  return (up - down) / (2 * h);
}

/// Entries where both values are below `floor` in magnitude compare by
/// absolute difference scaled by the floor.
inline double relative_error(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

/// L = L_cls + lambda L_div for a fixed clean set, composed densely with
/// explicit cosine similarities and a class-wise max over prototypes.
inline double total_loss(const rogpl::GcnParams& p, const Matrix& a, const Matrix& x,
                         const rogpl::PrototypePool& pool, const std::vector<int>& rows,
                         const std::vector<int>& labels, double temperature, double lambda) {
  const Matrix z = gcn_forward(p, a, x);
  const int c_count = pool.n_classes();
  double cls = 0.0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Vector zi = z.row(rows[k]).transpose();
    Vector s(c_count);
    for (int c = 0; c < c_count; ++c) {
      const Vector pc = pool.interior.row(c).transpose();
      double best = zi.dot(pc) / (zi.norm() * pc.norm());
      for (const auto& b : pool.border[c]) best = std::max(best, zi.dot(b.vec) / (zi.norm() * b.vec.norm()));
      s(c) = best / temperature;
    }
    const double mx = s.maxCoeff();
    double lse = 0.0;
    for (int c = 0; c < c_count; ++c) lse += std::exp(s(c) - mx);
    cls += -(s(labels[k]) - mx - std::log(lse));
  }
  cls /= static_cast<double>(rows.size());
  const Matrix g = pool.interior * pool.interior.transpose() - Matrix::Identity(c_count, c_count);
  return cls + lambda * g.squaredNorm();
}

inline Matrix random_symmetric_graph(int n, double density, std::mt19937_64& rng) {
  std::bernoulli_distribution edge(density);
  Matrix a = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (edge(rng)) a(i, j) = a(j, i) = 1.0;
    }
  }
  return a;
}

inline Matrix random_matrix(int r, int c, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Matrix m(r, c);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) m(i, j) = nd(rng);
  }
  return m;
}

}  // namespace oracle
