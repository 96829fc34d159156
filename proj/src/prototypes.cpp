#include "rogpl/prototypes.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "rogpl/denoise.hpp"

namespace rogpl {
namespace {

// Unit-normalized prototypes in a single matrix, interior rows first.
struct FlatPool {
  Matrix unit;               // P x D
  std::vector<double> norm;  // P
  std::vector<int> cls;      // owning class
  std::vector<int> slot;     // -1 interior, else border index
};

FlatPool flatten(const PrototypePool& pool) {
  FlatPool f;
  const int total = pool.n_classes() + pool.border_count();
  f.unit.resize(total, pool.dim());
  f.norm.resize(total);
  f.cls.resize(total);
  f.slot.resize(total);
  int r = 0;
  auto push = [&](const auto& v, int c, int s) {
    const double nv = v.norm();
    if (!(nv > 0.0)) {
      throw std::invalid_argument("zero-norm prototype for class " + std::to_string(c));
    }
    f.unit.row(r) = v / nv;
    f.norm[r] = nv;
    f.cls[r] = c;
    f.slot[r] = s;
    ++r;
  };
  for (int c = 0; c < pool.n_classes(); ++c) push(pool.interior.row(c), c, -1);
  for (int c = 0; c < pool.n_classes(); ++c) {
    for (std::size_t b = 0; b < pool.border[c].size(); ++b) {
      push(pool.border[c][b].vec.transpose(), c, static_cast<int>(b));
    }
  }
  return f;
}

}  // namespace

int PrototypePool::border_count() const {
  int total = 0;
  for (const auto& b : border) total += static_cast<int>(b.size());
  return total;
}

PrototypePool init_prototypes(int n_classes, int dim, std::uint64_t seed) {
  if (n_classes < 1 || dim < 1) throw std::invalid_argument("init_prototypes: empty shape");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / dim));
  PrototypePool pool;
  pool.interior.resize(n_classes, dim);
  for (int c = 0; c < n_classes; ++c) {
    for (int d = 0; d < dim; ++d) pool.interior(c, d) = dist(rng);
  }
  pool.border.assign(n_classes, {});
  return pool;
}

std::vector<std::vector<BorderPrototype>> compute_border_prototypes(const ClusterAssignment& ca,
                                                                    const Matrix& z) {
  std::vector<std::vector<BorderPrototype>> border(ca.n_classes);
  for (int k = 0; k < ca.n_clusters; ++k) {
    if (ca.homogeneous[k]) continue;
    for (int c = 0; c < ca.n_classes; ++c) {
      const auto& part = ca.members[k][c];
      if (part.empty()) continue;
      Vector mean = Vector::Zero(z.cols());
      for (int i : part) mean += z.row(i).transpose();
      mean /= static_cast<double>(part.size());
      border[c].push_back({k, std::move(mean)});
    }
  }
  return border;
}

Vector score(const Eigen::Ref<const Vector>& z, const PrototypePool& pool) {
  if (z.size() != pool.dim()) throw DimensionError("score: latent width differs from pool");
  const double nz = z.norm();
  if (!(nz > 0.0)) throw std::invalid_argument("score: zero-norm latent vector");
  Vector s(pool.n_classes());
  auto cosine = [&](const auto& p) {
    const double np = p.norm();
    if (!(np > 0.0)) throw std::invalid_argument("score: zero-norm prototype");
    return std::clamp(z.dot(p) / (nz * np), -1.0, 1.0);
  };
  for (int c = 0; c < pool.n_classes(); ++c) {
    double best = cosine(pool.interior.row(c).transpose());
    for (const auto& b : pool.border[c]) best = std::max(best, cosine(b.vec));
    s[c] = best;
  }
  return s;
}

int classify(const Eigen::Ref<const Vector>& scores) { return argmax_lowest(scores); }

ScoreBatch score_batch(const Matrix& z, const PrototypePool& pool) {
  if (z.cols() != pool.dim()) throw DimensionError("score_batch: latent width differs from pool");
  const FlatPool flat = flatten(pool);
  Matrix unit_z = z;
  for (Eigen::Index i = 0; i < unit_z.rows(); ++i) {
    const double n = unit_z.row(i).norm();
    if (n > 0.0) unit_z.row(i) /= n;
  }
  const Matrix sims = (unit_z * flat.unit.transpose()).cwiseMax(-1.0).cwiseMin(1.0);
  const int c_count = pool.n_classes();
  ScoreBatch out;
  out.scores.resize(z.rows(), c_count);
  out.winner.resize(z.rows(), c_count);
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (int c = 0; c < c_count; ++c) {
      out.scores(i, c) = sims(i, c);
      out.winner(i, c) = -1;
    }
    for (Eigen::Index p = c_count; p < sims.cols(); ++p) {
      const int c = flat.cls[p];
      if (sims(i, p) > out.scores(i, c)) {
        out.scores(i, c) = sims(i, p);
        out.winner(i, c) = flat.slot[p];
      }
    }
  }
  return out;
}

LossAndGrad classification_loss(const Matrix& scores, std::span<const int> labels,
                                double temperature) {
  if (!(temperature > 0.0)) {
    throw std::invalid_argument("classification_loss: temperature must be positive");
  }
  const Eigen::Index n = scores.rows();
  if (static_cast<Eigen::Index>(labels.size()) != n) {
    throw DimensionError("classification_loss: label count differs from score rows");
  }
  LossAndGrad out;
  out.grad = Matrix::Zero(n, scores.cols());
  if (n == 0) return out;
  const Matrix prob = softmax_rows(scores, temperature);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int y = labels[i];
    if (y < 0 || y >= scores.cols()) throw std::invalid_argument("classification_loss: bad label");
    const auto scaled = (scores.row(i).array() / temperature).eval();
    const double mx = scaled.maxCoeff();
    const double log_norm = mx + std::log((scaled - mx).exp().sum());
    total += log_norm - scaled[y];
    out.grad.row(i) = prob.row(i);
    out.grad(i, y) -= 1.0;
  }
  out.loss = total / static_cast<double>(n);
  out.grad /= temperature * static_cast<double>(n);
  return out;
}

LossAndGrad diversity_loss(const Matrix& interior) {
  const Eigen::Index c = interior.rows();
  const Matrix gram_minus_i = interior * interior.transpose() - Matrix::Identity(c, c);
  return {gram_minus_i.squaredNorm(), 4.0 * gram_minus_i * interior};
}

ScoreBackprop backprop_scores(const Matrix& z, const PrototypePool& pool, const ScoreBatch& batch,
                              const Matrix& grad_scores, PrototypeGradient mode,
                              std::span<const int> labels, const std::vector<bool>& sample_mask) {
  const Eigen::Index n = z.rows();
  const int c_count = pool.n_classes();
  if (grad_scores.rows() != n || grad_scores.cols() != c_count || batch.scores.rows() != n) {
    throw DimensionError("backprop_scores: shape mismatch");
  }
  if (mode == PrototypeGradient::kMaskedOwnClass &&
      (static_cast<Eigen::Index>(labels.size()) != n ||
       static_cast<Eigen::Index>(sample_mask.size()) != n)) {
    throw DimensionError("backprop_scores: masked mode needs labels and mask for every row");
  }
  ScoreBackprop out;
  out.grad_latent = Matrix::Zero(n, z.cols());
  out.grad_interior = Matrix::Zero(c_count, z.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    const double nz = z.row(i).norm();
    if (!(nz > 0.0)) continue;
    const Vector zu = z.row(i).transpose() / nz;
    for (int c = 0; c < c_count; ++c) {
      const double g = grad_scores(i, c);
      if (g == 0.0) continue;
      const int w = batch.winner(i, c);
      const double s = batch.scores(i, c);
      const Vector p = w < 0 ? Vector(pool.interior.row(c).transpose()) : pool.border[c][w].vec;
      const double np = p.norm();
      const Vector pu = p / np;
      out.grad_latent.row(i) += (g / nz) * (pu - s * zu).transpose();
      if (w >= 0) continue;
      const bool reaches = mode == PrototypeGradient::kAll ||
                           (sample_mask[i] && labels[i] == c);
      if (reaches) out.grad_interior.row(c) += (g / np) * (zu - s * pu).transpose();
    }
  }
  return out;
}

void update_interior(Matrix& interior, const Matrix& grad, double phi) {
  if (grad.rows() != interior.rows() || grad.cols() != interior.cols()) {
    throw DimensionError("update_interior: gradient shape differs from prototypes");
  }
  if (!grad.allFinite()) throw std::domain_error("update_interior: non-finite gradient");
  interior -= phi * grad;
}

}  // namespace rogpl
