#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rogpl/kmeans.hpp"
#include "rogpl/types.hpp"

namespace rogpl {

/// Mean latent vector of one class inside one mixed-class region.
struct BorderPrototype {
  int cluster_id = -1;
  Vector vec;
};

/// Per-class prototypes: one trainable interior row per class plus border
/// prototypes that are recomputed at every region refresh.
struct PrototypePool {
  Matrix interior;  // C x D
  std::vector<std::vector<BorderPrototype>> border;  // indexed by class

  int n_classes() const { return static_cast<int>(interior.rows()); }
  int dim() const { return static_cast<int>(interior.cols()); }
  int count(int c) const { return 1 + static_cast<int>(border[c].size()); }
  int border_count() const;
};

/// He-initialized interior prototypes (variance 2 / dim), no border ones.
PrototypePool init_prototypes(int n_classes, int dim, std::uint64_t seed);

/// Class-conditional means of every non-homogeneous cluster. Row indices in
/// `ca` refer to rows of `z`.
std::vector<std::vector<BorderPrototype>> compute_border_prototypes(const ClusterAssignment& ca,
                                                                    const Matrix& z);

/// Class-wise maximum cosine similarity between z and the pool.
/// Throws std::invalid_argument for a zero-norm z or prototype.
Vector score(const Eigen::Ref<const Vector>& z, const PrototypePool& pool);

/// Lowest class id among the maximal scores.
int classify(const Eigen::Ref<const Vector>& scores);

/// Batched scoring that also remembers which prototype attained each
/// class maximum (-1 = interior, b >= 0 = border[c][b]; ties -> interior).
/// A zero-norm latent row scores 0 against every class and passes no
/// gradient.
struct ScoreBatch {
  Matrix scores;  // n x C
  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> winner;  // n x C
};

ScoreBatch score_batch(const Matrix& z, const PrototypePool& pool);

struct LossAndGrad {
  double loss = 0.0;
  Matrix grad;
};

/// Mean temperature-scaled softmax cross-entropy over the rows of `scores`.
/// `grad` is dL/dscores.
LossAndGrad classification_loss(const Matrix& scores, std::span<const int> labels,
                                double temperature);

/// ||P P^T - I||_F^2 and its gradient 4 (P P^T - I) P.
LossAndGrad diversity_loss(const Matrix& interior);

/// Which samples may move an interior prototype through the score path.
enum class PrototypeGradient {
  /// Every sample contributes to every class row (the exact gradient).
  kAll,
  /// Sample i reaches row c only when sample_mask[i] and labels[i] == c.
  kMaskedOwnClass,
};

struct ScoreBackprop {
  Matrix grad_latent;   // n x D
  Matrix grad_interior;  // C x D
};

/// Chains dL/dscores through the winning cosine similarities.
ScoreBackprop backprop_scores(const Matrix& z, const PrototypePool& pool, const ScoreBatch& batch,
                              const Matrix& grad_scores, PrototypeGradient mode,
                              std::span<const int> labels = {},
                              const std::vector<bool>& sample_mask = {});

/// Plain gradient step P <- P - phi * grad. Rejects non-finite gradients.
void update_interior(Matrix& interior, const Matrix& grad, double phi);

}  // namespace rogpl
