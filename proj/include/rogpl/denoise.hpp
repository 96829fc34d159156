#pragma once

#include <span>
#include <vector>

#include "rogpl/sparse.hpp"
#include "rogpl/types.hpp"

namespace rogpl {

/// Symmetric nonnegative affinity W over latent vectors, zero diagonal.
struct AffinityGraph {
  CsrMatrix weights;
  int k_nn = 0;
  double beta = 1.0;
  /// Nodes with an all-zero embedding row; they get no neighbors.
  std::vector<int> degenerate_nodes;
};

/// W_ij = max(z_i·z_j, 0)^beta for j among the k most similar rows of i by
/// dot product (j != i, ties to the lower index), then W <- max(W, W^T).
/// Only strictly positive weights are stored.
AffinityGraph build_knn_affinity(const Matrix& z, int k, double beta);

/// Affinity taken directly from a graph adjacency (unit weights).
AffinityGraph affinity_from_adjacency(const CsrMatrix& adjacency);

enum class LabelRole { kSeed, kPropagated };

struct SoftLabels {
  Matrix values;  // n x C
  LabelRole role = LabelRole::kSeed;
};

/// Per-node reliability indicators g_i over the training nodes.
struct CleanMask {
  std::vector<bool> keep;
  double eta = 0.0;
  int iteration = 0;

  int count() const;
};

/// One-hot given labels for nodes marked clean in `prev_clean`, and
/// softmax(scores_i / temperature) for the rest. `scores` may be null only
/// when every node is clean.
SoftLabels assemble_seed_labels(std::span<const int> labels, const CleanMask& prev_clean,
                                const Matrix* scores, int n_classes, double temperature);

struct PropagationResult {
  SoftLabels labels;
  std::vector<int> iterations;       // per column
  std::vector<double> residual_norms;  // per column
  bool converged = true;

  int total_iterations() const;
};

/// Solves (I - alpha*S) Ybar = Ytilde column by column with conjugate
/// gradient, S = D^{-1/2} W D^{-1/2}. Rows of isolated nodes are copied.
PropagationResult propagate_labels(const AffinityGraph& w, const SoftLabels& seed, double alpha,
                                   double tol = 1e-6, int max_iter = 200);

struct CleanSelection {
  CleanMask mask;
  std::vector<int> pseudo_labels;
  /// Rows of Ybar after clipping at zero and renormalizing to sum one.
  Matrix normalized;
};

/// Keeps node i when Ybar[i, y_i] > 1/C, or otherwise when max_c Ybar[i, c]
/// > eta, evaluated on clipped and renormalized rows. Pseudo-labels are the
/// row argmax with ties to the lowest class id.
CleanSelection select_clean(const SoftLabels& y_bar, std::span<const int> labels, double eta);

/// Row-wise softmax of `scores / temperature`.
Matrix softmax_rows(const Matrix& scores, double temperature);

/// Argmax of a vector expression with ties to the lowest index.
template <typename Derived>
int argmax_lowest(const Eigen::DenseBase<Derived>& v) {
  int best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v.coeff(i) > v.coeff(best)) best = static_cast<int>(i);
  }
  return best;
}

}  // namespace rogpl
