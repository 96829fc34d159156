#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "rogpl/graph.hpp"
#include "rogpl/types.hpp"

namespace rogpl {

/// Weights of the two-layer encoder Z = Â·ReLU(Â·X·W1 + b1)·W2 + b2.
///
/// `version` is bumped by every in-place update so that a ForwardCache can
/// detect that it no longer matches the parameters.
struct GcnParams {
  Matrix w1;  // s x h
  Vector b1;  // h
  Matrix w2;  // h x k
  Vector b2;  // k
  std::uint64_t version = 0;

  int input_dim() const { return static_cast<int>(w1.rows()); }
  int hidden_dim() const { return static_cast<int>(w1.cols()); }
  int latent_dim() const { return static_cast<int>(w2.cols()); }
};

/// He initialization: weights ~ N(0, 2 / fan_in), zero biases.
GcnParams init_params(int input_dim, int hidden_dim, int latent_dim, std::uint64_t seed);

/// Graph-dependent operands shared by every forward pass on one graph.
/// Â·X is fixed for a given graph, so it is computed once and kept sparse.
struct GcnInput {
  NormalizedAdjacency a_hat;
  CsrMatrix propagated_features;  // Â·X

  int n_nodes() const { return a_hat.matrix.rows; }
  int input_dim() const { return propagated_features.cols; }
};

std::shared_ptr<const GcnInput> make_gcn_input(NormalizedAdjacency a_hat, const Matrix& features);

struct ForwardCache {
  std::shared_ptr<const GcnInput> input;
  Matrix hidden_pre;   // Â·X·W1 + b1
  Matrix hidden;       // ReLU(hidden_pre)
  Matrix latent;       // Z
  std::uint64_t params_version = 0;
};

ForwardCache forward(const GcnParams& params, std::shared_ptr<const GcnInput> input);

/// Convenience overload that builds the GcnInput on the fly.
ForwardCache forward(const GcnParams& params, const NormalizedAdjacency& a_hat,
                     const Matrix& features);

struct GcnGrads {
  Matrix w1;
  Vector b1;
  Matrix w2;
  Vector b2;
  std::optional<Matrix> features;

  GcnGrads& operator*=(double s);
};

/// Reverse mode of `forward` for the cotangent `grad_latent` = dL/dZ.
/// ReLU has derivative 0 at exactly 0. Throws std::logic_error when the
/// cache was produced by a different parameter version.
GcnGrads backward(const GcnParams& params, const ForwardCache& cache, const Matrix& grad_latent,
                  bool want_feature_grad = false);

/// Bias-corrected Adam (beta1 = 0.9, beta2 = 0.999, eps = 1e-8).
struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t step = 0;
  Matrix m_w1, v_w1, m_w2, v_w2;
  Vector m_b1, v_b1, m_b2, v_b2;

  static AdamState for_params(const GcnParams& p);
};

/// One Adam update in place. Rejects non-finite gradients before touching
/// any parameter.
void adam_step(GcnParams& params, const GcnGrads& grads, AdamState& state, double lr);

}  // namespace rogpl
