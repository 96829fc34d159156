#include "rogpl/gcn.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace rogpl {
namespace {

Matrix he_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / rows));
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = dist(rng);
  }
  return m;
}

template <typename T>
void adam_update(T& param, const T& grad, T& m, T& v, const AdamState& st, double lr) {
  const double c1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step));
  const double c2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step));
  m = st.beta1 * m + (1.0 - st.beta1) * grad;
  v = st.beta2 * v + (1.0 - st.beta2) * grad.cwiseProduct(grad);
  param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + st.epsilon);
}

}  // namespace

GcnParams init_params(int input_dim, int hidden_dim, int latent_dim, std::uint64_t seed) {
  if (input_dim < 1 || hidden_dim < 1 || latent_dim < 1) {
    throw std::invalid_argument("init_params: all dimensions must be at least 1");
  }
  std::mt19937_64 rng(seed);
  GcnParams p;
  p.w1 = he_matrix(input_dim, hidden_dim, rng);
  p.b1 = Vector::Zero(hidden_dim);
  p.w2 = he_matrix(hidden_dim, latent_dim, rng);
  p.b2 = Vector::Zero(latent_dim);
  return p;
}

std::shared_ptr<const GcnInput> make_gcn_input(NormalizedAdjacency a_hat, const Matrix& features) {
  if (a_hat.matrix.cols != features.rows()) {
    throw DimensionError("adjacency has " + std::to_string(a_hat.matrix.cols) +
                         " nodes but features have " + std::to_string(features.rows()) + " rows");
  }
  auto input = std::make_shared<GcnInput>();
  input->propagated_features = CsrMatrix::from_dense(spmm(a_hat.matrix, features));
  input->a_hat = std::move(a_hat);
  return input;
}

ForwardCache forward(const GcnParams& params, std::shared_ptr<const GcnInput> input) {
  if (input->input_dim() != params.input_dim()) {
    throw DimensionError("encoder expects " + std::to_string(params.input_dim()) +
                         " features, graph has " + std::to_string(input->input_dim()));
  }
  ForwardCache c;
  c.hidden_pre = spmm(input->propagated_features, params.w1);
  c.hidden_pre.rowwise() += params.b1.transpose();
  c.hidden = c.hidden_pre.cwiseMax(0.0);
  const Matrix projected = c.hidden * params.w2;
  c.latent = spmm(input->a_hat.matrix, projected);
  c.latent.rowwise() += params.b2.transpose();
  c.params_version = params.version;
  c.input = std::move(input);
  return c;
}

ForwardCache forward(const GcnParams& params, const NormalizedAdjacency& a_hat,
                     const Matrix& features) {
  return forward(params, make_gcn_input(a_hat, features));
}

GcnGrads& GcnGrads::operator*=(double s) {
  w1 *= s;
  b1 *= s;
  w2 *= s;
  b2 *= s;
  if (features) *features *= s;
  return *this;
}

GcnGrads backward(const GcnParams& params, const ForwardCache& cache, const Matrix& grad_latent,
                  bool want_feature_grad) {
  if (cache.params_version != params.version) {
    throw std::logic_error("backward: forward cache is stale (parameters were updated)");
  }
  if (grad_latent.rows() != cache.latent.rows() || grad_latent.cols() != cache.latent.cols()) {
    throw DimensionError("backward: gradient shape differs from latent shape");
  }
  const CsrMatrix& a_hat = cache.input->a_hat.matrix;
  GcnGrads g;
  g.b2 = grad_latent.colwise().sum().transpose();
  const Matrix grad_projected = spmm_transposed(a_hat, grad_latent);
  g.w2 = cache.hidden.transpose() * grad_projected;
  Matrix grad_pre = grad_projected * params.w2.transpose();
  grad_pre.array() *= (cache.hidden_pre.array() > 0.0).cast<double>();
  g.b1 = grad_pre.colwise().sum().transpose();
  g.w1 = spmm_transposed(cache.input->propagated_features, grad_pre);
  if (want_feature_grad) {
    g.features = spmm_transposed(a_hat, Matrix(grad_pre * params.w1.transpose()));
  }
  return g;
}

AdamState AdamState::for_params(const GcnParams& p) {
  AdamState s;
  s.m_w1 = Matrix::Zero(p.w1.rows(), p.w1.cols());
  s.v_w1 = s.m_w1;
  s.m_w2 = Matrix::Zero(p.w2.rows(), p.w2.cols());
  s.v_w2 = s.m_w2;
  s.m_b1 = Vector::Zero(p.b1.size());
  s.v_b1 = s.m_b1;
  s.m_b2 = Vector::Zero(p.b2.size());
  s.v_b2 = s.m_b2;
  return s;
}

void adam_step(GcnParams& params, const GcnGrads& grads, AdamState& state, double lr) {
  if (grads.w1.rows() != params.w1.rows() || grads.w1.cols() != params.w1.cols() ||
      grads.w2.rows() != params.w2.rows() || grads.w2.cols() != params.w2.cols() ||
      grads.b1.size() != params.b1.size() || grads.b2.size() != params.b2.size()) {
    throw DimensionError("adam_step: gradient shapes differ from parameter shapes");
  }
  if (state.m_w1.rows() != params.w1.rows() || state.m_w1.cols() != params.w1.cols()) {
    throw DimensionError("adam_step: optimizer state shapes differ from parameter shapes");
  }
  if (!grads.w1.allFinite() || !grads.b1.allFinite() || !grads.w2.allFinite() ||
      !grads.b2.allFinite()) {
    throw std::domain_error("adam_step: non-finite gradient");
  }
  ++state.step;
  adam_update(params.w1, grads.w1, state.m_w1, state.v_w1, state, lr);
  adam_update(params.b1, grads.b1, state.m_b1, state.v_b1, state, lr);
  adam_update(params.w2, grads.w2, state.m_w2, state.v_w2, state, lr);
  adam_update(params.b2, grads.b2, state.m_b2, state.v_b2, state, lr);
  ++params.version;
}

}  // namespace rogpl
