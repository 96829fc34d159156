#include <gtest/gtest.h>

#include <random>

#include "../oracles.hpp"
#include "rogpl/gcn.hpp"
#include "rogpl/graph.hpp"

using namespace rogpl;

namespace {

struct Instance {
  Matrix a;
  Matrix x;
  GcnParams p;
  NormalizedAdjacency a_hat;
};

Instance random_instance(std::mt19937_64& rng, int n, int s, int h, int k) {
  Instance in;
  in.a = oracle::random_symmetric_graph(n, 0.3, rng);
  in.x = oracle::random_matrix(n, s, rng);
  in.p = init_params(s, h, k, rng());
  in.p.b1 = oracle::random_matrix(h, 1, rng, 0.1).col(0);
  in.p.b2 = oracle::random_matrix(k, 1, rng, 0.1).col(0);
  in.a_hat = normalize_adjacency(CsrMatrix::from_dense(in.a));
  return in;
}

}  // namespace

TEST(GcnInit, DeterministicZeroBiasHeVariance) {
  const GcnParams a = init_params(100, 128, 16, 3);
  const GcnParams b = init_params(100, 128, 16, 3);
  EXPECT_EQ(a.w1, b.w1);
  EXPECT_EQ(a.w2, b.w2);
  EXPECT_TRUE(a.b1.isZero(0.0));
  EXPECT_TRUE(a.b2.isZero(0.0));
  const double mean = a.w1.mean();
  const double var = (a.w1.array() - mean).square().sum() / static_cast<double>(a.w1.size() - 1);
  EXPECT_NEAR(var, 2.0 / 100.0, 0.2 * 2.0 / 100.0);
}

TEST(GcnForward, IdentityWeightsOnIsolatedNode) {
  GcnParams p = init_params(3, 4, 2, 0);
  p.w1 = Matrix::Identity(3, 4);
  p.w2 = Matrix::Identity(4, 2);
  Matrix x(1, 3);
  x << 0.5, 2.0, 3.0;
  const Graph g = make_graph(x, {}, {0}, 1);
  const ForwardCache f = forward(p, normalize_adjacency(g), x);
  EXPECT_DOUBLE_EQ(f.latent(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(f.latent(0, 1), 2.0);
}

TEST(GcnForward, ZeroFeaturesGiveB2) {
  std::mt19937_64 rng(1);
  Instance in = random_instance(rng, 6, 4, 5, 3);
  in.p.b1.setZero();
  const ForwardCache f = forward(in.p, in.a_hat, Matrix::Zero(6, 4));
  for (int i = 0; i < 6; ++i) EXPECT_EQ(Vector(f.latent.row(i).transpose()), in.p.b2);
}

TEST(GcnForward, MatchesDenseOracleAndIsPure) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const Instance in = random_instance(rng, 6, 5, 4, 3);
    const ForwardCache f = forward(in.p, in.a_hat, in.x);
    EXPECT_LE((f.latent - oracle::gcn_forward(in.p, in.a, in.x)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(forward(in.p, in.a_hat, in.x).latent, f.latent);
  }
}

TEST(GcnBackward, ZeroAndLinearInCotangent) {
  std::mt19937_64 rng(3);
  const Instance in = random_instance(rng, 5, 4, 3, 2);
  const ForwardCache f = forward(in.p, in.a_hat, in.x);
  const GcnGrads zero = backward(in.p, f, Matrix::Zero(5, 2));
  EXPECT_TRUE(zero.w1.isZero(0.0) && zero.b1.isZero(0.0) && zero.w2.isZero(0.0) && zero.b2.isZero(0.0));

  const Matrix g = oracle::random_matrix(5, 2, rng);
  const GcnGrads one = backward(in.p, f, g);
  const GcnGrads two = backward(in.p, f, 2.0 * g);
  EXPECT_TRUE(two.w1.isApprox(2.0 * one.w1, 1e-14));
  EXPECT_TRUE(two.b1.isApprox(2.0 * one.b1, 1e-14));
  EXPECT_TRUE(two.w2.isApprox(2.0 * one.w2, 1e-14));
  EXPECT_TRUE(two.b2.isApprox(2.0 * one.b2, 1e-14));
}

TEST(GcnBackward, FiniteDifferences) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> nd(2, 20), sd(1, 8), hd(1, 6), kd(1, 5);
  for (int trial = 0; trial < 15; ++trial) {
    const int n = trial == 0 ? 5 : nd(rng);
    Instance in = random_instance(rng, n, sd(rng), hd(rng), kd(rng));
    const Matrix g = oracle::random_matrix(n, in.p.latent_dim(), rng);
    const GcnGrads an = backward(in.p, forward(in.p, in.a_hat, in.x), g, true);
    const auto loss = [&] { return g.cwiseProduct(oracle::gcn_forward(in.p, in.a, in.x)).sum(); };
    auto check = [&](auto& param, const auto& grad) {
      for (Eigen::Index i = 0; i < param.size(); ++i) {
        const double num = oracle::central_difference(param.data() + i, loss);
        EXPECT_LT(oracle::relative_error(grad.data()[i], num), 1e-4);
      }
    };
    check(in.p.w1, an.w1);
    check(in.p.b1, an.b1);
    check(in.p.w2, an.w2);
    check(in.p.b2, an.b2);
    check(in.x, *an.features);
  }
}

TEST(GcnBackward, DeadHiddenUnitsPassNoGradient) {
  std::mt19937_64 rng(5);
  Instance in = random_instance(rng, 6, 3, 4, 2);
  in.p.b1(1) = -1e6;  // unit 1 is negative for every node
  const ForwardCache f = forward(in.p, in.a_hat, in.x);
  const GcnGrads gr = backward(in.p, f, oracle::random_matrix(6, 2, rng));
  EXPECT_TRUE(gr.w1.col(1).isZero(0.0));
  EXPECT_EQ(gr.b1(1), 0.0);
}

TEST(GcnBackward, StaleCacheRejected) {
  std::mt19937_64 rng(6);
  Instance in = random_instance(rng, 4, 2, 2, 2);
  const ForwardCache f = forward(in.p, in.a_hat, in.x);
  AdamState st = AdamState::for_params(in.p);
  adam_step(in.p, backward(in.p, f, Matrix::Ones(4, 2)), st, 1e-3);
  EXPECT_THROW(backward(in.p, f, Matrix::Ones(4, 2)), std::logic_error);
}

TEST(Adam, ZeroGradientLeavesParameters) {
  GcnParams p = init_params(3, 2, 2, 1);
  const GcnParams before = p;
  AdamState st = AdamState::for_params(p);
  GcnGrads g{Matrix::Zero(3, 2), Vector::Zero(2), Matrix::Zero(2, 2), Vector::Zero(2), {}};
  adam_step(p, g, st, 0.1);
  EXPECT_EQ(p.w1, before.w1);
  EXPECT_EQ(p.w2, before.w2);
}

TEST(Adam, SingleStepClosedForm) {
  GcnParams p = init_params(1, 1, 1, 0);
  p.w1(0, 0) = 0.25;
  const double g = 3.0, lr = 0.01;
  AdamState st = AdamState::for_params(p);
  GcnGrads gr{Matrix::Constant(1, 1, g), Vector::Zero(1), Matrix::Zero(1, 1), Vector::Zero(1), {}};
  adam_step(p, gr, st, lr);
  // m_hat = g, v_hat = g^2 after bias correction.
  EXPECT_NEAR(p.w1(0, 0), 0.25 - lr * g / (std::abs(g) + 1e-8), 1e-15);
  EXPECT_NEAR(p.w1(0, 0), 0.25 - lr, 1e-9);

  const double after_one = p.w1(0, 0);
  adam_step(p, gr, st, lr);
  EXPECT_NE(p.w1(0, 0), after_one);
  EXPECT_EQ(st.step, 2);
}

TEST(Adam, NonFiniteRejectedBeforeUpdate) {
  GcnParams p = init_params(2, 2, 2, 0);
  const GcnParams before = p;
  AdamState st = AdamState::for_params(p);
  GcnGrads g{Matrix::Zero(2, 2), Vector::Zero(2), Matrix::Zero(2, 2), Vector::Zero(2), {}};
  g.w2(1, 1) = std::nan("");
  EXPECT_THROW(adam_step(p, g, st, 0.1), std::domain_error);
  EXPECT_EQ(p.w1, before.w1);
}
