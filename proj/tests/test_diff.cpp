#include <gtest/gtest.h>

#include <random>

#include "landscape/diff.hpp"
#include "landscape/errors.hpp"
#include "landscape/forward.hpp"
#include "landscape/trainer.hpp"
#include "support.hpp"

using namespace landscape;

TEST(Gradient, MatchesCentralDifferencesOnRandomNets) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const auto dims = fixtures::random_dims(rng, {3, 4, 4, 1});
    const auto kind = trial % 3 ? ActivationKind::Sigmoid : ActivationKind::Tanh;
    const Network net = init_random(dims, kind, 1.0, 100 + trial);
    const Dataset data = fixtures::random_dataset(dims[0], 1 + trial % 8, trial);
    const ParamVector g = gradient(net, data);
    const ParamVector fd = gradient_fd(net, data);
    const double rel = max_abs(Vector(g - fd)) / std::max(1.0, max_abs(g));
    EXPECT_LT(rel, 1e-6) << "trial " << trial;
  }
}

TEST(Gradient, BiasEntryIsSumOfSensitivities) {
  const Network net = init_random({2, 3, 2, 1}, ActivationKind::Sigmoid, 1.0, 5);
  const Dataset data = fixtures::random_dataset(2, 6, 5);
  const ForwardCache cache = forward(net, data);
  const SensitivityTensor s = neuron_sensitivities(net, cache);
  const ParamVector g = gradient(net, data);
  const ParamLayout layout(net);
  for (int l = 1; l <= net.num_layers(); ++l) {
    for (int p = 0; p < net.dim(l); ++p) {
      EXPECT_NEAR(g(layout.index(l, p, 0)), s.layers[l].row(p).sum(), 1e-12);
      for (int i = 0; i < net.dim(l - 1); ++i) {
        const double expected = s.layers[l].row(p).dot(cache.act[l - 1].row(i));
        EXPECT_NEAR(g(layout.index(l, p, i + 1)), expected, 1e-12);
      }
    }
  }
  EXPECT_TRUE(s.layers.back().isApprox(Matrix(2.0 * cache.residual.transpose())));
}

TEST(Gradient, VanishesAtPerfectFit) {
  const Network teacher = init_random({2, 3, 1}, ActivationKind::Tanh, 1.0, 2);
  const Dataset data = generate_teacher_dataset(teacher, 5, InputSampler{}, 9);
  EXPECT_EQ(max_abs(gradient(teacher, data)), 0.0);
  EXPECT_TRUE(is_critical(teacher, data, 0.0));
}

TEST(Hessian, QuadraticFixtureIsExact) {
  Matrix a(3, 3);
  a << 4, 1, 0, 1, 3, -1, 0, -1, 2;
  const GradientFn grad = [&](const Vector& x) -> Vector { return a * x; };
  const FdHessian h = hessian_fd(grad, Vector::Zero(3));
  EXPECT_LT(max_abs(Matrix(h.hessian - a)), 1e-9);
  EXPECT_LT(h.asymmetry, 1e-9);
}

TEST(Hessian, SymmetricAndMatchesSecondDifferencesOfLoss) {
  const Network net = init_random({2, 2, 1}, ActivationKind::Sigmoid, 1.0, 3);
  const Dataset data = fixtures::random_dataset(2, 5, 3);
  const FdHessian h = hessian_fd(net, data);
  EXPECT_LT(h.asymmetry, 1e-6);
  const ParamVector w = flatten(net);
  const double e = 1e-4;
  for (Eigen::Index i = 0; i < w.size(); i += 2) {
    for (Eigen::Index j = 0; j < w.size(); j += 3) {
      ParamVector pp = w, pm = w, mp = w, mm = w;
      pp(i) += e, pp(j) += e;
      pm(i) += e, pm(j) -= e;
      mp(i) -= e, mp(j) += e;
      mm(i) -= e, mm(j) -= e;
      const double d = (loss(unflatten(net, pp), data) - loss(unflatten(net, pm), data) -
                        loss(unflatten(net, mp), data) + loss(unflatten(net, mm), data)) /
                       (4 * e * e);
      EXPECT_NEAR(h.hessian(i, j), d, 1e-5 * (1 + std::abs(d)));
    }
  }
}

TEST(Hessian, DenseLimitIsEnforced) {
  const Network wide = init_random({2, 80, 70, 1}, ActivationKind::Sigmoid, 1.0, 1);
  EXPECT_THROW(hessian_fd(wide, fixtures::random_dataset(2, 2, 1)), SizeError);
}

TEST(Eigen, SpectrumAscendingWithOrthonormalVectors) {
  Matrix m = Matrix::Random(6, 6);
  m = (m + m.transpose()).eval();
  const EigenDecomposition e = hessian_eigs(m, true);
  for (Eigen::Index i = 1; i < e.values.size(); ++i) EXPECT_LE(e.values(i - 1), e.values(i));
  EXPECT_TRUE((e.vectors.transpose() * e.vectors).isIdentity(1e-12));
  EXPECT_LT(max_abs(Matrix(m * e.vectors - e.vectors * e.values.asDiagonal())), 1e-12);
  EXPECT_DOUBLE_EQ(eig_tolerance(Matrix::Identity(2, 2) * 0.5), 1e-7);
  EXPECT_DOUBLE_EQ(eig_tolerance(Matrix::Identity(2, 2) * 30.0), 3e-6);
}
