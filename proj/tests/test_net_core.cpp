#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "landscape/activation.hpp"
#include "landscape/errors.hpp"
#include "landscape/forward.hpp"
#include "landscape/network.hpp"
#include "landscape/serialize.hpp"
#include "landscape/trainer.hpp"
#include "support.hpp"

using namespace landscape;

namespace {

double fd_derivative(ActivationKind k, double t) {
  const double h = 1e-5;
  return (act_value(k, t + h) - act_value(k, t - h)) / (2 * h);
}

}  // namespace

TEST(Activation, DerivativesMatchFiniteDifferences) {
  for (ActivationKind k : {ActivationKind::Sigmoid, ActivationKind::Tanh}) {
    for (double t = -6.0; t <= 6.0; t += 0.37) {
      const ActValue v = act_eval(k, t);
      EXPECT_DOUBLE_EQ(v.value, act_value(k, t));
      EXPECT_NEAR(v.d1, fd_derivative(k, t), 1e-8);
      const double h = 1e-4;
      const double d2 = (act_eval(k, t + h).d1 - act_eval(k, t - h).d1) / (2 * h);
      EXPECT_NEAR(v.d2, d2, 1e-7);
    }
  }
}

TEST(Activation, InverseRoundTripsInsideImage) {
  for (ActivationKind k : {ActivationKind::Sigmoid, ActivationKind::Tanh}) {
    for (double t = -20.0; t <= 20.0; t += 0.5) {
      const double a = act_value(k, t);
      if (a <= act_image(k).lower + 1e-9 || a >= act_image(k).upper - 1e-9) continue;
      EXPECT_NEAR(act_inverse(k, a), t, 1e-6 * (1 + std::abs(t)));
    }
  }
}

TEST(Activation, InverseOutsideImageThrows) {
  EXPECT_THROW(act_inverse(ActivationKind::Sigmoid, 1.5), DomainError);
  EXPECT_THROW(act_inverse(ActivationKind::Tanh, -1.2), DomainError);
  EXPECT_TRUE(std::isfinite(act_inverse(ActivationKind::Sigmoid, 1.0)));
}

TEST(Activation, NamesRoundTrip) {
  EXPECT_EQ(activation_from_string(to_string(ActivationKind::Tanh)), ActivationKind::Tanh);
  EXPECT_THROW(activation_from_string("relu"), FormatError);
}

TEST(Network, ShapesAreValidated) {
  EXPECT_THROW(Network({2, 1}, ActivationKind::Sigmoid), ShapeError);
  EXPECT_THROW(Network({2, 3, 2}, ActivationKind::Sigmoid), ShapeError);
  EXPECT_THROW(Network({2, 0, 1}, ActivationKind::Sigmoid), ShapeError);
  std::vector<Matrix> w{Matrix::Zero(3, 2), Matrix::Zero(1, 4)};
  std::vector<Vector> b{Vector::Zero(3), Vector::Zero(1)};
  EXPECT_THROW(Network({2, 3, 1}, ActivationKind::Sigmoid, w, b), ShapeError);
}

TEST(Network, ParamCountAndLayout) {
  const Network net = init_random({2, 3, 4, 1}, ActivationKind::Tanh, 1.0, 4);
  EXPECT_EQ(net.param_count(), 3u * 3 + 4u * 4 + 1u * 5);
  const ParamLayout layout(net);
  const ParamVector w = flatten(net);
  for (std::size_t k = 0; k < layout.size(); ++k) {
    const auto e = layout.entry(k);
    EXPECT_EQ(layout.index(e.layer, e.row, e.col), k);
    const double expected = e.col == 0 ? net.bias(e.layer)(e.row) : net.weight(e.layer)(e.row, e.col - 1);
    EXPECT_EQ(w(static_cast<Eigen::Index>(k)), expected);
  }
  EXPECT_EQ(unflatten(net, w), net);
  EXPECT_THROW(unflatten(net, Vector::Zero(3)), ShapeError);
}

TEST(Dataset, RejectsDuplicatesAndEmpty) {
  Matrix x(1, 2);
  x << 0.5, 0.5;
  EXPECT_THROW(Dataset(x, Vector::Zero(2)), ShapeError);
  EXPECT_THROW(Dataset(Matrix(1, 0), Vector()), ShapeError);
}

TEST(Forward, ZeroNetworkPredictsZero) {
  const Network net({2, 3, 1}, ActivationKind::Sigmoid);
  const Dataset data = fixtures::random_dataset(2, 5, 1);
  const ForwardCache c = forward(net, data);
  EXPECT_TRUE(c.output.isZero(0.0));
  EXPECT_DOUBLE_EQ(c.loss, data.targets().squaredNorm());
}

TEST(Forward, CacheIsConsistent) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto dims = fixtures::random_dims(rng, {3, 4, 4, 1});
    const auto kind = trial % 2 ? ActivationKind::Tanh : ActivationKind::Sigmoid;
    const Network net = init_random(dims, kind, 1.5, trial);
    const Dataset data = fixtures::random_dataset(dims[0], 6, trial);
    const ForwardCache c = forward(net, data);
    for (int l = 1; l < net.num_layers(); ++l) {
      for (Eigen::Index i = 0; i < c.pre[l].size(); ++i) {
        EXPECT_EQ(c.act[l](i), act_value(kind, c.pre[l](i)));
      }
    }
    EXPECT_EQ(c.residual, c.output - data.targets());
    EXPECT_DOUBLE_EQ(c.loss, c.residual.squaredNorm());
    EXPECT_EQ(predict(net, data.inputs()), c.output);
  }
}

TEST(Forward, LossHasNoHalfFactor) {
  std::vector<Matrix> w{Matrix::Zero(1, 1), Matrix::Zero(1, 1)};
  std::vector<Vector> b{Vector::Zero(1), Vector::Constant(1, 3.0)};
  const Network net({1, 1, 1}, ActivationKind::Sigmoid, w, b);
  Matrix x(1, 2);
  x << 0.0, 1.0;
  Vector y(2);
  y << 1.0, 2.0;
  EXPECT_DOUBLE_EQ(loss(net, Dataset(x, y)), 4.0 + 1.0);
}

TEST(TeacherData, TargetsAreTeacherOutputsAndSeeded) {
  const Network teacher = init_random({2, 5, 5, 1}, ActivationKind::Sigmoid, 2.0, 7);
  const Dataset a = generate_teacher_dataset(teacher, 20, InputSampler{}, 3);
  const Dataset b = generate_teacher_dataset(teacher, 20, InputSampler{}, 3);
  EXPECT_EQ(a.inputs(), b.inputs());
  EXPECT_EQ(a.targets(), predict(teacher, a.inputs()));
  EXPECT_EQ(loss(teacher, a), 0.0);
  EXPECT_EQ(generate_teacher_dataset(teacher, 1, InputSampler{}, 3).size(), 1);
}

TEST(TeacherData, CollisionsAreReportedOrResampled) {
  const Network teacher = init_random({1, 2, 1}, ActivationKind::Sigmoid, 1.0, 1);
  EXPECT_THROW(generate_teacher_dataset(teacher, 0, InputSampler{}, 1), SamplerError);
  EXPECT_THROW(generate_teacher_dataset(teacher, 2, InputSampler{1.0, 1.0}, 1), SamplerError);
}

TEST(Serialize, NetworkAndDatasetRoundTripExactly) {
  const Network net = init_random({2, 3, 2, 1}, ActivationKind::Tanh, 3.0, 12);
  EXPECT_EQ(network_from_json(network_to_json(net)), net);
  const Dataset data = fixtures::random_dataset(2, 7, 5);
  const Dataset back = dataset_from_json(dataset_to_json(data));
  EXPECT_EQ(back.inputs(), data.inputs());
  EXPECT_EQ(back.targets(), data.targets());
}

TEST(Serialize, MalformedDocumentsAreRejected) {
  EXPECT_THROW(network_from_json("{not json"), FormatError);
  EXPECT_THROW(network_from_json(R"({"dims":[2,1,1],"activation":"sigmoid","weights":[],"biases":[]})"),
               ShapeError);
  EXPECT_THROW(dataset_from_json(R"({"inputs":[[0,1]],"targets":[1,2]})"), ShapeError);
}
