#include <gtest/gtest.h>

#include "landscape/diff.hpp"
#include "landscape/errors.hpp"
#include "landscape/forward.hpp"
#include "landscape/trainer.hpp"
#include "support.hpp"

using namespace landscape;

TEST(InitRandom, SeededAndBounded) {
  const Network a = init_random({2, 4, 3, 1}, ActivationKind::Sigmoid, 0.7, 11);
  EXPECT_EQ(a, init_random({2, 4, 3, 1}, ActivationKind::Sigmoid, 0.7, 11));
  EXPECT_FALSE(a == init_random({2, 4, 3, 1}, ActivationKind::Sigmoid, 0.7, 12));
  EXPECT_LE(max_abs(flatten(a)), 0.7);
  EXPECT_EQ(max_abs(flatten(init_random({2, 4, 3, 1}, ActivationKind::Sigmoid, 0.0, 11))), 0.0);
}

TEST(Train, ExactCriticalPointReturnsImmediately) {
  const Network teacher = init_random({2, 3, 1}, ActivationKind::Sigmoid, 1.0, 5);
  const Dataset data = generate_teacher_dataset(teacher, 8, InputSampler{}, 5);
  const TrainResult r = train_to_critical(teacher, data);
  EXPECT_EQ(r.report.status, TrainStatus::Converged);
  EXPECT_EQ(r.report.iters, 0);
  EXPECT_EQ(r.net, teacher);
}

TEST(Train, TraceIsMonotoneAndConvergenceIsHonest) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto& s = fixtures::trained_student(seed);
    const auto& trace = s.report.trace;
    ASSERT_FALSE(trace.empty());
    for (std::size_t k = 1; k < trace.size(); ++k) EXPECT_LE(trace[k].loss, trace[k - 1].loss);
    EXPECT_EQ(trace.back().loss, s.report.final_loss);
    if (s.report.status == TrainStatus::Converged) {
      EXPECT_LE(max_abs(gradient(s.net, s.data)), TrainOptions{}.tol_g);
      EXPECT_TRUE(is_critical(s.net, s.data, TrainOptions{}.tol_g));
    }
    EXPECT_DOUBLE_EQ(loss(s.net, s.data), s.report.final_loss);
  }
}

TEST(Train, StudentOnTeacherDataConverges) {
  int converged = 0;
  for (std::uint64_t seed : {1, 2, 3, 4}) converged += fixtures::trained_student(seed).report.status == TrainStatus::Converged;
  EXPECT_GE(converged, 3);
}

TEST(Train, RandomInitIsNotCritical) {
  const Network net = init_random({2, 3, 1}, ActivationKind::Tanh, 1.0, 3);
  EXPECT_FALSE(is_critical(net, fixtures::random_dataset(2, 6, 3), 1e-6));
}

TEST(Train, IterationBudgetIsRespected) {
  TrainOptions opts;
  opts.max_iters = 5;
  opts.newton_polish = false;
  const Network net = init_random({2, 3, 1}, ActivationKind::Sigmoid, 1.0, 3);
  const TrainResult r = train_to_critical(net, fixtures::random_dataset(2, 6, 3), opts);
  EXPECT_EQ(r.report.status, TrainStatus::MaxIters);
  EXPECT_EQ(r.report.iters, 5);
  EXPECT_EQ(r.report.newton_steps, 0);
}

TEST(Train, InvalidOptionsAreRejected) {
  TrainOptions opts;
  opts.tol_g = 0.0;
  const Network net = init_random({1, 1, 1}, ActivationKind::Sigmoid, 1.0, 1);
  EXPECT_THROW(train_to_critical(net, fixtures::random_dataset(1, 2, 1), opts), DomainError);
}
