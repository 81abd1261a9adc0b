#include <gtest/gtest.h>

#include <cmath>

#include "landscape/certify.hpp"
#include "landscape/diff.hpp"
#include "landscape/errors.hpp"
#include "landscape/forward.hpp"
#include "support.hpp"

using namespace landscape;

namespace {

// Shallow construction: 1-1-1 student grown to 1-2-1.
RegionConfig shallow_config() {
  RegionConfig c;
  c.teacher_dims = {1, 2, 1};
  c.student_dims = {1, 1, 1};
  c.target_dims = {1, 2, 1};
  c.samples = 10;
  c.teacher_seed = 5;
  c.probe_directions = 300;
  c.max_attempts = 8;
  return c;
}

const NonAttractingEvidence& shallow_evidence() {
  static const NonAttractingEvidence ev = region_demo(shallow_config());
  return ev;
}

}  // namespace

TEST(Probe, DefaultRadiiAreLogSpaced) {
  const auto r = default_probe_radii();
  ASSERT_EQ(r.size(), 64u);
  EXPECT_DOUBLE_EQ(r.front(), 1e-4);
  EXPECT_NEAR(r.back(), 1e-1, 1e-15);
  for (std::size_t k = 2; k < r.size(); ++k) EXPECT_NEAR(r[k] / r[k - 1], r[1] / r[0], 1e-12);
}

TEST(Probe, EmptyProbeIsSentinel) {
  const Network net = init_random({2, 2, 1}, ActivationKind::Sigmoid, 1.0, 1);
  const ProbeReport p = probe_random_directions(net, fixtures::random_dataset(2, 3, 1), 0, default_probe_radii(), 1);
  EXPECT_EQ(p.directions, 0);
  EXPECT_TRUE(std::isinf(p.global_min_delta));
  EXPECT_TRUE(probe_finds_no_descent(p));
}

TEST(Probe, DeterministicAndConsistent) {
  const Network net = init_random({2, 3, 1}, ActivationKind::Tanh, 1.0, 4);
  const Dataset data = fixtures::random_dataset(2, 5, 4);
  const ProbeReport a = probe_random_directions(net, data, 40, default_probe_radii(), 9);
  const ProbeReport b = probe_random_directions(net, data, 40, default_probe_radii(), 9);
  EXPECT_EQ(a.direction_min_delta, b.direction_min_delta);
  EXPECT_EQ(a.argmin_vector, b.argmin_vector);
  double mn = INFINITY;
  for (double d : a.direction_min_delta) mn = std::min(mn, d);
  EXPECT_EQ(a.global_min_delta, mn);
  double mr = INFINITY;
  for (double d : a.radius_min_delta) mr = std::min(mr, d);
  EXPECT_EQ(a.global_min_delta, mr);
  const ParamVector w = flatten(net) + a.radii[static_cast<std::size_t>(a.argmin_radius)] * a.argmin_vector;
  EXPECT_NEAR(loss(unflatten(net, w), data) - a.base_loss, a.global_min_delta, 1e-12);
}

TEST(Probe, FindsDescentAwayFromCriticalPointsButNotAtGlobalMinimum) {
  const Network teacher = init_random({2, 3, 1}, ActivationKind::Sigmoid, 1.0, 2);
  const Dataset data = generate_teacher_dataset(teacher, 6, InputSampler{}, 2);
  EXPECT_TRUE(probe_finds_no_descent(probe_random_directions(teacher, data, 50, default_probe_radii(), 1)));
  const Network other = init_random({2, 3, 1}, ActivationKind::Sigmoid, 1.0, 3);
  EXPECT_FALSE(probe_finds_no_descent(probe_random_directions(other, data, 50, default_probe_radii(), 1)));
}

TEST(Walk, LossIsConstantAlongLambda) {
  const auto& s = fixtures::trained_student(2);
  for (int layer : {1, 2}) {
    const auto walk = walk_lambda(s.net, {layer, 0, 0.5}, 0.5, -0.2, 50);
    ASSERT_EQ(walk.size(), 51u);
    const double l0 = loss(walk.front(), s.data);
    for (const Network& n : walk) EXPECT_LE(std::abs(loss(n, s.data) - l0), 1e-12 * (1 + l0));
    EXPECT_EQ(walk.back(), gamma_embed(s.net, {layer, 0, -0.2}));
  }
  const auto flat = walk_lambda(s.net, {1, 0, 0.5}, 0.5, 0.5, 3);
  for (const Network& n : flat) EXPECT_EQ(n, flat.front());
  EXPECT_THROW(walk_lambda(s.net, {3, 0, 0.5}, 0.5, -0.2, 4), PlanError);
}

TEST(CriticalPoint, Classification) {
  const Network net = init_random({2, 2, 1}, ActivationKind::Sigmoid, 1.0, 1);
  EXPECT_EQ(classify_critical_point(net, fixtures::random_dataset(2, 4, 1)).kind, CriticalKind::NotCritical);
  const auto& s = fixtures::trained_student(2, 1e-10);
  const CriticalPointCertificate cert = classify_critical_point(s.net, s.data);
  EXPECT_TRUE(cert.kind == CriticalKind::StrictMin || cert.kind == CriticalKind::DegenerateMinCandidate);
  EXPECT_EQ(cert.spectrum.size(), static_cast<Eigen::Index>(s.net.param_count()));
  EXPECT_EQ(cert.probe.has_value(), cert.kind == CriticalKind::DegenerateMinCandidate);
}

TEST(SourcePolicy, NamesAndChoices) {
  for (SourcePolicy p : {SourcePolicy::First, SourcePolicy::Heaviest, SourcePolicy::Reserve}) {
    EXPECT_EQ(source_policy_from_string(to_string(p)), p);
  }
  EXPECT_THROW(source_policy_from_string("newest"), FormatError);
  std::vector<Matrix> w{Matrix::Ones(3, 1), Matrix(1, 3)};
  w[1] << 0.5, 2.0, 1.0;
  const Network net({1, 3, 1}, ActivationKind::Sigmoid, w, {Vector::Zero(3), Vector::Zero(1)});
  EXPECT_EQ(choose_source(net, 1, SourcePolicy::First, 0, 4), 0);
  EXPECT_EQ(choose_source(net, 1, SourcePolicy::Heaviest, 1, 4), 1);
  EXPECT_EQ(choose_source(net, 1, SourcePolicy::Reserve, 0, 4), 1);
  // Between the first and last step only neurons added in this layer qualify.
  EXPECT_EQ(choose_source(net, 1, SourcePolicy::Reserve, 1, 4), 2);
  EXPECT_EQ(choose_source(net, 1, SourcePolicy::Reserve, 3, 4), 1);
}

TEST(Region, ReserveKeepsEveryStepAboveTheFinalScale) {
  const auto& s = fixtures::trained_student(2);
  Network net = s.net;
  const std::vector<EmbeddingStep> steps = embed_to_target(net, s.data, {2, 9, 1, 1}, SourcePolicy::Reserve, 0.5);
  ASSERT_EQ(steps.size(), 8u);
  const double b0 = steps.front().bd.b_eigenvalues.cwiseAbs().maxCoeff();
  EXPECT_NEAR(steps.back().bd.b_eigenvalues.cwiseAbs().maxCoeff(), b0 / 2, 1e-12 * b0);
  for (const EmbeddingStep& st : steps) EXPECT_GE(st.bd.b_eigenvalues.cwiseAbs().maxCoeff(), b0 / 32 * (1 - 1e-12));
  EXPECT_EQ(net.dims(), (std::vector<int>{2, 9, 1, 1}));
}

TEST(Region, EmbedOrderControlsTheLastLayer) {
  const auto& s = fixtures::trained_student(2);
  Network a = s.net, b = s.net;
  const auto first = embed_to_target(a, s.data, {2, 3, 3, 1}, SourcePolicy::Heaviest, 0.5, false,
                                     EmbedOrder::FirstLayerFirst);
  const auto last = embed_to_target(b, s.data, {2, 3, 3, 1}, SourcePolicy::Heaviest, 0.5, false,
                                    EmbedOrder::LastLayerFirst);
  EXPECT_EQ(first.front().plan.layer, 1);
  EXPECT_EQ(first.back().plan.layer, 2);
  EXPECT_EQ(last.front().plan.layer, 2);
  EXPECT_EQ(last.back().plan.layer, 1);
  EXPECT_NEAR(loss(a, s.data), loss(b, s.data), 1e-12);
  EXPECT_EQ(embed_order_from_string(to_string(EmbedOrder::LastLayerFirst)), EmbedOrder::LastLayerFirst);
}

TEST(Region, ShallowConstructionIsANonAttractingRegion) {
  const NonAttractingEvidence& ev = shallow_evidence();
  EXPECT_GT(ev.region_loss, 0.0);
  EXPECT_TRUE(probe_finds_no_descent(ev.min_probe));
  EXPECT_LE(ev.walk_max_deviation, 1e-12 * (1 + ev.region_loss));
  EXPECT_EQ(ev.saddle_verdict.tag, EmbeddingVerdictTag::Saddle);
  EXPECT_LT(ev.escape_curvature, 0.0);
  EXPECT_LT(ev.line_search.best_loss, ev.region_loss);
  EXPECT_LT(ev.escape_loss, ev.region_loss - 1e-6);
  for (const EmbeddingStep& s : ev.steps) EXPECT_EQ(s.verdict.tag, EmbeddingVerdictTag::MinCandidateInside);
  ASSERT_EQ(ev.alternate_bias.size(), 1u);
  EXPECT_TRUE(ev.alternate_bias[0].bd.include_bias);
}

TEST(Region, SaddleVerdictAgreesWithHessian) {
  const NonAttractingEvidence& ev = shallow_evidence();
  const CriticalPointCertificate saddle = classify_critical_point(ev.saddle_point, ev.data);
  const SplitCoefficients sp = default_split(-0.2);
  const double effective = sp.alpha * sp.beta * ev.saddle_bd.b_eigenvalues(0);
  if (std::abs(effective) > 10 * saddle.tol_eig) EXPECT_EQ(saddle.kind, CriticalKind::Saddle);
  const CriticalPointCertificate region = classify_critical_point(ev.region_point, ev.data);
  EXPECT_NE(region.kind, CriticalKind::NotCritical);
  // Only the bias-augmented B tests the full incoming block of the new neuron.
  if (ev.alternate_bias[0].verdict.tag == EmbeddingVerdictTag::MinCandidateInside) {
    EXPECT_NE(region.kind, CriticalKind::Saddle);
  }
  if (region.kind == CriticalKind::Saddle) {
    EXPECT_NE(ev.alternate_bias[0].verdict.tag, EmbeddingVerdictTag::MinCandidateInside);
  }
}

TEST(Region, StudentEqualToTeacherIsRejected) {
  RegionConfig c = shallow_config();
  c.teacher_dims = {1, 1, 1};
  c.student_from_teacher = true;
  EXPECT_THROW(region_demo(c), PreconditionFailed);
}

TEST(Region, BadTargetsAreRejected) {
  RegionConfig c = shallow_config();
  c.target_dims = {1, 2, 2, 1};
  EXPECT_THROW(region_demo(c), PlanError);
  c.target_dims = {1, 1, 1};
  EXPECT_THROW(region_demo(c), PreconditionFailed);
}
