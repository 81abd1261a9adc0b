#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "landscape/embed.hpp"
#include "landscape/network.hpp"
#include "landscape/trainer.hpp"

namespace landscape {

/// 64 log-spaced radii in [1e-4, 1e-1].
std::vector<double> default_probe_radii();

/// Loss change along random unit directions at a list of radii.
struct ProbeReport {
  int directions = 0;
  std::vector<double> radii;
  std::uint64_t seed = 0;
  double base_loss = 0.0;
  std::vector<double> direction_min_delta;  ///< per direction, min over radii
  std::vector<double> radius_min_delta;     ///< per radius, min over directions
  std::vector<double> radius_max_delta;
  double global_min_delta = std::numeric_limits<double>::infinity();
  int argmin_direction = -1;
  int argmin_radius = -1;
  ParamVector argmin_vector;
};

/// Directions are normalised Gaussians drawn from a mt19937_64 stream.
ProbeReport probe_random_directions(const Network& net, const Dataset& data, int directions,
                                    const std::vector<double>& radii, std::uint64_t seed);

/// Empirical local-minimum standard: no probe lowered the loss by more than
/// rel * (1 + loss).
bool probe_finds_no_descent(const ProbeReport& report, double rel = 1e-9);

/// Embeddings of `net_small` along a linear lambda schedule; steps + 1 nets.
std::vector<Network> walk_lambda(const Network& net_small, const EmbeddingPlan& plan, double lambda_from,
                                 double lambda_to, int steps);

enum class CriticalKind { StrictMin, Saddle, DegenerateMinCandidate, NotCritical };

std::string to_string(CriticalKind kind);

struct CriticalTolerances {
  double grad = 1e-6;
  /// Probe evidence attached to degenerate candidates.
  int probe_directions = 256;
  std::uint64_t probe_seed = 0;
};

struct CriticalPointCertificate {
  CriticalKind kind = CriticalKind::NotCritical;
  double grad_norm = 0.0;
  double tol_eig = 0.0;
  Vector spectrum;  ///< ascending; empty when not critical
  std::optional<ProbeReport> probe;
};

CriticalPointCertificate classify_critical_point(const Network& net, const Dataset& data,
                                                 const CriticalTolerances& tols = {});

/// How the source neuron of each embedding step is chosen.
///  First:    neuron 0 every time.
///  Heaviest: the neuron with the largest outgoing weight norm.
///  Reserve:  the first step splits the heaviest neuron; the steps in between
///            split only neurons added in this layer (heaviest first); the
///            last step takes the heaviest overall, which is the untouched
///            half of the first split when lambda = 1/2.
enum class SourcePolicy { First, Heaviest, Reserve };

std::string to_string(SourcePolicy policy);
SourcePolicy source_policy_from_string(const std::string& name);

/// Order in which hidden layers are grown.
enum class EmbedOrder { FirstLayerFirst, LastLayerFirst };

std::string to_string(EmbedOrder order);
EmbedOrder embed_order_from_string(const std::string& name);

struct RegionConfig {
  std::vector<int> teacher_dims{2, 5, 5, 1};
  std::vector<int> student_dims{2, 1, 1, 1};
  std::vector<int> target_dims{2, 21, 21, 1};
  ActivationKind activation = ActivationKind::Sigmoid;
  int samples = 20;
  InputSampler sampler;
  double teacher_scale = 4.0;
  double init_scale = 0.5;
  /// Start the student at the teacher's own parameters (needs equal dims).
  bool student_from_teacher = false;
  double lambda = 0.5;
  double saddle_lambda = -0.2;
  int walk_steps = 50;
  SourcePolicy policy = SourcePolicy::Reserve;
  /// The walked saddle sits in the layer grown last.
  EmbedOrder order = EmbedOrder::FirstLayerFirst;
  /// Curvature test on the augmented activation (bias row/column of B and D).
  bool b_include_bias = false;
  std::uint64_t teacher_seed = 118;
  std::uint64_t data_seed = 1;
  std::uint64_t init_seed = 1;
  std::uint64_t probe_seed = 1;
  int max_attempts = 64;
  int probe_directions = 5000;
  std::vector<double> radii = default_probe_radii();
  TrainOptions train;
  int descent_iters = 5000;
  /// Use this data instead of sampling the teacher.
  std::optional<Dataset> dataset;
};

struct EmbeddingStep {
  EmbeddingPlan plan;
  BDMatrices bd;
  EmbeddingVerdict verdict;
};

struct LineSearchTrace {
  std::vector<double> steps;
  std::vector<double> losses;
  double best_step = 0.0;
  double best_loss = 0.0;
};

/// Everything the region pipeline produced, stage by stage.
struct NonAttractingEvidence {
  Network teacher;
  Dataset data;
  Network student;
  TrainReport train_report;
  CriticalPointCertificate student_certificate;
  std::uint64_t init_seed_used = 0;
  int attempts = 0;
  /// Student B/D and verdict per embedded layer under the opposite bias convention.
  std::vector<EmbeddingStep> alternate_bias;

  std::vector<EmbeddingStep> steps;
  Network region_point;
  double region_loss = 0.0;
  ProbeReport min_probe;

  /// Network before the last embedding and the plan that produced the region point.
  Network pre_final;
  EmbeddingPlan walk_plan;
  std::vector<double> walk_lambdas;
  std::vector<double> walk_losses;
  double walk_max_deviation = 0.0;

  Network saddle_point;
  BDMatrices saddle_bd;
  EmbeddingVerdict saddle_verdict;
  ProbeReport saddle_probe;

  ParamVector escape;
  double escape_curvature = 0.0;  ///< second difference along `escape`, h = 1e-3
  LineSearchTrace line_search;
  std::vector<TraceRow> descent;
  Network escape_point;
  double escape_loss = 0.0;
};

/// Teacher data, trained student, embedding chain, probes at the minimum and
/// at the walked saddle, escape. PreconditionFailed when no training seed in
/// `max_attempts` yields a usable student.
NonAttractingEvidence region_demo(const RegionConfig& config);

/// Source neuron for the next embedding into `layer` of `net` under `policy`.
/// `step` counts embeddings already applied to this layer, `total` is their number.
int choose_source(const Network& net, int layer, SourcePolicy policy, int step, int total);

/// Grows `net` to `target_dims` one neuron at a time, recording B, D and the
/// verdict of every step. Layers above the first merge duplicated inputs
/// when forming B.
std::vector<EmbeddingStep> embed_to_target(Network& net, const Dataset& data, const std::vector<int>& target_dims,
                                           SourcePolicy policy, double lambda, bool include_bias = false,
                                           EmbedOrder order = EmbedOrder::FirstLayerFirst);

/// B/D options used by the pipeline for `layer`.
BdOptions pipeline_bd_options(int layer, bool include_bias = false);

/// Loss along w + t * dir over a grid of t in both signs.
LineSearchTrace line_search(const Network& net, const Dataset& data, const ParamVector& dir);

}  // namespace landscape
