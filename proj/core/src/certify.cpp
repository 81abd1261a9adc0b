#include "landscape/certify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "landscape/diff.hpp"
#include "landscape/errors.hpp"
#include "landscape/forward.hpp"

namespace landscape {

std::vector<double> default_probe_radii() {
  std::vector<double> r(64);
  for (int i = 0; i < 64; ++i) r[i] = std::pow(10.0, -4.0 + 3.0 * i / 63.0);
  return r;
}

ProbeReport probe_random_directions(const Network& net, const Dataset& data, int directions,
                                    const std::vector<double>& radii, std::uint64_t seed) {
  ProbeReport rep;
  rep.directions = std::max(directions, 0);
  rep.radii = radii;
  rep.seed = seed;
  rep.base_loss = loss(net, data);
  rep.radius_min_delta.assign(radii.size(), std::numeric_limits<double>::infinity());
  rep.radius_max_delta.assign(radii.size(), -std::numeric_limits<double>::infinity());
  if (rep.directions == 0) return rep;

  const ParamVector w = flatten(net);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ParamVector v(w.size());
  Network probe = net;
  rep.direction_min_delta.reserve(static_cast<std::size_t>(rep.directions));
  for (int k = 0; k < rep.directions; ++k) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
    v /= v.norm();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < radii.size(); ++j) {
      probe = unflatten(net, w + radii[j] * v);
      const double delta = loss(probe, data) - rep.base_loss;
      best = std::min(best, delta);
      rep.radius_min_delta[j] = std::min(rep.radius_min_delta[j], delta);
      rep.radius_max_delta[j] = std::max(rep.radius_max_delta[j], delta);
      if (delta < rep.global_min_delta) {
        rep.global_min_delta = delta;
        rep.argmin_direction = k;
        rep.argmin_radius = static_cast<int>(j);
        rep.argmin_vector = v;
      }
    }
    rep.direction_min_delta.push_back(best);
  }
  return rep;
}

bool probe_finds_no_descent(const ProbeReport& report, double rel) {
  return report.global_min_delta >= -rel * (1.0 + report.base_loss);
}

std::vector<Network> walk_lambda(const Network& net_small, const EmbeddingPlan& plan, double lambda_from,
                                 double lambda_to, int steps) {
  if (steps < 1) throw PlanError("walk needs at least one step");
  validate_plan(net_small, plan);
  std::vector<Network> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) {
    EmbeddingPlan p = plan;
    p.lambda = lambda_from + (lambda_to - lambda_from) * static_cast<double>(k) / steps;
    if (k == steps) p.lambda = lambda_to;
    out.push_back(gamma_embed(net_small, p));
  }
  return out;
}

std::string to_string(CriticalKind kind) {
  switch (kind) {
    case CriticalKind::StrictMin:
      return "StrictMin";
    case CriticalKind::Saddle:
      return "Saddle";
    case CriticalKind::DegenerateMinCandidate:
      return "DegenerateMinCandidate";
    case CriticalKind::NotCritical:
      return "NotCritical";
  }
  return "NotCritical";
}

CriticalPointCertificate classify_critical_point(const Network& net, const Dataset& data,
                                                 const CriticalTolerances& tols) {
  CriticalPointCertificate cert;
  if (net.param_count() > kDenseHessianLimit) {
    throw SizeError("classify_critical_point: too many parameters for a dense Hessian");
  }
  cert.grad_norm = max_abs(gradient(net, data));
  if (cert.grad_norm > tols.grad) {
    cert.kind = CriticalKind::NotCritical;
    return cert;
  }
  const Matrix h = hessian_fd(net, data).hessian;
  cert.tol_eig = eig_tolerance(h);
  cert.spectrum = hessian_eigs(h).values;
  const double lo = cert.spectrum[0];
  if (lo < -cert.tol_eig) {
    cert.kind = CriticalKind::Saddle;
  } else if (lo > cert.tol_eig) {
    cert.kind = CriticalKind::StrictMin;
  } else {
    cert.kind = CriticalKind::DegenerateMinCandidate;
    cert.probe = probe_random_directions(net, data, tols.probe_directions, default_probe_radii(), tols.probe_seed);
  }
  return cert;
}

std::string to_string(SourcePolicy policy) {
  switch (policy) {
    case SourcePolicy::First:
      return "first";
    case SourcePolicy::Heaviest:
      return "heaviest";
    case SourcePolicy::Reserve:
      return "reserve";
  }
  return "reserve";
}

SourcePolicy source_policy_from_string(const std::string& name) {
  if (name == "first") return SourcePolicy::First;
  if (name == "heaviest") return SourcePolicy::Heaviest;
  if (name == "reserve") return SourcePolicy::Reserve;
  throw FormatError("unknown source policy '" + name + "'");
}

int choose_source(const Network& net, int layer, SourcePolicy policy, int step, int total) {
  const int n = net.dim(layer);
  const auto heaviest = [&](int from) {
    const Matrix& out = net.weight(layer + 1);
    int best = from;
    for (int k = from + 1; k < n; ++k) {
      if (out.col(k).norm() > out.col(best).norm()) best = k;
    }
    return best;
  };
  switch (policy) {
    case SourcePolicy::First:
      return 0;
    case SourcePolicy::Heaviest:
      return heaviest(0);
    case SourcePolicy::Reserve:
      return (step == 0 || step == total - 1) ? heaviest(0) : heaviest(n - step);
  }
  return 0;
}

LineSearchTrace line_search(const Network& net, const Dataset& data, const ParamVector& dir) {
  LineSearchTrace trace;
  const ParamVector w = flatten(net);
  const double base = loss(net, data);
  trace.best_loss = base;
  constexpr int kPoints = 121;
  for (int sign : {-1, 1}) {
    for (int i = 0; i < kPoints; ++i) {
      const double t = sign * std::pow(10.0, -4.0 + 6.0 * i / (kPoints - 1));
      const double f = loss(unflatten(net, w + t * dir), data);
      trace.steps.push_back(t);
      trace.losses.push_back(f);
      if (std::isfinite(f) && f < trace.best_loss) {
        trace.best_loss = f;
        trace.best_step = t;
      }
    }
  }
  return trace;
}

BdOptions pipeline_bd_options(int layer, bool include_bias) {
  return {.include_bias = include_bias, .merge_duplicate_inputs = layer > 1};
}

std::string to_string(EmbedOrder order) {
  return order == EmbedOrder::FirstLayerFirst ? "first-layer-first" : "last-layer-first";
}

EmbedOrder embed_order_from_string(const std::string& name) {
  if (name == "first-layer-first") return EmbedOrder::FirstLayerFirst;
  if (name == "last-layer-first") return EmbedOrder::LastLayerFirst;
  throw FormatError("unknown embedding order: " + name);
}

std::vector<EmbeddingStep> embed_to_target(Network& net, const Dataset& data, const std::vector<int>& target_dims,
                                           SourcePolicy policy, double lambda, bool include_bias, EmbedOrder order) {
  if (target_dims.size() != net.dims().size()) throw PlanError("target dims change the depth");
  std::vector<int> layers;
  for (int l = 1; l < net.num_layers(); ++l) layers.push_back(l);
  if (order == EmbedOrder::LastLayerFirst) std::reverse(layers.begin(), layers.end());
  std::vector<EmbeddingStep> steps;
  for (int l : layers) {
    const int total = target_dims[static_cast<std::size_t>(l)] - net.dim(l);
    for (int k = 0; k < total; ++k) {
      EmbeddingStep step;
      step.plan = {l, choose_source(net, l, policy, k, total), lambda};
      step.bd = compute_bd(net, data, l, step.plan.source, pipeline_bd_options(l, include_bias));
      step.verdict = classify_embedding(step.bd, lambda);
      net = gamma_embed(net, step.plan);
      steps.push_back(std::move(step));
    }
  }
  return steps;
}

namespace {

void check_chain(const RegionConfig& c) {
  const auto& s = c.student_dims;
  const auto& t = c.target_dims;
  if (s.size() != t.size() || s.front() != t.front() || s.back() != t.back()) {
    throw PlanError("target dims must keep the depth, input and output of the student");
  }
  for (std::size_t l = 1; l + 1 < s.size(); ++l) {
    if (t[l] < s[l]) throw PlanError("target layer narrower than student layer");
  }
  if (c.teacher_dims.front() != s.front() || c.teacher_dims.back() != 1) {
    throw PlanError("teacher and student disagree on input/output dims");
  }
}

struct StudentCheck {
  bool ok = false;
  std::string reason;
};

// The student must be a local minimum candidate with nonzero loss whose B
// matrices at every planned embedding are positive definite.
StudentCheck check_student(const Network& student, const Dataset& data, const TrainReport& rep,
                           const CriticalPointCertificate& cert, const RegionConfig& c) {
  if (rep.status != TrainStatus::Converged) return {false, "training did not converge"};
  const double scale = 1.0 + data.targets().squaredNorm();
  if (rep.final_loss <= 1e-10 * scale) return {false, "zero-residual student: B and D vanish"};
  if (cert.kind != CriticalKind::StrictMin && cert.kind != CriticalKind::DegenerateMinCandidate) {
    return {false, "student is " + to_string(cert.kind)};
  }
  for (int l = 1; l < student.num_layers(); ++l) {
    if (c.target_dims[static_cast<std::size_t>(l)] == student.dim(l)) continue;
    for (int r = 0; r < student.dim(l); ++r) {
      const BDMatrices bd = compute_bd(student, data, l, r, pipeline_bd_options(l, c.b_include_bias));
      const EmbeddingVerdict v = classify_embedding(bd, c.lambda);
      if (v.tag != EmbeddingVerdictTag::MinCandidateInside) {
        return {false, "layer " + std::to_string(l) + " neuron " + std::to_string(r) + ": " + v.reason};
      }
    }
  }
  return {true, ""};
}

}  // namespace

NonAttractingEvidence region_demo(const RegionConfig& c) {
  check_chain(c);
  NonAttractingEvidence ev;
  ev.teacher = init_random(c.teacher_dims, c.activation, c.teacher_scale, c.teacher_seed);
  ev.data = c.dataset ? *c.dataset : generate_teacher_dataset(ev.teacher, c.samples, c.sampler, c.data_seed);
  if (c.student_from_teacher && c.student_dims != c.teacher_dims) {
    throw PlanError("student_from_teacher requires equal teacher and student dims");
  }

  std::string last_reason;
  bool found = false;
  for (int attempt = 0; attempt < c.max_attempts && !found; ++attempt) {
    const std::uint64_t seed = c.init_seed + static_cast<std::uint64_t>(attempt);
    const Network init =
        c.student_from_teacher ? ev.teacher : init_random(c.student_dims, c.activation, c.init_scale, seed);
    ++ev.attempts;
    TrainResult tr;
    try {
      tr = train_to_critical(init, ev.data, c.train);
    } catch (const Diverged& e) {
      last_reason = e.what();
      continue;
    }
    CriticalPointCertificate cert;
    if (tr.report.status == TrainStatus::Converged) cert = classify_critical_point(tr.net, ev.data);
    const StudentCheck check = check_student(tr.net, ev.data, tr.report, cert, c);
    if (!check.ok) {
      last_reason = check.reason;
      if (c.student_from_teacher) break;
      continue;
    }
    ev.student = std::move(tr.net);
    ev.train_report = std::move(tr.report);
    ev.student_certificate = std::move(cert);
    ev.init_seed_used = seed;
    found = true;
  }
  if (!found) {
    throw PreconditionFailed("no usable student after " + std::to_string(ev.attempts) +
                             " attempt(s); last failure: " + last_reason);
  }

  // Embed one neuron at a time in the configured layer order.
  Network net = ev.student;
  for (int l = 1; l < ev.student.num_layers(); ++l) {
    if (c.target_dims[static_cast<std::size_t>(l)] == ev.student.dim(l)) continue;
    EmbeddingStep alt;
    alt.plan = {l, 0, c.lambda};
    alt.bd = compute_bd(ev.student, ev.data, l, 0, pipeline_bd_options(l, !c.b_include_bias));
    alt.verdict = classify_embedding(alt.bd, c.lambda);
    ev.alternate_bias.push_back(std::move(alt));
  }
  ev.steps = embed_to_target(net, ev.data, c.target_dims, c.policy, c.lambda, c.b_include_bias, c.order);
  if (ev.steps.empty()) throw PreconditionFailed("target dims equal student dims: nothing to embed");
  for (std::size_t k = 0; k < ev.steps.size(); ++k) {
    const EmbeddingStep& step = ev.steps[k];
    if (step.verdict.tag != EmbeddingVerdictTag::MinCandidateInside) {
      throw PreconditionFailed("embedding step " + std::to_string(k) + " (layer " + std::to_string(step.plan.layer) +
                               "): " + step.verdict.reason);
    }
  }
  const EmbeddingPlan last_plan = ev.steps.back().plan;
  Network previous = ev.student;
  for (std::size_t k = 0; k + 1 < ev.steps.size(); ++k) previous = gamma_embed(previous, ev.steps[k].plan);

  ev.region_point = net;
  ev.region_loss = loss(net, ev.data);
  ev.min_probe = probe_random_directions(net, ev.data, c.probe_directions, c.radii, c.probe_seed);

  ev.pre_final = previous;
  ev.walk_plan = last_plan;
  const std::vector<Network> walk = walk_lambda(previous, last_plan, c.lambda, c.saddle_lambda, c.walk_steps);
  for (int k = 0; k <= c.walk_steps; ++k) {
    const double lam = c.lambda + (c.saddle_lambda - c.lambda) * static_cast<double>(k) / c.walk_steps;
    ev.walk_lambdas.push_back(k == c.walk_steps ? c.saddle_lambda : lam);
    const double f = loss(walk[static_cast<std::size_t>(k)], ev.data);
    ev.walk_losses.push_back(f);
    ev.walk_max_deviation = std::max(ev.walk_max_deviation, std::abs(f - ev.region_loss));
  }

  ev.saddle_point = walk.back();
  ev.saddle_bd = compute_bd(previous, ev.data, last_plan.layer, last_plan.source, pipeline_bd_options(last_plan.layer, c.b_include_bias));
  ev.saddle_verdict = classify_embedding(ev.saddle_bd, c.saddle_lambda);
  ev.saddle_probe = probe_random_directions(ev.saddle_point, ev.data, c.probe_directions, c.radii, c.probe_seed + 1);

  EmbeddingPlan saddle_plan = last_plan;
  saddle_plan.lambda = c.saddle_lambda;
  ev.escape = escape_direction(ev.saddle_point, saddle_plan, ev.saddle_bd);
  const ParamVector w = flatten(ev.saddle_point);
  constexpr double h = 1e-3;
  const double f0 = loss(ev.saddle_point, ev.data);
  ev.escape_curvature = (loss(unflatten(ev.saddle_point, w + h * ev.escape), ev.data) +
                         loss(unflatten(ev.saddle_point, w - h * ev.escape), ev.data) - 2.0 * f0) /
                        (h * h);
  ev.line_search = line_search(ev.saddle_point, ev.data, ev.escape);

  const Network start = unflatten(ev.saddle_point, w + ev.line_search.best_step * ev.escape);
  TrainOptions descend = c.train;
  descend.max_iters = c.descent_iters;
  descend.newton_polish = false;
  const TrainResult tr = train_to_critical(start, ev.data, descend);
  ev.descent = tr.report.trace;
  ev.escape_point = tr.net;
  ev.escape_loss = tr.report.final_loss;
  return ev;
}

}  // namespace landscape
