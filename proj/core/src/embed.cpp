#include "landscape/embed.hpp"

#include <cmath>
#include <string>

#include "landscape/errors.hpp"
#include "landscape/forward.hpp"

namespace landscape {

int inserted_index(const Network& net, const EmbeddingPlan& plan) { return net.dim(plan.layer); }

void validate_plan(const Network& net, const EmbeddingPlan& plan) {
  if (plan.layer < 1 || plan.layer > net.num_layers() - 1) {
    throw PlanError("embedding layer " + std::to_string(plan.layer) + " is not a hidden layer");
  }
  if (plan.source < 0 || plan.source >= net.dim(plan.layer)) {
    throw PlanError("source neuron " + std::to_string(plan.source) + " out of range");
  }
  if (!std::isfinite(plan.lambda)) throw PlanError("lambda must be finite");
}

Network gamma_embed(const Network& net, const EmbeddingPlan& plan) {
  validate_plan(net, plan);
  const int l = plan.layer;
  const int r = plan.source;
  const int n = net.dim(l);

  std::vector<int> dims = net.dims();
  dims[l] += 1;
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
  for (int k = 1; k <= net.num_layers(); ++k) {
    weights.push_back(net.weight(k));
    biases.push_back(net.bias(k));
  }

  Matrix& u = weights[l - 1];
  Vector& u0 = biases[l - 1];
  u.conservativeResize(n + 1, Eigen::NoChange);
  u.row(n) = net.weight(l).row(r);
  u0.conservativeResize(n + 1);
  u0[n] = net.bias(l)[r];

  Matrix& v = weights[l];
  v.conservativeResize(Eigen::NoChange, n + 1);
  const Vector v_source = net.weight(l + 1).col(r);
  v.col(n) = plan.lambda * v_source;
  v.col(r) = (1.0 - plan.lambda) * v_source;

  return Network(std::move(dims), net.activation(), std::move(weights), std::move(biases));
}

namespace {

bool rows_equal(const Matrix& m, Eigen::Index a, Eigen::Index b) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double x = m(a, j);
    const double y = m(b, j);
    if (std::abs(x - y) > 1e-14 * (1.0 + std::abs(x))) return false;
  }
  return true;
}

std::vector<std::vector<int>> coordinate_groups(const Matrix& prev_act, bool merge) {
  std::vector<std::vector<int>> groups;
  for (int i = 0; i < prev_act.rows(); ++i) {
    bool placed = false;
    if (merge) {
      for (auto& g : groups) {
        if (rows_equal(prev_act, g.front(), i)) {
          g.push_back(i);
          placed = true;
          break;
        }
      }
    }
    if (!placed) groups.push_back({i});
  }
  return groups;
}

}  // namespace

BDMatrices compute_bd(const Network& net, const Dataset& data, int layer, int source, const BdOptions& options) {
  validate_plan(net, {layer, source, 0.0});
  const ForwardCache cache = forward(net, data);
  const SensitivityTensor sens = neuron_sensitivities(net, cache);
  const Matrix& prev = cache.act[layer - 1];
  const Matrix& next_sens = sens.layers[layer + 1];
  const Vector v = net.weight(layer + 1).col(source);

  BDMatrices bd;
  bd.layer = layer;
  bd.source = source;
  bd.include_bias = options.include_bias;
  bd.groups = coordinate_groups(prev, options.merge_duplicate_inputs);
  bd.sensitivity_scale = max_abs(next_sens);

  const int offset = options.include_bias ? 1 : 0;
  const int coords = offset + static_cast<int>(bd.groups.size());
  const int n_next = net.dim(layer + 1);
  bd.B = Matrix::Zero(coords, coords);
  bd.D = Matrix::Zero(coords, n_next);

  Vector a_hat(coords);
  for (int alpha = 0; alpha < data.size(); ++alpha) {
    if (offset) a_hat[0] = 1.0;
    for (std::size_t g = 0; g < bd.groups.size(); ++g) {
      a_hat[offset + static_cast<int>(g)] = prev(bd.groups[g].front(), alpha);
    }
    const ActValue act = act_eval(net.activation(), cache.pre[layer](source, alpha));
    const double weighted = next_sens.col(alpha).dot(v) * act.d2;
    bd.B.noalias() += weighted * a_hat * a_hat.transpose();
    bd.D.noalias() += act.d1 * a_hat * next_sens.col(alpha).transpose();
  }
  bd.B = 0.5 * (bd.B + bd.B.transpose());
  bd.b_eigenvalues = hessian_eigs(bd.B).values;
  bd.d_norm = max_abs(bd.D);
  return bd;
}

Matrix compute_B(const Network& net, const Dataset& data, int layer, int source, const BdOptions& options) {
  return compute_bd(net, data, layer, source, options).B;
}

Matrix compute_D(const Network& net, const Dataset& data, int layer, int source, const BdOptions& options) {
  return compute_bd(net, data, layer, source, options).D;
}

EmbeddingTolerances default_tolerances(const BDMatrices& bd) {
  return {eig_tolerance(bd.B), 1e-7 * (1.0 + bd.sensitivity_scale)};
}

std::string to_string(EmbeddingVerdictTag tag) {
  switch (tag) {
    case EmbeddingVerdictTag::MinCandidateInside:
      return "MinCandidateInside";
    case EmbeddingVerdictTag::MinCandidateOutside:
      return "MinCandidateOutside";
    case EmbeddingVerdictTag::Saddle:
      return "Saddle";
    case EmbeddingVerdictTag::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

EmbeddingVerdict classify_embedding(const BDMatrices& bd, double lambda, const EmbeddingTolerances& tol) {
  EmbeddingVerdict verdict;
  verdict.b_eigenvalues = bd.b_eigenvalues;
  verdict.d_norm = bd.d_norm;
  verdict.lambda = lambda;
  verdict.tolerances = tol;

  if (bd.d_norm > tol.d) {
    verdict.tag = EmbeddingVerdictTag::Saddle;
    verdict.reason = "D is nonzero";
    return verdict;
  }
  const Vector& eig = bd.b_eigenvalues;
  const double lo = eig.size() ? eig.minCoeff() : 0.0;
  const double hi = eig.size() ? eig.maxCoeff() : 0.0;
  const bool inside = lambda > 0.0 && lambda < 1.0;
  const bool outside = lambda < 0.0 || lambda > 1.0;

  // alpha*beta has the sign of lambda (1 - lambda): positive inside (0,1).
  if ((inside && lo < -tol.eig) || (outside && hi > tol.eig)) {
    verdict.tag = EmbeddingVerdictTag::Saddle;
    verdict.reason = "alpha*beta*B has a negative eigenvalue";
    return verdict;
  }
  if (eig.size() == 0 || (eig.array().abs() <= tol.eig).any()) {
    verdict.tag = EmbeddingVerdictTag::Inconclusive;
    verdict.reason = "B has eigenvalues inside the tolerance band";
    return verdict;
  }
  if (!inside && !outside) {
    verdict.tag = EmbeddingVerdictTag::Inconclusive;
    verdict.reason = "lambda on the boundary {0, 1}";
    return verdict;
  }
  if (lo > tol.eig && inside) {
    verdict.tag = EmbeddingVerdictTag::MinCandidateInside;
    verdict.reason = "B positive definite, D zero, lambda in (0,1)";
  } else if (hi < -tol.eig && outside) {
    verdict.tag = EmbeddingVerdictTag::MinCandidateOutside;
    verdict.reason = "B negative definite, D zero, lambda outside [0,1]";
  } else {
    verdict.tag = EmbeddingVerdictTag::Saddle;
    verdict.reason = "B indefinite";
  }
  return verdict;
}

EmbeddingVerdict classify_embedding(const BDMatrices& bd, double lambda) {
  return classify_embedding(bd, lambda, default_tolerances(bd));
}

SplitCoefficients default_split(double lambda) { return {1.0 - lambda, lambda}; }

namespace {

struct BlockIndex {
  std::vector<std::size_t> u;
  std::vector<std::size_t> v;
  std::vector<std::size_t> rest;
};

// Flat indices of the source neuron's incoming block, its outgoing weights
// and everything else, in `net`'s layout.
BlockIndex split_indices(const Network& net, int layer, int source) {
  const ParamLayout layout(net);
  BlockIndex idx;
  for (int i = 0; i <= net.dim(layer - 1); ++i) idx.u.push_back(layout.index(layer, source, i));
  for (int s = 0; s < net.dim(layer + 1); ++s) idx.v.push_back(layout.index(layer + 1, s, source + 1));
  for (std::size_t k = 0; k < layout.size(); ++k) {
    const auto e = layout.entry(k);
    const bool is_u = e.layer == layer && e.row == source;
    const bool is_v = e.layer == layer + 1 && e.col == source + 1;
    if (!is_u && !is_v) idx.rest.push_back(k);
  }
  return idx;
}

void check_split(SplitCoefficients split, double lambda) {
  if (std::abs(split.alpha + split.beta) < 1e-300) throw DomainError("alpha + beta must be nonzero");
  if (std::abs(split.alpha * lambda - split.beta * (1.0 - lambda)) > 1e-12 * (1.0 + std::abs(split.alpha) + std::abs(split.beta))) {
    throw DomainError("split coefficients inconsistent with lambda");
  }
}

}  // namespace

TransformedBasis transformed_basis(const Network& net_small, const EmbeddingPlan& plan, SplitCoefficients split) {
  validate_plan(net_small, plan);
  check_split(split, plan.lambda);
  const int l = plan.layer;
  const int r = plan.source;
  const int added = inserted_index(net_small, plan);
  const Network big = gamma_embed(net_small, plan);
  const ParamLayout big_layout(big);
  const ParamLayout small_layout(net_small);
  const BlockIndex small_idx = split_indices(net_small, l, r);

  TransformedBasis tb;
  tb.alpha = split.alpha;
  tb.beta = split.beta;
  tb.lambda = plan.lambda;
  tb.incoming = net_small.dim(l - 1) + 1;
  tb.outgoing = net_small.dim(l + 1);
  tb.untouched = static_cast<int>(small_idx.rest.size());
  const auto m = static_cast<Eigen::Index>(big_layout.size());
  tb.basis = Matrix::Zero(m, m);

  const int a = tb.incoming;
  const int s = tb.outgoing;
  const int o_rest = a + s;
  const int o_mu = o_rest + tb.untouched;
  const int o_nu = o_mu + a;
  for (int i = 0; i < a; ++i) {
    const auto u_new = static_cast<Eigen::Index>(big_layout.index(l, added, i));
    const auto u_r = static_cast<Eigen::Index>(big_layout.index(l, r, i));
    tb.basis(u_new, i) = 1.0;
    tb.basis(u_r, i) = 1.0;
    tb.basis(u_new, o_mu + i) = split.alpha;
    tb.basis(u_r, o_mu + i) = -split.beta;
  }
  for (int k = 0; k < s; ++k) {
    const auto v_new = static_cast<Eigen::Index>(big_layout.index(l + 1, k, added + 1));
    const auto v_r = static_cast<Eigen::Index>(big_layout.index(l + 1, k, r + 1));
    tb.basis(v_new, a + k) = 1.0;
    tb.basis(v_r, a + k) = 1.0;
    tb.basis(v_new, o_nu + k) = 1.0;
    tb.basis(v_r, o_nu + k) = -1.0;
  }
  for (int j = 0; j < tb.untouched; ++j) {
    const auto e = small_layout.entry(small_idx.rest[static_cast<std::size_t>(j)]);
    tb.basis(static_cast<Eigen::Index>(big_layout.index(e.layer, e.row, e.col)), o_rest + j) = 1.0;
  }
  return tb;
}

Matrix transformed_hessian(const Network& net_small, const Dataset& data, const EmbeddingPlan& plan,
                           SplitCoefficients split, double tol_g) {
  validate_plan(net_small, plan);
  check_split(split, plan.lambda);
  const double gnorm = max_abs(gradient(net_small, data));
  if (gnorm > tol_g) {
    throw NotCriticalError("smaller network is not at a critical point (|grad|_inf = " + std::to_string(gnorm) + ")");
  }
  const int l = plan.layer;
  const BlockIndex idx = split_indices(net_small, l, plan.source);
  const Matrix hs = hessian_fd(net_small, data).hessian;
  const BDMatrices bd = compute_bd(net_small, data, l, plan.source, {.include_bias = true});

  const int a = net_small.dim(l - 1) + 1;
  const int s = net_small.dim(l + 1);
  const int rest = static_cast<int>(idx.rest.size());
  const int o_rest = a + s;
  const int o_mu = o_rest + rest;
  const int o_nu = o_mu + a;
  const int m = o_nu + s;

  // Old-coordinate blocks: (u, v, rest) with the v direction doubled.
  std::vector<std::size_t> order;
  std::vector<double> scale;
  for (auto k : idx.u) { order.push_back(k); scale.push_back(1.0); }
  for (auto k : idx.v) { order.push_back(k); scale.push_back(2.0); }
  for (auto k : idx.rest) { order.push_back(k); scale.push_back(1.0); }

  Matrix h = Matrix::Zero(m, m);
  for (int i = 0; i < o_mu; ++i) {
    for (int j = 0; j < o_mu; ++j) {
      h(i, j) = scale[i] * scale[j] * hs(static_cast<Eigen::Index>(order[i]), static_cast<Eigen::Index>(order[j]));
    }
  }
  const double ab = split.alpha * split.beta;
  h.block(o_mu, o_mu, a, a) = ab * bd.B;
  h.block(a, o_mu, s, a) = (split.alpha - split.beta) * bd.D.transpose();
  h.block(o_mu, a, a, s) = (split.alpha - split.beta) * bd.D;
  h.block(o_mu, o_nu, a, s) = (split.alpha + split.beta) * bd.D;
  h.block(o_nu, o_mu, s, a) = (split.alpha + split.beta) * bd.D.transpose();
  return h;
}

ParamVector escape_direction(const Network& net_embedded, const EmbeddingPlan& plan, const BDMatrices& bd) {
  if (plan.layer != bd.layer || plan.source != bd.source) {
    throw PlanError("B/D matrices belong to a different neuron than the plan");
  }
  if (plan.layer < 1 || plan.layer > net_embedded.num_layers() - 1 || net_embedded.dim(plan.layer) < 2) {
    throw PlanError("embedded network does not contain the planned layer");
  }
  const int added = net_embedded.dim(plan.layer) - 1;
  if (plan.source >= added) throw PlanError("source neuron out of range in embedded network");

  const SplitCoefficients split = default_split(plan.lambda);
  const double ab = split.alpha * split.beta;
  const EigenDecomposition eig = hessian_eigs(bd.B, true);
  const Eigen::Index pick = ab < 0.0 ? eig.values.size() - 1 : 0;
  const double curvature = ab * eig.values[pick];
  if (!(curvature < -default_tolerances(bd).eig)) {
    throw NoNegativeCurvature("alpha*beta*B has no eigenvalue below -tol_eig");
  }
  const Vector e = eig.vectors.col(pick);

  // Expand the coefficient vector to (bias, every previous-layer neuron).
  const int n_prev = net_embedded.dim(plan.layer - 1);
  Vector full = Vector::Zero(n_prev + 1);
  const int offset = bd.include_bias ? 1 : 0;
  if (bd.include_bias) full[0] = e[0];
  for (std::size_t g = 0; g < bd.groups.size(); ++g) {
    const auto& members = bd.groups[g];
    for (int i : members) full[i + 1] = e[offset + static_cast<int>(g)] / static_cast<double>(members.size());
  }

  const ParamLayout layout(net_embedded);
  ParamVector dir = ParamVector::Zero(static_cast<Eigen::Index>(layout.size()));
  for (int i = 0; i <= n_prev; ++i) {
    dir[static_cast<Eigen::Index>(layout.index(plan.layer, added, i))] = split.alpha * full[i];
    dir[static_cast<Eigen::Index>(layout.index(plan.layer, plan.source, i))] = -split.beta * full[i];
  }
  return dir / dir.norm();
}

}  // namespace landscape
