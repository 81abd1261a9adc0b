#include "landscape/pathfinder.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/LU>

#include "landscape/diff.hpp"
#include "landscape/errors.hpp"
#include "landscape/forward.hpp"
#include "landscape/linalg.hpp"

namespace landscape {

namespace {

constexpr double kMaxCondition = 1e12;
constexpr double kIdentityTol = 1e-8;
constexpr double kScheduleMargin = 1.05;

// Relative tolerance for the reconstruction identities: 1e-8, widened to
// the roundoff floor of the matrix product being checked.
double identity_tol(const Matrix& w, const Matrix& a) {
  const double scale = max_abs(w) * max_abs(a) * static_cast<double>(std::max<Eigen::Index>(1, w.cols()));
  return kIdentityTol * std::max(1.0, scale);
}


}  // namespace

bool WideLayerInfo::ready() const {
  return eligible && activation_full_rank &&
         std::all_of(weight_full_rank.begin(), weight_full_rank.end(), [](bool b) { return b; });
}

WideLayerInfo wide_layer_info(const Network& net, const Dataset& data) {
  WideLayerInfo info;
  const int L = net.num_layers();
  const int N = data.size();
  for (int l = L - 1; l >= 1 && info.wide_layer < 0; --l) {
    if (net.dim(l) < N) continue;
    bool monotone = true;
    for (int k = l + 1; k <= L; ++k) monotone = monotone && net.dim(k) <= net.dim(k - 1);
    if (monotone) info.wide_layer = l;
  }
  if (info.wide_layer < 0) {
    info.reason = "no hidden layer with at least N neurons followed by non-increasing widths";
    return info;
  }
  info.eligible = true;
  const ForwardCache cache = forward(net, data);
  info.activation_rank = numerical_rank(cache.act[info.wide_layer]);
  info.activation_full_rank = info.activation_rank >= N;
  if (info.activation_rank < N) {
    info.reason = "activation matrix of layer " + std::to_string(info.wide_layer) + " has rank " +
                  std::to_string(info.activation_rank) + " < " + std::to_string(N);
  }
  for (int l = info.wide_layer + 2; l <= L; ++l) {
    info.checked_layers.push_back(l);
    const bool full = has_full_rank(net.weight(l));
    info.weight_full_rank.push_back(full);
    if (!full && info.reason.empty()) info.reason = "weight matrix of layer " + std::to_string(l) + " is rank deficient";
  }
  return info;
}

Network perturb_full_rank(const Network& net, const Dataset& data, double eps, std::uint64_t seed) {
  WideLayerInfo info = wide_layer_info(net, data);
  if (!info.eligible) throw RankError("network not eligible for a descent path: " + info.reason);
  if (info.ready()) return net;
  const ParamVector w = flatten(net);
  const double mag = eps / std::sqrt(static_cast<double>(w.size()));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-mag, mag);
  constexpr int kDraws = 16;
  for (int draw = 0; draw < kDraws; ++draw) {
    ParamVector noisy = w;
    for (Eigen::Index i = 0; i < noisy.size(); ++i) noisy[i] += unif(rng);
    Network candidate = unflatten(net, noisy);
    info = wide_layer_info(candidate, data);
    if (info.ready()) return candidate;
  }
  throw RankError("no full-rank perturbation after 16 draws: " + info.reason);
}

std::vector<Matrix> realize_layer_path(const Matrix& a_wide, const Matrix& w, const Vector& w0,
                                       const std::vector<Matrix>& target_preacts) {
  const auto n_samples = a_wide.cols();
  if (w.cols() != a_wide.rows() || w0.size() != w.rows()) throw ShapeError("realize_layer_path: shape mismatch");
  const std::vector<int> rows = independent_columns(a_wide.transpose(), static_cast<int>(n_samples));
  Matrix a_bar(n_samples, n_samples);
  for (Eigen::Index k = 0; k < n_samples; ++k) a_bar.row(k) = a_wide.row(rows[static_cast<std::size_t>(k)]);
  const double cond = condition_number(a_bar);
  if (!(cond <= kMaxCondition)) {
    throw SingularError("selected activation submatrix has condition number " + std::to_string(cond));
  }
  const Eigen::PartialPivLU<Matrix> lu(a_bar.transpose());
  const Matrix current = (w * a_wide).colwise() + w0;

  std::vector<Matrix> out;
  out.reserve(target_preacts.size());
  for (const Matrix& target : target_preacts) {
    if (target.rows() != w.rows() || target.cols() != n_samples) throw ShapeError("target path shape mismatch");
    // delta * Abar^{-1}, solved as Abar^T X^T = delta^T.
    const Matrix coeff = lu.solve((target - current).transpose()).transpose();
    Matrix wt = w;
    for (Eigen::Index k = 0; k < n_samples; ++k) wt.col(rows[static_cast<std::size_t>(k)]) += coeff.col(k);
    const Matrix realized = (wt * a_wide).colwise() + w0;
    if (max_abs(Matrix(realized - target)) > identity_tol(wt, a_wide)) {
      throw SingularError("realized pre-activations miss the target path");
    }
    out.push_back(std::move(wt));
  }
  return out;
}

InductiveStepPath inductive_layer_step(const Matrix& a_prev, const Matrix& w, const Vector& w0,
                                       const std::vector<Matrix>& target_preacts, ActivationKind kind) {
  const auto n_out = w.rows();
  const auto n_in = w.cols();
  if (n_out > n_in) throw ShapeError("inductive_layer_step: layer widens");
  if (a_prev.rows() != n_in || w0.size() != n_out) throw ShapeError("inductive_layer_step: shape mismatch");

  InductiveStepPath path;
  path.pivot = independent_columns(w, static_cast<int>(n_out));
  const Matrix W = select_columns(w, path.pivot);
  const double cond = condition_number(W);
  if (!(cond <= kMaxCondition)) throw SingularError("pivot block of w has condition number " + std::to_string(cond));
  const Eigen::PartialPivLU<Matrix> lu(W);

  const ImageInterval img = act_image(kind);
  const bool symmetric = kind == ActivationKind::Tanh;
  const double a_top = symmetric ? max_abs(a_prev) : a_prev.maxCoeff();
  const double upper = std::max(a_top, img.upper / kScheduleMargin);
  // Sigmoid: keep every pivot row at least half its smallest starting value.
  Vector floor_level = Vector::Zero(n_out);
  if (!symmetric) {
    for (Eigen::Index k = 0; k < n_out; ++k) floor_level[k] = 0.5 * a_prev.row(path.pivot[static_cast<std::size_t>(k)]).minCoeff();
  }
  const Matrix current = (w * a_prev).colwise() + w0;
  const double lo_bound = img.lower + kActInverseMargin;
  const double hi_bound = img.upper - kActInverseMargin;

  for (const Matrix& target : target_preacts) {
    if (target.rows() != n_out || target.cols() != a_prev.cols()) throw ShapeError("target path shape mismatch");
    const Matrix shift = lu.solve(target - current);  // W^{-1} n~(t)
    Vector s = Vector::Zero(n_out);
    Matrix bracket = a_prev;
    for (Eigen::Index k = 0; k < n_out; ++k) {
      const Eigen::Index row = path.pivot[static_cast<std::size_t>(k)];
      bracket.row(row) += shift.row(k);
      if (!symmetric) s[k] = std::max(0.0, floor_level[k] - bracket.row(row).minCoeff());
    }
    for (Eigen::Index k = 0; k < n_out; ++k) bracket.row(path.pivot[static_cast<std::size_t>(k)]).array() += s[k];
    const Vector delta = W * s;
    const double top = symmetric ? max_abs(bracket) : bracket.maxCoeff();
    const double lambda = std::max(1.0, top / upper);
    Matrix act = bracket / lambda;
    if (act.minCoeff() < lo_bound || act.maxCoeff() > hi_bound) {
      throw ImageError("required activations leave the open image interval");
    }
    const Matrix wt = lambda * w;
    const Vector bt = w0 - delta;
    const Matrix realized = (wt * act).colwise() + bt;
    if (max_abs(Matrix(realized - target)) > identity_tol(wt, act) * (1.0 + max_abs(target))) {
      throw SingularError("inductive step misses the target path");
    }
    path.weights.push_back(wt);
    path.biases.push_back(bt);
    path.activations.push_back(std::move(act));
    path.scales.push_back(lambda);
  }
  return path;
}

namespace {

DescentPath build_path(const Network& start, const Dataset& data, int wide, int steps) {
  const int L = start.num_layers();
  const ForwardCache cache = forward(start, data);
  const Vector& z = cache.output;
  const Vector& y = data.targets();

  DescentPath path;
  path.wide_layer = wide;
  path.start = start;
  for (int k = 0; k <= steps; ++k) path.times.push_back(static_cast<double>(k) / steps);

  std::vector<Matrix> targets;
  for (double t : path.times) targets.push_back((z + t * (y - z)).transpose());

  // layer_weights[l][k], layer_biases[l][k] for layers > wide.
  std::vector<std::vector<Matrix>> weights(static_cast<std::size_t>(L) + 1);
  std::vector<std::vector<Vector>> biases(static_cast<std::size_t>(L) + 1);
  for (int l = L; l >= wide + 2; --l) {
    const InductiveStepPath step =
        inductive_layer_step(cache.act[l - 1], start.weight(l), start.bias(l), targets, start.activation());
    weights[l] = step.weights;
    biases[l] = step.biases;
    std::vector<Matrix> next;
    Matrix base_inverse = cache.act[l - 1];
    base_inverse = base_inverse.unaryExpr([&](double a) { return act_inverse(start.activation(), a); });
    for (const Matrix& act : step.activations) {
      const Matrix inv = act.unaryExpr([&](double a) { return act_inverse(start.activation(), a); });
      next.push_back(cache.pre[l - 1] + (inv - base_inverse));
    }
    targets = std::move(next);
  }
  weights[wide + 1] = realize_layer_path(cache.act[wide], start.weight(wide + 1), start.bias(wide + 1), targets);
  biases[wide + 1].assign(path.times.size(), start.bias(wide + 1));

  for (std::size_t k = 0; k < path.times.size(); ++k) {
    Network net = start;
    for (int l = wide + 1; l <= L; ++l) {
      net.weight(l) = weights[l][k];
      net.bias(l) = biases[l][k];
    }
    for (int l = wide + 2; l <= L; ++l) {
      const Vector sv = singular_values(net.weight(l));
      path.min_weight_rank_ratio = std::min(path.min_weight_rank_ratio, sv[sv.size() - 1] / sv[0]);
    }
    const ForwardCache c = forward(net, data);
    const double t = path.times[k];
    path.max_output_error = std::max(path.max_output_error, max_abs(Vector(c.output - (z + t * (y - z)))));
    path.losses.push_back(c.loss);
    path.params.push_back(flatten(net));
  }

  path.slack = 1e-9 * (1.0 + path.losses.front());
  path.max_increase = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < path.losses.size(); ++k) {
    const double inc = path.losses[k] - path.losses[k - 1];
    path.max_increase = std::max(path.max_increase, inc);
    if (inc > path.slack) ++path.violations;
  }
  path.final_loss = path.losses.back();
  path.certified = path.violations == 0 && path.final_loss <= 1e-6 && path.max_output_error <= 1e-6 &&
                   path.min_weight_rank_ratio > kRankTolerance;
  return path;
}

}  // namespace

DescentPath monotone_descent_to_global(const Network& net, const Dataset& data, int steps, double eps_perturb,
                                       std::uint64_t seed) {
  if (steps < 1) throw DomainError("path needs at least one step");
  const Network start = perturb_full_rank(net, data, eps_perturb, seed);
  const int wide = wide_layer_info(start, data).wide_layer;
  DescentPath path = build_path(start, data, wide, steps);
  for (int n = steps * 2; path.violations > 0 && n <= 4096; n *= 2) path = build_path(start, data, wide, n);
  return path;
}

}  // namespace landscape
