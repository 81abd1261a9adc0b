#include "landscape/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "landscape/diff.hpp"
#include "landscape/errors.hpp"
#include "landscape/forward.hpp"

namespace landscape {

std::string to_string(TrainStatus status) {
  switch (status) {
    case TrainStatus::Converged:
      return "Converged";
    case TrainStatus::MaxIters:
      return "MaxIters";
    case TrainStatus::Stalled:
      return "Stalled";
  }
  return "MaxIters";
}

Network init_random(const std::vector<int>& dims, ActivationKind activation, double scale, std::uint64_t seed) {
  Network net(dims, activation);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  ParamVector w(static_cast<Eigen::Index>(net.param_count()));
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = scale * unif(rng);
  return unflatten(net, w);
}

bool is_critical(const Network& net, const Dataset& data, double tol) {
  return max_abs(gradient(net, data)) <= tol;
}

namespace {

struct Point {
  ParamVector w;
  double loss = 0.0;
  ParamVector grad;
  double gnorm = 0.0;
};

Point evaluate(const Network& like, const Dataset& data, ParamVector w) {
  Point p;
  const Network net = unflatten(like, w);
  p.loss = loss(net, data);
  if (!std::isfinite(p.loss)) throw Diverged("loss became non-finite");
  p.grad = gradient(net, data);
  p.gnorm = max_abs(p.grad);
  p.w = std::move(w);
  return p;
}

double loss_at(const Network& like, const Dataset& data, const ParamVector& w) {
  const double v = loss(unflatten(like, w), data);
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

// One damped Newton step on |H| + mu I, where |H| has the Hessian's
// eigenvalues replaced by their magnitudes, so every trial direction descends.
// mu shrinks after a success and grows until a non-increasing step is found.
// Returns false if none exists.
bool newton_step(const Network& like, const Dataset& data, Point& cur, double& mu) {
  const GradientFn grad = [&](const Vector& w) { return gradient(unflatten(like, w), data); };
  const Matrix h = hessian_fd(grad, cur.w).hessian;
  const Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) return false;
  const Vector mag = es.eigenvalues().cwiseAbs();
  const Vector g_eig = es.eigenvectors().transpose() * cur.grad;
  const double scale = std::max(mag.maxCoeff(), 1e-300);
  mu = std::clamp(mu, 1e-15 * scale, 1e6 * scale);
  for (int attempt = 0; attempt < 40; ++attempt, mu *= 10.0) {
    const Vector dir = -es.eigenvectors() * (g_eig.array() / (mag.array() + mu)).matrix();
    if (!dir.allFinite()) return false;
    const ParamVector trial = cur.w + dir;
    const double f = loss_at(like, data, trial);
    if (f > cur.loss) continue;
    Point next = evaluate(like, data, trial);
    // At the roundoff floor of the loss, progress is measured by the gradient.
    if (f == cur.loss && next.gnorm >= cur.gnorm) continue;
    cur = std::move(next);
    mu *= 0.1;
    return true;
  }
  return false;
}

}  // namespace

TrainResult train_to_critical(const Network& net, const Dataset& data, const TrainOptions& opts) {
  if (!(opts.tol_g > 0.0) || !(opts.initial_step > 0.0)) throw DomainError("invalid training options");
  TrainReport report;
  Point cur = evaluate(net, data, flatten(net));
  report.trace.push_back({0, cur.loss, cur.gnorm});

  const bool polish = opts.newton_polish && net.param_count() <= opts.polish_max_params;
  double step = opts.initial_step;
  double mu = 1e-3;
  int iter = 0;
  double best = cur.loss;
  int flat = 0;
  report.status = TrainStatus::MaxIters;

  while (cur.gnorm > opts.tol_g && iter < opts.max_iters) {
    if (cur.loss < best) {
      best = cur.loss;
      flat = 0;
    } else if (++flat > opts.stall_iters) {
      report.status = TrainStatus::Stalled;
      break;
    }
    if (polish && cur.gnorm <= opts.polish_start) {
      if (newton_step(net, data, cur, mu)) {
        ++iter;
        ++report.newton_steps;
        report.trace.push_back({iter, cur.loss, cur.gnorm});
        continue;
      }
    }
    const double g2 = cur.grad.squaredNorm();
    bool accepted = false;
    while (step >= opts.min_step) {
      const ParamVector trial = cur.w - step * cur.grad;
      const double f = loss_at(net, data, trial);
      if (f <= cur.loss - opts.armijo_c * step * g2) {
        cur = evaluate(net, data, trial);
        accepted = true;
        break;
      }
      step *= opts.backtrack;
    }
    if (!accepted) {
      report.status = TrainStatus::Stalled;
      break;
    }
    ++iter;
    report.trace.push_back({iter, cur.loss, cur.gnorm});
    step *= opts.growth;
  }

  if (cur.gnorm <= opts.tol_g) {
    report.status = TrainStatus::Converged;
    // Push further toward an exact critical point while steps stay monotone.
    while (polish && cur.gnorm > opts.polish_target && report.newton_steps < opts.polish_iters &&
           newton_step(net, data, cur, mu)) {
      ++iter;
      ++report.newton_steps;
      report.trace.push_back({iter, cur.loss, cur.gnorm});
    }
  }
  report.iters = iter;
  report.final_loss = cur.loss;
  report.final_grad_norm = cur.gnorm;
  return {unflatten(net, cur.w), std::move(report)};
}

}  // namespace landscape
