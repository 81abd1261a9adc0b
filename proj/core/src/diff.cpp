#include "landscape/diff.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "landscape/errors.hpp"

namespace landscape {

SensitivityTensor neuron_sensitivities(const Network& net, const ForwardCache& cache) {
  const int L = net.num_layers();
  SensitivityTensor s;
  s.layers.assign(static_cast<std::size_t>(L) + 1, Matrix());
  s.layers[L] = 2.0 * cache.residual.transpose();
  for (int l = L - 1; l >= 1; --l) {
    Matrix back = net.weight(l + 1).transpose() * s.layers[l + 1];
    const Matrix& pre = cache.pre[l];
    for (Eigen::Index j = 0; j < back.cols(); ++j) {
      for (Eigen::Index i = 0; i < back.rows(); ++i) back(i, j) *= act_eval(net.activation(), pre(i, j)).d1;
    }
    s.layers[l] = std::move(back);
  }
  return s;
}

SensitivityTensor neuron_sensitivities(const Network& net, const Dataset& data) {
  return neuron_sensitivities(net, forward(net, data));
}

ParamVector gradient(const Network& net, const Dataset& data) {
  const ForwardCache cache = forward(net, data);
  const SensitivityTensor sens = neuron_sensitivities(net, cache);
  ParamVector g(static_cast<Eigen::Index>(net.param_count()));
  Eigen::Index k = 0;
  for (int l = 1; l <= net.num_layers(); ++l) {
    const Matrix gw = sens.layers[l] * cache.act[l - 1].transpose();
    const Vector gb = sens.layers[l].rowwise().sum();
    for (Eigen::Index p = 0; p < gw.rows(); ++p) {
      g[k++] = gb[p];
      for (Eigen::Index i = 0; i < gw.cols(); ++i) g[k++] = gw(p, i);
    }
  }
  return g;
}

double max_abs(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

ParamVector gradient_fd(const Network& net, const Dataset& data, double h) {
  ParamVector w = flatten(net);
  ParamVector g(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double orig = w[i];
    w[i] = orig + h;
    const double up = loss(unflatten(net, w), data);
    w[i] = orig - h;
    const double down = loss(unflatten(net, w), data);
    w[i] = orig;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

FdHessian hessian_fd(const GradientFn& grad, const Vector& point, double h) {
  if (!(h > 0.0)) throw DomainError("hessian_fd: step must be positive");
  const auto m = static_cast<std::size_t>(point.size());
  if (m > kDenseHessianLimit) {
    throw SizeError("hessian_fd: " + std::to_string(m) + " parameters exceed dense limit");
  }
  Matrix raw(point.size(), point.size());
  Vector w = point;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double orig = w[i];
    w[i] = orig + h;
    const Vector up = grad(w);
    w[i] = orig - h;
    const Vector down = grad(w);
    w[i] = orig;
    raw.col(i) = (up - down) / (2.0 * h);
  }
  FdHessian out;
  out.asymmetry = max_abs(Matrix(raw - raw.transpose()));
  out.hessian = 0.5 * (raw + raw.transpose());
  return out;
}

FdHessian hessian_fd(const Network& net, const Dataset& data, double h) {
  if (net.param_count() > kDenseHessianLimit) {
    throw SizeError("hessian_fd: network has too many parameters for a dense Hessian");
  }
  const GradientFn grad = [&](const Vector& w) { return gradient(unflatten(net, w), data); };
  return hessian_fd(grad, flatten(net), h);
}

EigenDecomposition hessian_eigs(const Matrix& h, bool with_vectors) {
  if (h.rows() != h.cols()) throw ShapeError("hessian_eigs: matrix must be square");
  const Matrix sym = 0.5 * (h + h.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, with_vectors ? Eigen::ComputeEigenvectors
                                                                 : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw ConvergenceError("symmetric eigensolver did not converge");
  EigenDecomposition out;
  out.values = solver.eigenvalues();
  if (with_vectors) out.vectors = solver.eigenvectors();
  return out;
}

double eig_tolerance(const Matrix& h) { return 1e-7 * std::max(1.0, max_abs(h)); }

}  // namespace landscape
