#include "landscape/forward.hpp"

#include <string>

#include "landscape/errors.hpp"

namespace landscape {

namespace {

void apply_activation(ActivationKind kind, const Matrix& pre, Matrix& act) {
  act.resize(pre.rows(), pre.cols());
  for (Eigen::Index j = 0; j < pre.cols(); ++j) {
    for (Eigen::Index i = 0; i < pre.rows(); ++i) act(i, j) = act_value(kind, pre(i, j));
  }
}

void propagate(const Network& net, const Matrix& inputs, std::vector<Matrix>& pre, std::vector<Matrix>& act) {
  if (inputs.rows() != net.dim(0)) {
    throw ShapeError("input dimension " + std::to_string(inputs.rows()) + " does not match network input " +
                     std::to_string(net.dim(0)));
  }
  const int L = net.num_layers();
  pre.assign(static_cast<std::size_t>(L) + 1, Matrix());
  act.assign(static_cast<std::size_t>(L) + 1, Matrix());
  act[0] = inputs;
  for (int l = 1; l <= L; ++l) {
    pre[l] = net.weight(l) * act[l - 1];
    pre[l].colwise() += net.bias(l);
    if (l < L) {
      apply_activation(net.activation(), pre[l], act[l]);
    } else {
      act[l] = pre[l];
    }
  }
}

}  // namespace

ForwardCache forward(const Network& net, const Dataset& data) {
  ForwardCache cache;
  propagate(net, data.inputs(), cache.pre, cache.act);
  cache.output = cache.act.back().row(0).transpose();
  cache.residual = cache.output - data.targets();
  double total = 0.0;
  for (Eigen::Index a = 0; a < cache.residual.size(); ++a) total += cache.residual[a] * cache.residual[a];
  cache.loss = total;
  return cache;
}

Vector predict(const Network& net, const Matrix& inputs) {
  std::vector<Matrix> pre;
  std::vector<Matrix> act;
  propagate(net, inputs, pre, act);
  return act.back().row(0).transpose();
}

double loss(const Network& net, const Dataset& data) { return forward(net, data).loss; }

}  // namespace landscape
