#pragma once

#include <vector>

#include "landscape/network.hpp"

namespace landscape {

/// Per-layer pre-activations and activations for every sample.
///
/// pre[l] and act[l] have shape dim(l) x N for l = 1..L; act[0] holds the
/// inputs and pre[0] is empty. The output layer is linear, so act[L] == pre[L].
struct ForwardCache {
  std::vector<Matrix> pre;
  std::vector<Matrix> act;
  Vector output;
  Vector residual;  ///< output - targets
  double loss = 0.0;
};

ForwardCache forward(const Network& net, const Dataset& data);

/// Network outputs on arbitrary input columns.
Vector predict(const Network& net, const Matrix& inputs);

/// Squared loss sum_a (f(x_a) - y_a)^2, without the 1/2 factor.
double loss(const Network& net, const Dataset& data);

}  // namespace landscape
