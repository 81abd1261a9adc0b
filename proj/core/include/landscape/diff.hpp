#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "landscape/forward.hpp"
#include "landscape/network.hpp"

namespace landscape {

/// d l_a / d n^{l,k}(x_a) for every layer l = 1..L (entry 0 is empty),
/// each of shape dim(l) x N. The output layer holds 2 (f(x_a) - y_a).
struct SensitivityTensor {
  std::vector<Matrix> layers;
};

/// Central-difference steps used by the oracles.
inline constexpr double kGradientFdStep = 1e-6;
inline constexpr double kHessianFdStep = 1e-5;
/// Largest parameter count for which a dense Hessian is formed.
inline constexpr std::size_t kDenseHessianLimit = 5000;

SensitivityTensor neuron_sensitivities(const Network& net, const Dataset& data);
SensitivityTensor neuron_sensitivities(const Network& net, const ForwardCache& cache);

/// Exact gradient of the squared loss, in ParamLayout order.
ParamVector gradient(const Network& net, const Dataset& data);

double max_abs(const Vector& v);
/// Largest absolute entry of a matrix; the matrix "inf-norm" used for all
/// tolerances in this library.
double max_abs(const Matrix& m);

/// Central-difference gradient of the loss.
ParamVector gradient_fd(const Network& net, const Dataset& data, double h = kGradientFdStep);

struct FdHessian {
  Matrix hessian;          ///< symmetrised (H + H^T) / 2
  double asymmetry = 0.0;  ///< max |H - H^T| before symmetrisation
};

using GradientFn = std::function<Vector(const Vector&)>;

/// Central differences of an analytic gradient at `point`.
FdHessian hessian_fd(const GradientFn& grad, const Vector& point, double h = kHessianFdStep);
FdHessian hessian_fd(const Network& net, const Dataset& data, double h = kHessianFdStep);

struct EigenDecomposition {
  Vector values;   ///< ascending
  Matrix vectors;  ///< columns, orthonormal; empty unless requested
};

/// Spectrum of the symmetric part of `h`. ConvergenceError if the solver fails.
EigenDecomposition hessian_eigs(const Matrix& h, bool with_vectors = false);

/// Scale-aware cutoff for semidefiniteness verdicts: 1e-7 * max(1, |H|_inf).
double eig_tolerance(const Matrix& h);

}  // namespace landscape
