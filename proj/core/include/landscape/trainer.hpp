#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "landscape/network.hpp"

namespace landscape {

struct TrainOptions {
  int max_iters = 200000;
  double initial_step = 0.1;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  /// Accepted steps grow the next trial step by this factor.
  double growth = 2.0;
  double min_step = 1e-20;
  double tol_g = 1e-8;
  /// Stalled after this many iterations without a strict loss decrease.
  int stall_iters = 2000;
  std::uint64_t seed = 0;
  /// Newton polish with a finite-difference Hessian (eigenvalues taken in
  /// absolute value) once gradient descent
  /// reaches `polish_start`, for networks up to `polish_max_params`.
  bool newton_polish = true;
  double polish_start = 1e-2;
  std::size_t polish_max_params = 64;
  int polish_iters = 200;
  /// Polish keeps going until this gradient level, below tol_g.
  double polish_target = 1e-11;
};

enum class TrainStatus { Converged, MaxIters, Stalled };

std::string to_string(TrainStatus status);

struct TraceRow {
  int iter = 0;
  double loss = 0.0;
  double grad_norm = 0.0;
};

struct TrainReport {
  TrainStatus status = TrainStatus::MaxIters;
  double final_loss = 0.0;
  double final_grad_norm = 0.0;
  int iters = 0;
  int newton_steps = 0;
  std::vector<TraceRow> trace;  ///< accepted iterates only
};

struct TrainResult {
  Network net;
  TrainReport report;
};

/// Weights and biases i.i.d. uniform on [-scale, scale].
Network init_random(const std::vector<int>& dims, ActivationKind activation, double scale, std::uint64_t seed);

/// Full-batch gradient descent with Armijo backtracking, optionally finished
/// by damped Newton steps. Every accepted step is non-increasing in loss.
/// Diverged if the loss becomes non-finite.
TrainResult train_to_critical(const Network& net, const Dataset& data, const TrainOptions& opts = {});

bool is_critical(const Network& net, const Dataset& data, double tol);

}  // namespace landscape
