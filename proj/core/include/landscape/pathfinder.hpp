#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "landscape/network.hpp"

namespace landscape {

/// The widest usable layer l* (n_{l*} >= N, dims non-increasing after it)
/// and the rank facts the path construction needs.
struct WideLayerInfo {
  bool eligible = false;
  std::string reason;
  int wide_layer = -1;
  int activation_rank = 0;          ///< rank of a^{l*} (n_{l*} x N)
  bool activation_full_rank = false;
  std::vector<int> checked_layers;  ///< l > l* + 1
  std::vector<bool> weight_full_rank;
  /// Eligible and every rank condition holds.
  bool ready() const;
};

WideLayerInfo wide_layer_info(const Network& net, const Dataset& data);

/// Adds uniform noise of magnitude eps / sqrt(M) to every parameter until
/// a^{l*} has rank N and the downstream weights have full rank; 16 draws.
/// The unperturbed network is returned if it already qualifies.
/// RankError if the architecture is ineligible or every draw fails.
Network perturb_full_rank(const Network& net, const Dataset& data, double eps, std::uint64_t seed);

/// Weights w + (target(t) - (w a + w0)) Abar^{-1} on an N-row submatrix Abar
/// of `a_wide` chosen by pivoted QR; one matrix per target sample.
/// SingularError if cond(Abar) > 1e12.
std::vector<Matrix> realize_layer_path(const Matrix& a_wide, const Matrix& w, const Vector& w0,
                                       const std::vector<Matrix>& target_preacts);

struct InductiveStepPath {
  std::vector<Matrix> weights;      ///< lambda(t) w
  std::vector<Vector> biases;       ///< w0 - delta(t)
  std::vector<Matrix> activations;  ///< required previous-layer activations
  std::vector<double> scales;       ///< lambda(t) >= 1
  std::vector<int> pivot;           ///< columns of w forming W
};

/// Rescales the layer and shifts its bias so that the previous layer's
/// activations can follow any target pre-activation path while staying
/// inside the activation's image. ImageError if that fails.
InductiveStepPath inductive_layer_step(const Matrix& a_prev, const Matrix& w, const Vector& w0,
                                       const std::vector<Matrix>& target_preacts, ActivationKind kind);

struct DescentPath {
  int wide_layer = -1;
  std::vector<double> times;
  std::vector<ParamVector> params;
  std::vector<double> losses;
  Network start;                   ///< perturbed network at t = 0
  double max_increase = 0.0;       ///< largest loss(t_{k+1}) - loss(t_k)
  int violations = 0;              ///< increases beyond the slack
  double slack = 0.0;
  double final_loss = 0.0;
  double max_output_error = 0.0;   ///< vs. z + t (y - z)
  double min_weight_rank_ratio = 1.0;  ///< smallest sigma_min / sigma_max, layers > l* + 1
  bool certified = false;
};

/// Loss never increases (beyond 1e-9 (1 + loss_0)) along the grid and
/// ends at the global minimum. The grid doubles on a violation, up to 4096.
DescentPath monotone_descent_to_global(const Network& net, const Dataset& data, int steps = 256,
                                       double eps_perturb = 1e-4, std::uint64_t seed = 0);

}  // namespace landscape
