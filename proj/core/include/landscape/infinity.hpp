#pragma once

#include <cstdint>
#include <vector>

#include "landscape/forward.hpp"
#include "landscape/network.hpp"

namespace landscape {

/// Best constant predictor: c = mean target, loss = sum (c - y)^2.
struct ConstantFit {
  double c = 0.0;
  double loss = 0.0;
};

ConstantFit constant_fit(const Dataset& data);

/// phi(u) = sum_a d_a exp(-rate * u . a_a) over the columns of `a`.
/// rate is 1 for sigmoid and 2 for tanh, the decay rate of d - sigma(t).
double phi(const Matrix& a, const Vector& d, const Vector& u, double rate = 1.0);
double saturation_rate(ActivationKind kind);

struct SignProbe {
  int coordinate = -1;
  double magnitude = 0.0;
  Vector u_pos;  ///< phi(u_pos) > 0
  Vector u_neg;  ///< phi(u_neg) < 0
  double phi_pos = 0.0;
  double phi_neg = 0.0;
};

/// Single-coordinate vectors +-t e_r with phi of opposite signs, using the
/// activations feeding the last hidden layer. DegenerateData if every
/// |sum_a d_a a_a^r| is below 1e-8 |d| |a^r|.
SignProbe sign_probe_vectors(const ForwardCache& cache, const Dataset& data);

/// Last hidden layer pushed to saturation: bias -ln p on every neuron,
/// output weights summing to c with signs opposite to phi of each row.
struct InfinityFamily {
  Network network;  ///< biases of layer L-1 are placeholders, see at()
  ConstantFit fit;
  Vector v;         ///< output weights
  Vector phis;      ///< phi of each last-hidden row
  int row_pos = 0;
  int row_neg = 1;
  bool flipped = false;
  SignProbe probe;

  /// Network with p_i = p for every row, i.e. bias -ln p.
  Network at(double p) const;
  Network at(double p, const Vector& v_out) const;
};

/// `flipped` builds the control family whose output weights carry the
/// wrong signs. InfeasibleSigns if no pair of rows can carry both signs.
InfinityFamily build_infinity_family(const Network& base, const Dataset& data, bool flipped = false);

/// Loss at p minus the constant-fit loss, computed without cancellation.
double loss_excess(const InfinityFamily& family, const Dataset& data, double p, const Vector& v_out);

/// 24 log-spaced points in [1e-8, 1e-2].
std::vector<double> default_p_grid();

struct InfinityReport {
  double lc = 0.0;
  std::vector<double> p_grid;
  std::vector<double> margin;  ///< min over the v ball of loss - L_c
  double min_margin = 0.0;
  bool positive_small_p = false;  ///< margin > 0 for every p <= 1e-4
  bool monotone_tail = false;     ///< non-decreasing over the 8 smallest p
  bool pass = false;
  double limit_gap = 0.0;         ///< |loss(1e-12) - L_c|
};

InfinityReport verify_infinity_minimum(const InfinityFamily& family, const Dataset& data,
                                       const std::vector<double>& p_grid, int ball_samples, std::uint64_t seed,
                                       double ball_radius = 1e-3);

}  // namespace landscape
