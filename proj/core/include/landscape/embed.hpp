#pragma once

#include <string>
#include <vector>

#include "landscape/diff.hpp"
#include "landscape/network.hpp"

namespace landscape {

/// One neuron-splitting step: duplicate neuron `source` of hidden layer
/// `layer` and split its outgoing weights lambda : (1 - lambda) between the
/// copy and the original. The copy is appended as the last neuron of the
/// layer. Layers are 1-based (hidden layers 1..L-1), neurons 0-based.
struct EmbeddingPlan {
  int layer = 1;
  int source = 0;
  double lambda = 0.5;
};

/// Index the duplicated neuron receives in the embedded network.
int inserted_index(const Network& net, const EmbeddingPlan& plan);

/// Throws PlanError unless `plan` addresses a hidden neuron of `net`.
void validate_plan(const Network& net, const EmbeddingPlan& plan);

/// The embedding map. The embedded network computes the same function.
Network gamma_embed(const Network& net, const EmbeddingPlan& plan);

struct BdOptions {
  /// Treat the bias as coordinate 0 of the previous layer's activation.
  bool include_bias = true;
  /// Collapse previous-layer neurons with identical activations on the data
  /// into one coordinate. B restricted to the remaining coordinates decides
  /// definiteness modulo the reparameterisations between duplicates.
  bool merge_duplicate_inputs = false;
};

/// Second-order coefficient matrix B and first-order coupling matrix D for
/// neuron `source` of hidden layer `layer`.
struct BDMatrices {
  int layer = 0;
  int source = 0;
  Matrix B;        ///< coords x coords, symmetric
  Matrix D;        ///< coords x dim(layer + 1)
  Vector b_eigenvalues;  ///< ascending
  double d_norm = 0.0;   ///< max |D_is|
  double sensitivity_scale = 0.0;  ///< max |d l_a / d n^{layer+1}|
  bool include_bias = true;
  /// Previous-layer neurons represented by each non-bias coordinate.
  std::vector<std::vector<int>> groups;
};

BDMatrices compute_bd(const Network& net, const Dataset& data, int layer, int source,
                      const BdOptions& options = {});
Matrix compute_B(const Network& net, const Dataset& data, int layer, int source,
                 const BdOptions& options = {});
Matrix compute_D(const Network& net, const Dataset& data, int layer, int source,
                 const BdOptions& options = {});

struct EmbeddingTolerances {
  double eig = 1e-7;
  double d = 1e-7;
};

/// tol_eig = 1e-7 max(1, |B|_inf), tol_D = 1e-7 (1 + max sensitivity).
EmbeddingTolerances default_tolerances(const BDMatrices& bd);

enum class EmbeddingVerdictTag { MinCandidateInside, MinCandidateOutside, Saddle, Inconclusive };

struct EmbeddingVerdict {
  EmbeddingVerdictTag tag = EmbeddingVerdictTag::Inconclusive;
  Vector b_eigenvalues;
  double d_norm = 0.0;
  double lambda = 0.0;
  EmbeddingTolerances tolerances;
  std::string reason;
};

std::string to_string(EmbeddingVerdictTag tag);

EmbeddingVerdict classify_embedding(const BDMatrices& bd, double lambda, const EmbeddingTolerances& tol);
EmbeddingVerdict classify_embedding(const BDMatrices& bd, double lambda);

/// Split parameters with lambda = beta / (alpha + beta).
struct SplitCoefficients {
  double alpha;
  double beta;
};

/// (1 - lambda, lambda): alpha + beta = 1.
SplitCoefficients default_split(double lambda);

/// Basis of the embedded network's parameter space in which the Hessian at
/// an embedded critical point is block structured. Column blocks, in order:
/// mu_minus (u_new + u_r), nu_minus (v_new + v_r), the untouched parameters,
/// mu_plus (alpha u_new - beta u_r), nu_plus (v_new - v_r).
/// basis.col(k) is the k-th basis vector in raw coordinates, so the Hessian
/// in this basis is basis^T H basis.
struct TransformedBasis {
  double alpha = 0.5;
  double beta = 0.5;
  double lambda = 0.5;
  Matrix basis;
  int incoming = 0;   ///< size of the mu blocks (dim(layer-1) + 1)
  int outgoing = 0;   ///< size of the nu blocks (dim(layer+1))
  int untouched = 0;  ///< size of the remaining block
};

TransformedBasis transformed_basis(const Network& net_small, const EmbeddingPlan& plan, SplitCoefficients split);

/// Hessian of the embedded loss in the transformed basis, assembled from a
/// finite-difference Hessian of the smaller network and the B and D
/// matrices. Throws NotCriticalError if the smaller network's gradient
/// exceeds `tol_g`.
Matrix transformed_hessian(const Network& net_small, const Dataset& data, const EmbeddingPlan& plan,
                           SplitCoefficients split, double tol_g = 1e-6);

/// Unit-norm raw-coordinate direction in the embedded network along
/// mu_plus = alpha u_new - beta u_r, aligned with the eigenvector of B with the
/// most negative effective curvature alpha*beta*eig. `bd` must describe the
/// source neuron of the smaller network. NoNegativeCurvature if none exists.
ParamVector escape_direction(const Network& net_embedded, const EmbeddingPlan& plan, const BDMatrices& bd);

}  // namespace landscape
