#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "landscape/activation.hpp"

namespace landscape {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Fully connected regression network with a linear scalar output.
///
/// Layers are addressed 1..L as in the usual notation: layer 0 is the input,
/// layer L the output. weight(l) has shape dim(l) x dim(l-1).
class Network {
 public:
  Network() = default;

  /// Zero-initialised network with the given layer dimensions.
  Network(std::vector<int> dims, ActivationKind activation);

  /// Takes ownership of explicit parameters; validates every shape.
  Network(std::vector<int> dims, ActivationKind activation, std::vector<Matrix> weights,
          std::vector<Vector> biases);

  int num_layers() const { return static_cast<int>(dims_.size()) - 1; }
  int dim(int layer) const { return dims_.at(static_cast<std::size_t>(layer)); }
  const std::vector<int>& dims() const { return dims_; }
  ActivationKind activation() const { return activation_; }

  const Matrix& weight(int layer) const { return weights_.at(index(layer)); }
  Matrix& weight(int layer) { return weights_.at(index(layer)); }
  const Vector& bias(int layer) const { return biases_.at(index(layer)); }
  Vector& bias(int layer) { return biases_.at(index(layer)); }

  /// Sum over layers of dim(l) * (dim(l-1) + 1).
  std::size_t param_count() const;

  bool operator==(const Network& other) const;

 private:
  std::size_t index(int layer) const;
  void validate() const;

  std::vector<int> dims_;
  ActivationKind activation_ = ActivationKind::Sigmoid;
  std::vector<Matrix> weights_;
  std::vector<Vector> biases_;
};

/// Flat parameter vector. Layout: layer ascending, then neuron (row)
/// ascending, and within a neuron [bias, w_1, ..., w_{n_{l-1}}], so a
/// neuron's full incoming block is contiguous with the bias at offset 0.
using ParamVector = Vector;

class ParamLayout {
 public:
  explicit ParamLayout(const std::vector<int>& dims);
  explicit ParamLayout(const Network& net) : ParamLayout(net.dims()) {}

  std::size_t size() const { return total_; }

  /// Flat index of (layer, row, col); col 0 is the bias, col j >= 1 is the
  /// weight from neuron j-1 of layer-1.
  std::size_t index(int layer, int row, int col) const;

  struct Entry {
    int layer;
    int row;
    int col;
  };
  Entry entry(std::size_t flat) const;

 private:
  std::vector<int> dims_;
  std::vector<std::size_t> offsets_;
  std::size_t total_ = 0;
};

ParamVector flatten(const Network& net);
/// Rebuilds a network with the shape of `like` from a flat vector.
Network unflatten(const Network& like, const ParamVector& params);

/// Supervised regression data: inputs are stored column-wise (n_0 x N).
class Dataset {
 public:
  Dataset() = default;
  /// Requires N >= 1 and pairwise distinct input columns.
  Dataset(Matrix inputs, Vector targets);

  int size() const { return static_cast<int>(targets_.size()); }
  int input_dim() const { return static_cast<int>(inputs_.rows()); }
  const Matrix& inputs() const { return inputs_; }
  const Vector& targets() const { return targets_; }

 private:
  Matrix inputs_;
  Vector targets_;
};

/// Uniform box sampler for teacher inputs.
struct InputSampler {
  double lower = -3.0;
  double upper = 3.0;
};

/// Labels N sampled inputs with the teacher's outputs. Colliding inputs are
/// redrawn; SamplerError after a bounded number of retries.
Dataset generate_teacher_dataset(const Network& teacher, int n_samples, const InputSampler& sampler,
                                 std::uint64_t seed);

}  // namespace landscape
