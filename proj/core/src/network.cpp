#include "landscape/network.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "landscape/errors.hpp"
#include "landscape/forward.hpp"

namespace landscape {

Network::Network(std::vector<int> dims, ActivationKind activation)
    : dims_(std::move(dims)), activation_(activation) {
  if (dims_.size() < 3) {
    throw ShapeError("network needs at least one hidden layer");
  }
  for (int l = 1; l < static_cast<int>(dims_.size()); ++l) {
    weights_.push_back(Matrix::Zero(dims_[l], dims_[l - 1]));
    biases_.push_back(Vector::Zero(dims_[l]));
  }
  validate();
}

Network::Network(std::vector<int> dims, ActivationKind activation, std::vector<Matrix> weights,
                 std::vector<Vector> biases)
    : dims_(std::move(dims)),
      activation_(activation),
      weights_(std::move(weights)),
      biases_(std::move(biases)) {
  validate();
}

std::size_t Network::index(int layer) const {
  if (layer < 1 || layer > num_layers()) {
    throw ShapeError("layer index " + std::to_string(layer) + " out of range");
  }
  return static_cast<std::size_t>(layer - 1);
}

void Network::validate() const {
  if (dims_.size() < 3) {
    throw ShapeError("network needs at least one hidden layer");
  }
  if (dims_.back() != 1) {
    throw ShapeError("output layer must have exactly one neuron");
  }
  for (int d : dims_) {
    if (d < 1) throw ShapeError("layer dimensions must be positive");
  }
  const auto layers = dims_.size() - 1;
  if (weights_.size() != layers || biases_.size() != layers) {
    throw ShapeError("parameter list length does not match dims");
  }
  for (std::size_t l = 1; l <= layers; ++l) {
    const Matrix& w = weights_[l - 1];
    if (w.rows() != dims_[l] || w.cols() != dims_[l - 1]) {
      throw ShapeError("weight matrix of layer " + std::to_string(l) + " has wrong shape");
    }
    if (biases_[l - 1].size() != dims_[l]) {
      throw ShapeError("bias vector of layer " + std::to_string(l) + " has wrong length");
    }
  }
}

std::size_t Network::param_count() const {
  std::size_t m = 0;
  for (std::size_t l = 1; l < dims_.size(); ++l) {
    m += static_cast<std::size_t>(dims_[l]) * static_cast<std::size_t>(dims_[l - 1] + 1);
  }
  return m;
}

bool Network::operator==(const Network& other) const {
  if (dims_ != other.dims_ || activation_ != other.activation_) return false;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i] != other.weights_[i] || biases_[i] != other.biases_[i]) return false;
  }
  return true;
}

ParamLayout::ParamLayout(const std::vector<int>& dims) : dims_(dims) {
  offsets_.assign(dims.size(), 0);
  for (std::size_t l = 1; l < dims.size(); ++l) {
    offsets_[l] = total_;
    total_ += static_cast<std::size_t>(dims[l]) * static_cast<std::size_t>(dims[l - 1] + 1);
  }
}

std::size_t ParamLayout::index(int layer, int row, int col) const {
  if (layer < 1 || layer >= static_cast<int>(dims_.size()) || row < 0 || row >= dims_[layer] ||
      col < 0 || col > dims_[layer - 1]) {
    throw ShapeError("parameter coordinate out of range");
  }
  return offsets_[layer] + static_cast<std::size_t>(row) * (dims_[layer - 1] + 1) + col;
}

ParamLayout::Entry ParamLayout::entry(std::size_t flat) const {
  if (flat >= total_) throw ShapeError("flat parameter index out of range");
  int layer = static_cast<int>(dims_.size()) - 1;
  while (offsets_[layer] > flat) --layer;
  const std::size_t local = flat - offsets_[layer];
  const std::size_t stride = dims_[layer - 1] + 1;
  return {layer, static_cast<int>(local / stride), static_cast<int>(local % stride)};
}

ParamVector flatten(const Network& net) {
  ParamVector out(static_cast<Eigen::Index>(net.param_count()));
  Eigen::Index k = 0;
  for (int l = 1; l <= net.num_layers(); ++l) {
    const Matrix& w = net.weight(l);
    const Vector& b = net.bias(l);
    for (Eigen::Index p = 0; p < w.rows(); ++p) {
      out[k++] = b[p];
      for (Eigen::Index i = 0; i < w.cols(); ++i) out[k++] = w(p, i);
    }
  }
  return out;
}

Network unflatten(const Network& like, const ParamVector& params) {
  if (params.size() != static_cast<Eigen::Index>(like.param_count())) {
    throw ShapeError("parameter vector length does not match network");
  }
  Network net = like;
  Eigen::Index k = 0;
  for (int l = 1; l <= net.num_layers(); ++l) {
    Matrix& w = net.weight(l);
    Vector& b = net.bias(l);
    for (Eigen::Index p = 0; p < w.rows(); ++p) {
      b[p] = params[k++];
      for (Eigen::Index i = 0; i < w.cols(); ++i) w(p, i) = params[k++];
    }
  }
  return net;
}

namespace {

bool has_duplicate_columns(const Matrix& inputs) {
  for (Eigen::Index a = 0; a < inputs.cols(); ++a) {
    for (Eigen::Index b = a + 1; b < inputs.cols(); ++b) {
      if (inputs.col(a) == inputs.col(b)) return true;
    }
  }
  return false;
}

}  // namespace

Dataset::Dataset(Matrix inputs, Vector targets) : inputs_(std::move(inputs)), targets_(std::move(targets)) {
  if (targets_.size() < 1) throw ShapeError("dataset must contain at least one sample");
  if (inputs_.cols() != targets_.size()) {
    throw ShapeError("number of inputs and targets differ");
  }
  if (inputs_.rows() < 1) throw ShapeError("inputs must have positive dimension");
  if (has_duplicate_columns(inputs_)) throw ShapeError("input patterns must be pairwise distinct");
}

Dataset generate_teacher_dataset(const Network& teacher, int n_samples, const InputSampler& sampler,
                                 std::uint64_t seed) {
  if (n_samples < 1) throw SamplerError("sample count must be positive");
  if (!(sampler.lower < sampler.upper)) throw SamplerError("sampler bounds must satisfy lower < upper");
  constexpr int kMaxRetries = 1000;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(sampler.lower, sampler.upper);
  const int n0 = teacher.dim(0);
  Matrix inputs(n0, n_samples);
  for (int a = 0; a < n_samples; ++a) {
    int attempt = 0;
    for (;; ++attempt) {
      if (attempt > kMaxRetries) {
        throw SamplerError("could not draw pairwise distinct inputs");
      }
      for (int i = 0; i < n0; ++i) inputs(i, a) = dist(rng);
      bool collides = false;
      for (int b = 0; b < a && !collides; ++b) collides = inputs.col(a) == inputs.col(b);
      if (!collides) break;
    }
  }
  Vector targets = predict(teacher, inputs);
  return Dataset(std::move(inputs), std::move(targets));
}

}  // namespace landscape
