// Copyright 2026 The HetVNET Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hetvnet/rng.hpp"

namespace hetvnet::marl {

/// Feed-forward action-value approximator: rectifier hidden layers, linear
/// output. Layer l maps dims[l] -> dims[l+1] through W_l (dims[l+1] x dims[l]).
template <typename Scalar>
class QNetwork {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  QNetwork() = default;

  /// Zero-initialized network.
  explicit QNetwork(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.size() < 2) throw std::invalid_argument("network needs at least an input and an output layer");
    for (int d : dims_) {
      if (d < 1) throw std::invalid_argument("layer width must be positive");
    }
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
      weights_.push_back(Matrix::Zero(dims_[l + 1], dims_[l]));
      biases_.push_back(Vector::Zero(dims_[l + 1]));
    }
  }

  /// Uniform(-b, b) weights with b = sqrt(6 / (fan_in + fan_out)), zero biases.
  /// Draw order is row-major within each layer.
  static QNetwork glorot(std::vector<int> dims, RngStream& rng) {
    QNetwork net(std::move(dims));
    for (auto& w : net.weights_) {
      const double bound = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
      for (Eigen::Index r = 0; r < w.rows(); ++r) {
        for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = static_cast<Scalar>(rng.uniform(-bound, bound));
      }
    }
    return net;
  }

  const std::vector<int>& dims() const { return dims_; }
  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }
  std::size_t layers() const { return weights_.size(); }

  Matrix& weight(std::size_t l) { return weights_[l]; }
  const Matrix& weight(std::size_t l) const { return weights_[l]; }
  Vector& bias(std::size_t l) { return biases_[l]; }
  const Vector& bias(std::size_t l) const { return biases_[l]; }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < layers(); ++l) n += static_cast<std::size_t>(weights_[l].size() + biases_[l].size());
    return n;
  }

  /// Forward pass over a batch laid out one sample per column.
  Matrix forward_batch(const Matrix& inputs) const {
    if (inputs.rows() != input_dim()) throw std::invalid_argument("observation dimension mismatch");
    Matrix a = inputs;
    for (std::size_t l = 0; l < layers(); ++l) {
      Matrix z = weights_[l] * a;
      z.colwise() += biases_[l];
      if (l + 1 < layers()) z = z.cwiseMax(Scalar(0));
      a = std::move(z);
    }
    return a;
  }

  Vector forward(std::span<const Scalar> observation) const {
    if (static_cast<int>(observation.size()) != input_dim()) {
      throw std::invalid_argument("observation has dimension " + std::to_string(observation.size()) +
                                  ", network expects " + std::to_string(input_dim()));
    }
    Vector a = Eigen::Map<const Vector>(observation.data(), input_dim());
    for (std::size_t l = 0; l < layers(); ++l) {
      Vector z = weights_[l] * a + biases_[l];
      if (l + 1 < layers()) z = z.cwiseMax(Scalar(0));
      a = std::move(z);
    }
    return a;
  }

  bool all_finite() const {
    for (std::size_t l = 0; l < layers(); ++l) {
      if (!weights_[l].allFinite() || !biases_[l].allFinite()) return false;
    }
    return true;
  }

  bool operator==(const QNetwork& other) const {
    if (dims_ != other.dims_) return false;
    for (std::size_t l = 0; l < layers(); ++l) {
      if (weights_[l] != other.weights_[l] || biases_[l] != other.biases_[l]) return false;
    }
    return true;
  }

 private:
  std::vector<int> dims_;
  std::vector<Matrix> weights_;
  std::vector<Vector> biases_;
};

template <typename Scalar>
struct Gradients {
  std::vector<typename QNetwork<Scalar>::Matrix> weights;
  std::vector<typename QNetwork<Scalar>::Vector> biases;

  Scalar norm() const {
    Scalar s = 0;
    for (const auto& w : weights) s += w.squaredNorm();
    for (const auto& b : biases) s += b.squaredNorm();
    return std::sqrt(s);
  }
};

/// Mean squared TD error over a batch, where only the taken action's output
/// enters each sample's error: L = (1/B) sum_i (Q(s_i, a_i) - y_i)^2.
/// Fills `grad` with dL/dtheta by backpropagation and returns L.
template <typename Scalar>
Scalar td_loss_and_gradient(const QNetwork<Scalar>& net, const typename QNetwork<Scalar>::Matrix& states,
                            std::span<const int> actions, std::span<const Scalar> targets, Gradients<Scalar>& grad) {
  using Matrix = typename QNetwork<Scalar>::Matrix;
  const Eigen::Index batch = states.cols();
  if (batch == 0) throw std::invalid_argument("empty batch");
  if (static_cast<Eigen::Index>(actions.size()) != batch || static_cast<Eigen::Index>(targets.size()) != batch) {
    throw std::invalid_argument("batch component sizes disagree");
  }
  const std::size_t L = net.layers();

  std::vector<Matrix> act;  // act[0] = input, act[l+1] = output of layer l
  act.reserve(L + 1);
  act.push_back(states);
  for (std::size_t l = 0; l < L; ++l) {
    Matrix z = net.weight(l) * act.back();
    z.colwise() += net.bias(l);
    if (l + 1 < L) z = z.cwiseMax(Scalar(0));
    act.push_back(std::move(z));
  }

  const Matrix& q = act.back();
  Matrix delta = Matrix::Zero(q.rows(), batch);
  Scalar loss = 0;
  const Scalar inv_b = Scalar(1) / static_cast<Scalar>(batch);
  for (Eigen::Index i = 0; i < batch; ++i) {
    const int a = actions[static_cast<std::size_t>(i)];
    if (a < 0 || a >= q.rows()) throw std::invalid_argument("action index out of range");
    const Scalar err = q(a, i) - targets[static_cast<std::size_t>(i)];
    loss += err * err;
    delta(a, i) = Scalar(2) * err * inv_b;
  }
  loss *= inv_b;

  grad.weights.resize(L);
  grad.biases.resize(L);
  for (std::size_t l = L; l-- > 0;) {
    grad.weights[l].noalias() = delta * act[l].transpose();
    grad.biases[l] = delta.rowwise().sum();
    if (l > 0) {
      Matrix back = net.weight(l).transpose() * delta;
      delta = back.cwiseProduct((act[l].array() > Scalar(0)).template cast<Scalar>().matrix());
    }
  }
  return loss;
}

/// theta -= lr * g, with g rescaled to at most `clip_norm` in global L2 norm.
template <typename Scalar>
void sgd_update(QNetwork<Scalar>& net, const Gradients<Scalar>& grad, Scalar learning_rate, Scalar clip_norm) {
  Scalar scale = learning_rate;
  if (clip_norm > 0) {
    const Scalar n = grad.norm();
    if (n > clip_norm) scale *= clip_norm / n;
  }
  for (std::size_t l = 0; l < net.layers(); ++l) {
    net.weight(l) -= scale * grad.weights[l];
    net.bias(l) -= scale * grad.biases[l];
  }
}

/// Index of the largest entry; the lowest index wins ties.
template <typename Derived>
int argmax(const Eigen::MatrixBase<Derived>& values) {
  int best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values(i) > values(best)) best = static_cast<int>(i);
  }
  return best;
}


}  // namespace hetvnet::marl
