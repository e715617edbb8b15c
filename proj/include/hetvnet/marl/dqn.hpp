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

#include <algorithm>
#include <span>
#include <stdexcept>
#include <vector>

#include "hetvnet/marl/qnetwork.hpp"
#include "hetvnet/rng.hpp"

namespace hetvnet::marl {

template <typename Scalar>
struct Transition {
  std::vector<Scalar> observation;
  int action = 0;
  Scalar reward = 0;
  std::vector<Scalar> next_observation;
  bool terminal = false;
};


/// Linear decay from `start` to `end` over `decay_episodes`, flat afterwards.
struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.02;
  int decay_episodes = 1200;

  double at(int episode) const {
    if (decay_episodes <= 0 || episode >= decay_episodes) return end;
    const double frac = static_cast<double>(std::max(episode, 0)) / decay_episodes;
    return start + (end - start) * frac;
  }
  bool operator==(const EpsilonSchedule&) const = default;
};

/// Epsilon-greedy choice over `q` (argmax ties go to the lowest index).
/// One uniform draw decides exploration; exploring draws a uniform index.
template <typename Derived>
int select_action(const Eigen::MatrixBase<Derived>& q, double epsilon, RngStream& rng) {
  if (epsilon < 0.0 || epsilon > 1.0) throw std::invalid_argument("epsilon outside [0, 1]");
  if (rng.uniform() < epsilon) return static_cast<int>(rng.index(static_cast<std::uint64_t>(q.size())));
  return argmax(q);
}

template <typename Scalar>
int select_action(const QNetwork<Scalar>& net, std::span<const Scalar> observation, double epsilon, RngStream& rng) {
  if (epsilon < 0.0 || epsilon > 1.0) throw std::invalid_argument("epsilon outside [0, 1]");
  if (rng.uniform() < epsilon) return static_cast<int>(rng.index(static_cast<std::uint64_t>(net.output_dim())));
  return argmax(net.forward(observation));
}

/// TD targets y = r + (terminal ? 0 : gamma * max_a Q_target(s', a)).
template <typename Scalar>
std::vector<Scalar> td_targets(const QNetwork<Scalar>& target, std::span<const Transition<Scalar>* const> batch,
                               Scalar gamma) {
  using Matrix = typename QNetwork<Scalar>::Matrix;
  const auto n = static_cast<Eigen::Index>(batch.size());
  Matrix next(target.input_dim(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& obs = batch[static_cast<std::size_t>(i)]->next_observation;
    if (static_cast<int>(obs.size()) != target.input_dim()) throw std::invalid_argument("observation dimension mismatch");
    next.col(i) = Eigen::Map<const typename QNetwork<Scalar>::Vector>(obs.data(), target.input_dim());
  }
  const Matrix q_next = target.forward_batch(next);
  std::vector<Scalar> y(batch.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const Transition<Scalar>& t = *batch[static_cast<std::size_t>(i)];
    y[static_cast<std::size_t>(i)] = t.reward + (t.terminal ? Scalar(0) : gamma * q_next.col(i).maxCoeff());
  }
  return y;
}

/// One gradient step on the mean squared TD error. Returns the pre-update loss.
template <typename Scalar>
Scalar train_step(QNetwork<Scalar>& net, const QNetwork<Scalar>& target, std::span<const Transition<Scalar>* const> batch,
                  Scalar gamma, Scalar learning_rate, Scalar clip_norm = Scalar(10)) {
  if (batch.empty()) throw std::invalid_argument("empty training batch");
  using Matrix = typename QNetwork<Scalar>::Matrix;
  const auto n = static_cast<Eigen::Index>(batch.size());
  Matrix states(net.input_dim(), n);
  std::vector<int> actions(batch.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const Transition<Scalar>& t = *batch[static_cast<std::size_t>(i)];
    if (static_cast<int>(t.observation.size()) != net.input_dim()) throw std::invalid_argument("observation dimension mismatch");
    states.col(i) = Eigen::Map<const typename QNetwork<Scalar>::Vector>(t.observation.data(), net.input_dim());
    actions[static_cast<std::size_t>(i)] = t.action;
  }
  const std::vector<Scalar> y = td_targets(target, batch, gamma);
  Gradients<Scalar> grad;
  const Scalar loss = td_loss_and_gradient<Scalar>(net, states, actions, y, grad);
  sgd_update(net, grad, learning_rate, clip_norm);
  return loss;
}

}  // namespace hetvnet::marl
