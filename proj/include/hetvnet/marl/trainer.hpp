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

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hetvnet/episode.hpp"
#include "hetvnet/marl/dqn.hpp"
#include "hetvnet/marl/observation.hpp"
#include "hetvnet/marl/qnetwork.hpp"
#include "hetvnet/marl/replay_buffer.hpp"
#include "hetvnet/rng.hpp"
#include "hetvnet/topology.hpp"

namespace hetvnet::marl {

using Net = QNetwork<float>;

struct TrainConfig {
  double learning_rate = 1e-3;
  double gamma = 0.95;
  std::size_t replay_capacity = 50000;
  std::size_t batch_size = 64;
  int target_period = 200;  // in updates
  EpsilonSchedule epsilon;
  int episodes = 1500;
  int update_period = 2;  // in slots
  double grad_clip = 10.0;
  std::vector<int> hidden{256, 128};
  ObservationScale observation;
  bool operator==(const TrainConfig&) const = default;
};

inline void validate(const TrainConfig& c) {
  if (!(c.learning_rate > 0)) throw std::invalid_argument("learning rate must be positive");
  if (c.gamma < 0 || c.gamma > 1) throw std::invalid_argument("discount must lie in [0, 1]");
  if (c.replay_capacity == 0 || c.batch_size == 0) throw std::invalid_argument("replay capacity and batch size must be positive");
  if (c.target_period < 1 || c.update_period < 1) throw std::invalid_argument("periods must be positive");
  if (c.episodes < 0) throw std::invalid_argument("negative episode count");
  const auto in01 = [](double e) { return e >= 0 && e <= 1; };
  if (!in01(c.epsilon.start) || !in01(c.epsilon.end)) throw std::invalid_argument("epsilon outside [0, 1]");
  for (int h : c.hidden) {
    if (h < 1) throw std::invalid_argument("hidden width must be positive");
  }
}

/// How agents share learners within a slot.
enum class Coordination {
  kIndependent,       // one private learner per agent, simultaneous actions
  kSharedSequential,  // one shared learner, agents act in id order and see earlier claims
};

struct EpisodeTrace {
  int episode = 0;
  double epsilon = 0.0;
  double cumulative_reward = 0.0;
  int successes = 0;
  int slots = 0;
  bool operator==(const EpisodeTrace&) const = default;
};

struct TrainResult {
  std::vector<Net> networks;
  std::vector<EpisodeTrace> trace;
};

using ScenarioGenerator = std::function<Scenario(int episode)>;

inline int claims_block_size(Coordination mode, int bands, int agents) {
  // With a single agent nobody claims before it, so the block is omitted.
  return mode == Coordination::kSharedSequential && agents > 1 ? bands : 0;
}

inline std::vector<int> network_dims(const EnvContext& ctx, int agents, const TrainConfig& config, Coordination mode) {
  std::vector<int> dims{observation_dim(ctx.band_count(), agents, claims_block_size(mode, ctx.band_count(), agents))};
  dims.insert(dims.end(), config.hidden.begin(), config.hidden.end());
  dims.push_back(ctx.action_count());
  return dims;
}

namespace detail {

struct Learner {
  Net online;
  Net target;
  ReplayBuffer<Transition<float>> buffer;
  RngStream replay;
  long updates = 0;
};

}  // namespace detail

/// Builds every agent's observation for the current slot and picks actions.
/// Independent mode: each agent sees only its own sensing. Shared mode:
/// agent k additionally sees per-band counts of the claims of agents < k.
template <typename Chooser>
JointAction act_all(const World& world, const SlotOutcome* previous, Coordination mode, const ObservationScale& scale,
                    std::vector<std::vector<float>>& observations, Chooser&& choose) {
  const int agents = world.agents();
  const int bands = world.ctx->band_count();
  const int powers = world.ctx->power_count();
  const int block = claims_block_size(mode, bands, agents);
  observations.resize(static_cast<std::size_t>(agents));
  std::vector<int> claims(static_cast<std::size_t>(block), 0);
  JointAction joint(static_cast<std::size_t>(agents));
  for (int k = 0; k < agents; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    observations[ku] = observe<float>(world, k, previous, scale, claims);
    const int a = choose(k, std::span<const float>(observations[ku]));
    joint[ku] = action_from_index(a, powers);
    if (block > 0) ++claims[static_cast<std::size_t>(joint[ku].band)];
  }
  return joint;
}

/// Synchronous slot loop: all agents observe and act, the environment steps,
/// the common reward is stored by every agent, and every `update_period`
/// slots each agent performs one gradient step before the next slot begins.
inline TrainResult train_agents(Coordination mode, const ScenarioGenerator& scenarios,
                                std::shared_ptr<const EnvContext> ctx, int agents, const TrainConfig& config,
                                std::uint64_t seed) {
  validate(config);
  if (agents < 1) throw std::invalid_argument("need at least one agent");
  const std::vector<int> dims = network_dims(*ctx, agents, config, mode);
  const int learners = mode == Coordination::kIndependent ? agents : 1;
  std::vector<detail::Learner> pool;
  pool.reserve(static_cast<std::size_t>(learners));
  for (int l = 0; l < learners; ++l) {
    RngStream init = RngStream::derive(seed, StreamPurpose::kInit, {static_cast<std::uint64_t>(l)});
    Net net = Net::glorot(dims, init);
    pool.push_back({net, net, ReplayBuffer<Transition<float>>(config.replay_capacity),
                    RngStream::derive(seed, StreamPurpose::kReplay, {static_cast<std::uint64_t>(l)}), 0});
  }
  std::vector<RngStream> explore;
  for (int k = 0; k < agents; ++k) {
    explore.push_back(RngStream::derive(seed, StreamPurpose::kExploration, {static_cast<std::uint64_t>(k)}));
  }
  auto learner_of = [&](int k) -> detail::Learner& {
    return pool[static_cast<std::size_t>(mode == Coordination::kIndependent ? k : 0)];
  };

  const auto gamma = static_cast<float>(config.gamma);
  const auto lr = static_cast<float>(config.learning_rate);
  const auto clip = static_cast<float>(config.grad_clip);
  const int block = claims_block_size(mode, ctx->band_count(), agents);
  const std::vector<int> no_claims(static_cast<std::size_t>(block), 0);

  TrainResult result;
  long slot_counter = 0;
  std::vector<std::vector<float>> obs;
  for (int ep = 0; ep < config.episodes; ++ep) {
    const double epsilon = config.epsilon.at(ep);
    const Scenario scenario = scenarios(ep);
    if (scenario.agents() != agents) throw std::invalid_argument("scenario agent count differs from trainer");
    EpisodeStreams streams = EpisodeStreams::derive(seed, StreamPurpose::kTrainEpisode, static_cast<std::uint64_t>(ep));
    World world = make_world(scenario, ctx, streams);
    EpisodeTrace trace{ep, epsilon, 0.0, 0, 0};
    std::optional<SlotOutcome> prev;

    while (!world.finished()) {
      const JointAction joint =
          act_all(world, prev ? &*prev : nullptr, mode, config.observation, obs, [&](int k, std::span<const float> o) {
            return select_action(learner_of(k).online, o, epsilon, explore[static_cast<std::size_t>(k)]);
          });
      auto [outcome, next] = step(world, joint, streams);

      for (int k = 0; k < agents; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        Transition<float> t;
        t.observation = std::move(obs[ku]);
        t.action = action_index(joint[ku], ctx->power_count());
        t.reward = static_cast<float>(outcome.reward[ku]);
        t.next_observation = observe<float>(next, k, &outcome, config.observation, no_claims);
        t.terminal = outcome.terminal;
        learner_of(k).buffer.push(std::move(t));
      }

      if (++slot_counter % config.update_period == 0) {
        // Barrier: every agent finishes its update before the next slot.
        for (int k = 0; k < agents; ++k) {
          detail::Learner& L = learner_of(k);
          if (L.buffer.size() < config.batch_size) continue;
          const auto batch = L.buffer.sample(config.batch_size, L.replay);
          train_step<float>(L.online, L.target, batch, gamma, lr, clip);
          if (++L.updates % config.target_period == 0) L.target = L.online;
        }
      }

      trace.cumulative_reward += outcome.reward.front();
      trace.slots = outcome.slot + 1;
      prev = std::move(outcome);
      world = std::move(next);
    }
    for (const PayloadTask& task : world.tasks) trace.successes += task.delivered() ? 1 : 0;
    result.trace.push_back(trace);
  }
  for (auto& L : pool) result.networks.push_back(std::move(L.online));
  return result;
}

/// Independent-learner MARL training.
inline TrainResult train(const ScenarioGenerator& scenarios, std::shared_ptr<const EnvContext> ctx, int agents,
                         const TrainConfig& config, std::uint64_t seed) {
  return train_agents(Coordination::kIndependent, scenarios, std::move(ctx), agents, config, seed);
}

/// Deployed policy backed by trained networks, acting greedily.
class QPolicy {
 public:
  QPolicy(std::vector<Net> networks, Coordination mode, ObservationScale scale)
      : nets_(std::move(networks)), mode_(mode), scale_(scale) {}

  JointAction operator()(const World& world, const SlotOutcome* previous) {
    if (mode_ == Coordination::kIndependent && static_cast<int>(nets_.size()) != world.agents()) {
      throw std::invalid_argument("policy has a network count different from the agent count");
    }
    return act_all(world, previous, mode_, scale_, obs_, [&](int k, std::span<const float> o) {
      const Net& net = nets_[mode_ == Coordination::kIndependent ? static_cast<std::size_t>(k) : 0];
      return argmax(net.forward(o));
    });
  }

  const std::vector<Net>& networks() const { return nets_; }

 private:
  std::vector<Net> nets_;
  Coordination mode_;
  ObservationScale scale_;
  std::vector<std::vector<float>> obs_;
};

}  // namespace hetvnet::marl
