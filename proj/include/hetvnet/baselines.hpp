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
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hetvnet/episode.hpp"
#include "hetvnet/marl/observation.hpp"
#include "hetvnet/marl/trainer.hpp"
#include "hetvnet/rng.hpp"

namespace hetvnet {

enum class PolicyKind { kMarl, kSarl, kRandom, kGreedy };

inline std::string_view to_string(PolicyKind p) {
  switch (p) {
    case PolicyKind::kMarl: return "marl";
    case PolicyKind::kSarl: return "sarl";
    case PolicyKind::kRandom: return "random";
    case PolicyKind::kGreedy: return "greedy";
  }
  return "?";
}

inline std::optional<PolicyKind> parse_policy(std::string_view s) {
  for (PolicyKind p : {PolicyKind::kMarl, PolicyKind::kSarl, PolicyKind::kRandom, PolicyKind::kGreedy}) {
    if (s == to_string(p)) return p;
  }
  return std::nullopt;
}

inline bool is_learning(PolicyKind p) { return p == PolicyKind::kMarl || p == PolicyKind::kSarl; }

/// Single shared network trained with agents acting one after another within
/// each slot; agent k observes the band claims of agents 0..k-1.
inline marl::TrainResult sarl_train(const marl::ScenarioGenerator& scenarios, std::shared_ptr<const EnvContext> ctx,
                                    int agents, const marl::TrainConfig& config, std::uint64_t seed) {
  return marl::train_agents(marl::Coordination::kSharedSequential, scenarios, std::move(ctx), agents, config, seed);
}

/// Uniform choice over a non-empty set of valid actions.
inline Action random_policy(std::span<const Action> valid, RngStream& rng) {
  if (valid.empty()) throw std::invalid_argument("no valid action to choose from");
  return valid[rng.index(valid.size())];
}

/// Every (available band, power) pair for an agent.
inline std::vector<Action> valid_actions(const marl::SensedCsi& csi, int powers) {
  std::vector<Action> out;
  for (std::size_t b = 0; b < csi.available.size(); ++b) {
    if (!csi.available[b]) continue;
    for (int p = 0; p < powers; ++p) out.push_back({static_cast<int>(b), p});
  }
  return out;
}

/// Own-rate estimate on every band at maximum power, from current own-link
/// gain and last slot's measured interference plus noise.
inline std::vector<double> estimated_rates(const marl::SensedCsi& csi, const EnvContext& ctx) {
  const double p = dbm_to_w(ctx.max_power_dbm());
  std::vector<double> rates(csi.gain_db.size(), 0.0);
  for (std::size_t b = 0; b < rates.size(); ++b) {
    const double g = std::pow(10.0, csi.gain_db[b] / 10.0);
    rates[b] = capacity(p * g / csi.interference_w[b], ctx.bands[b].bandwidth_hz);
  }
  return rates;
}

/// Myopic max-rate choice among available bands at maximum power. Ignores
/// what the choice does to anybody else.
inline Action greedy_policy(const marl::SensedCsi& csi, const EnvContext& ctx) {
  const std::vector<double> rates = estimated_rates(csi, ctx);
  int best = -1;
  for (std::size_t b = 0; b < rates.size(); ++b) {
    if (!csi.available[b]) continue;
    if (best < 0 || rates[b] > rates[static_cast<std::size_t>(best)]) best = static_cast<int>(b);
  }
  if (best < 0) best = 0;
  const auto& powers = ctx.episode.powers_dbm;
  const int power = static_cast<int>(std::max_element(powers.begin(), powers.end()) - powers.begin());
  return {best, power};
}

class RandomPolicy {
 public:
  explicit RandomPolicy(RngStream rng) : rng_(std::move(rng)) {}
  JointAction operator()(const World& world, const SlotOutcome* previous) {
    JointAction joint;
    for (int k = 0; k < world.agents(); ++k) {
      const auto valid = valid_actions(marl::sense(world, k, previous), world.ctx->power_count());
      joint.push_back(random_policy(valid, rng_));
    }
    return joint;
  }

 private:
  RngStream rng_;
};

struct GreedyPolicy {
  JointAction operator()(const World& world, const SlotOutcome* previous) const {
    JointAction joint;
    for (int k = 0; k < world.agents(); ++k) joint.push_back(greedy_policy(marl::sense(world, k, previous), *world.ctx));
    return joint;
  }
};

}  // namespace hetvnet
