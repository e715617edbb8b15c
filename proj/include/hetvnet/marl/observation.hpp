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
#include <span>
#include <stdexcept>
#include <vector>

#include "hetvnet/channel.hpp"
#include "hetvnet/episode.hpp"

namespace hetvnet::marl {

/// Fixed affine maps from dB / dBm ranges onto [0, 1].
struct ObservationScale {
  double gain_min_db = -120.0;
  double gain_max_db = -40.0;
  double interference_min_dbm = -120.0;
  double interference_max_dbm = -30.0;
  bool operator==(const ObservationScale&) const = default;
};

/// What one agent's OBU knows at the start of a slot: its own-link gain on
/// every band (current CSI), the interference-plus-noise it measured on every
/// band during the previous slot, and band availability.
struct SensedCsi {
  int agent = 0;
  int agents = 1;
  std::vector<double> gain_db;
  std::vector<double> interference_w;
  std::vector<bool> available;
  int remaining_chunks = 0;
  int chunks_total = 0;
  int remaining_slots = 0;
  int total_slots = 1;
};

inline SensedCsi sense(const World& world, int agent, const SlotOutcome* previous) {
  if (agent < 0 || agent >= world.agents()) throw std::out_of_range("agent index out of range");
  const EnvContext& ctx = *world.ctx;
  const auto bands = static_cast<std::size_t>(ctx.band_count());
  const auto k = static_cast<std::size_t>(agent);
  SensedCsi csi;
  csi.agent = agent;
  csi.agents = world.agents();
  csi.gain_db.resize(bands);
  csi.interference_w.resize(bands);
  csi.available.resize(bands);
  const double n0 = ctx.channel.noise_w_per_hz();
  for (std::size_t b = 0; b < bands; ++b) {
    csi.gain_db[b] = world.gains.gain(static_cast<int>(b), agent, agent).db();
    csi.interference_w[b] = previous ? previous->sensed_interference_w.at(k).at(b) : n0 * ctx.bands[b].bandwidth_hz;
    csi.available[b] = world.available(agent, static_cast<int>(b));
  }
  const PayloadTask& task = world.tasks.at(k);
  csi.remaining_chunks = task.resolved() ? 0 : task.remaining();
  csi.chunks_total = task.chunks_total;
  csi.remaining_slots = std::max(ctx.episode.slots - world.slot, 0);
  csi.total_slots = ctx.episode.slots;
  return csi;
}

/// Observation dimension: 3 per band, remaining-chunk and remaining-time
/// fractions, the agent one-hot, plus an optional per-band claims block.
inline int observation_dim(int bands, int agents, int claims_block = 0) { return 3 * bands + 2 + agents + claims_block; }

namespace detail {
inline double unit(double v, double lo, double hi) { return std::clamp((v - lo) / (hi - lo), 0.0, 1.0); }
}  // namespace detail

template <typename Scalar = float>
std::vector<Scalar> encode(const SensedCsi& csi, const ObservationScale& scale, std::span<const int> claims = {}) {
  const std::size_t bands = csi.gain_db.size();
  std::vector<Scalar> obs;
  obs.reserve(static_cast<std::size_t>(observation_dim(static_cast<int>(bands), csi.agents, static_cast<int>(claims.size()))));
  for (std::size_t b = 0; b < bands; ++b) {
    obs.push_back(static_cast<Scalar>(detail::unit(csi.gain_db[b], scale.gain_min_db, scale.gain_max_db)));
    obs.push_back(static_cast<Scalar>(
        detail::unit(w_to_dbm(csi.interference_w[b]), scale.interference_min_dbm, scale.interference_max_dbm)));
    obs.push_back(csi.available[b] ? Scalar(1) : Scalar(0));
  }
  obs.push_back(csi.chunks_total > 0 ? static_cast<Scalar>(static_cast<double>(csi.remaining_chunks) / csi.chunks_total)
                                     : Scalar(0));
  obs.push_back(static_cast<Scalar>(static_cast<double>(csi.remaining_slots) / csi.total_slots));
  for (int a = 0; a < csi.agents; ++a) obs.push_back(a == csi.agent ? Scalar(1) : Scalar(0));
  for (int c : claims) obs.push_back(static_cast<Scalar>(c));
  return obs;
}

template <typename Scalar = float>
std::vector<Scalar> observe(const World& world, int agent, const SlotOutcome* previous, const ObservationScale& scale,
                            std::span<const int> claims = {}) {
  return encode<Scalar>(sense(world, agent, previous), scale, claims);
}

}  // namespace hetvnet::marl
