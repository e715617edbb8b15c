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
#include <concepts>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hetvnet/channel.hpp"
#include "hetvnet/rng.hpp"
#include "hetvnet/topology.hpp"

namespace hetvnet {

enum class RewardMode { kShaped, kStrict };

/// Shaped per-slot reward, identical for every agent:
///   lambda_v2i * sum_m (C_m - C_m^free) [Mbps]
/// + lambda_v2v * sum_k min(R_k / R_chunk, 1)
/// + beta at the terminal slot if every payload was delivered.
/// C_m^free is the V2I capacity the slot would have had with no V2V traffic
/// (action independent), and R_chunk the rate that moves one chunk per slot.
struct RewardConfig {
  RewardMode mode = RewardMode::kShaped;
  double lambda_v2i = 0.1;
  double lambda_v2v = 0.9;
  double beta = 10.0;
  bool operator==(const RewardConfig&) const = default;
};

struct EpisodeConfig {
  double slot_s = 1e-3;
  int slots = 100;  // T; the payload deadline is the episode end
  long payload_bytes = 1060;
  int chunk_bytes = 300;
  double sinr_min = 1.0;
  std::vector<double> powers_dbm{23.0, 10.0, 5.0};
  double v2i_power_dbm = 23.0;
  RewardConfig reward;
  bool operator==(const EpisodeConfig&) const = default;
};

struct PayloadTask {
  long total_bytes = 0;
  int chunk_bytes = 300;
  int chunks_total = 0;
  int chunks_delivered = 0;
  int chunk_failures = 0;
  bool failed = false;
  int deadline_slots = 0;

  static PayloadTask create(long total_bytes, int chunk_bytes, int deadline_slots) {
    if (total_bytes < 0) throw std::invalid_argument("negative payload size");
    if (chunk_bytes <= 0) throw std::invalid_argument("chunk size must be positive");
    PayloadTask t;
    t.total_bytes = total_bytes;
    t.chunk_bytes = chunk_bytes;
    t.chunks_total = static_cast<int>((total_bytes + chunk_bytes - 1) / chunk_bytes);
    t.deadline_slots = deadline_slots;
    return t;
  }
  bool delivered() const { return !failed && chunks_delivered == chunks_total; }
  bool resolved() const { return failed || chunks_delivered == chunks_total; }
  int remaining() const { return chunks_total - chunks_delivered; }
  bool operator==(const PayloadTask&) const = default;
};

struct Action {
  int band = 0;
  int power = 0;
  bool operator==(const Action&) const = default;
};

using JointAction = std::vector<Action>;

inline int action_index(Action a, int powers) { return a.band * powers + a.power; }
inline Action action_from_index(int index, int powers) { return {index / powers, index % powers}; }

struct SlotOutcome {
  int slot = 0;
  std::vector<double> v2i_capacity_bps;       // per V2I link
  std::vector<double> v2i_free_capacity_bps;  // same slot without V2V interference
  double v2v_required_bps = 0.0;              // rate that carries one chunk per slot
  std::vector<double> v2v_rate_bps;      // effective: capacity if the chunk got through, else 0
  std::vector<double> v2v_sinr;
  std::vector<std::uint8_t> transmitted;
  std::vector<std::uint8_t> chunk_delivered;
  std::vector<std::uint8_t> chunk_failed;
  /// Interference plus noise measured at each agent's receiver on every
  /// band during this slot, [agent][band], watts.
  std::vector<std::vector<double>> sensed_interference_w;
  std::vector<double> reward;
  bool terminal = false;
  bool all_delivered = false;

  double v2i_sum_bps() const { return std::accumulate(v2i_capacity_bps.begin(), v2i_capacity_bps.end(), 0.0); }
};

struct EpisodeMetrics {
  double v2i_sum_capacity_bps = 0.0;  // mean over all T slots
  std::vector<bool> success_flags;
  double cumulative_reward = 0.0;
  int slots_used = 0;
  std::vector<double> v2i_sum_trace_bps;
  std::vector<int> chunk_failures;

  double success_fraction() const {
    if (success_flags.empty()) return 0.0;
    return static_cast<double>(std::count(success_flags.begin(), success_flags.end(), true)) /
           static_cast<double>(success_flags.size());
  }
};

/// Immutable per-experiment environment description.
struct EnvContext {
  ChannelParams channel;
  std::vector<Band> bands;
  EpisodeConfig episode;

  int band_count() const { return static_cast<int>(bands.size()); }
  int power_count() const { return static_cast<int>(episode.powers_dbm.size()); }
  int action_count() const { return band_count() * power_count(); }
  double chunk_bits() const { return 8.0 * episode.chunk_bytes; }
  double max_power_dbm() const {
    return *std::max_element(episode.powers_dbm.begin(), episode.powers_dbm.end());
  }
};

inline std::shared_ptr<const EnvContext> make_context(const ScenarioConfig& scenario, const ChannelParams& channel,
                                                      const BandCatalogConfig& offered,
                                                      const EpisodeConfig& episode) {
  if (episode.powers_dbm.empty()) throw std::invalid_argument("empty power catalog");
  if (episode.slots < 1) throw std::invalid_argument("episode needs at least one slot");
  if (!(episode.slot_s > 0)) throw std::invalid_argument("slot duration must be positive");
  auto ctx = std::make_shared<EnvContext>();
  ctx->channel = channel;
  ctx->bands = build_band_catalog(scenario.v2i_links, scenario.wifi_aps, channel, offered);
  ctx->episode = episode;
  return ctx;
}

/// Independent random streams driving one episode's environment. None of
/// them is consumed at an action-dependent rate except `contention`.
struct EpisodeStreams {
  RngStream mobility;
  RngStream shadowing;
  RngStream fading;
  RngStream tvws;
  RngStream contention;

  static EpisodeStreams derive(std::uint64_t seed, StreamPurpose family, std::uint64_t a, std::uint64_t b = 0) {
    auto s = [&](StreamPurpose p) {
      return RngStream::derive(seed, family, {static_cast<std::uint64_t>(p), a, b});
    };
    return {s(StreamPurpose::kMobility), s(StreamPurpose::kShadowing), s(StreamPurpose::kFading),
            s(StreamPurpose::kTvws), s(StreamPurpose::kContention)};
  }
};

/// World snapshot at the start of a slot: geometry, current CSI, the sensed
/// TV-primary state (its value during the previous slot) and payload progress.
struct World {
  std::shared_ptr<const EnvContext> ctx;
  Scenario scenario;
  GainTable gains;
  std::vector<PayloadTask> tasks;
  int slot = 0;
  bool tvws_sensed_on = false;

  int agents() const { return scenario.agents(); }
  int v2i_links() const { return static_cast<int>(scenario.v2i_links.size()); }
  bool finished() const {
    return slot >= ctx->episode.slots ||
           std::all_of(tasks.begin(), tasks.end(), [](const PayloadTask& t) { return t.resolved(); });
  }
  bool available(int agent, int band) const {
    return band_available(ctx->bands[static_cast<std::size_t>(band)],
                          scenario.v2v_links[static_cast<std::size_t>(agent)], scenario, tvws_sensed_on);
  }
};

inline World make_world(const Scenario& scenario, std::shared_ptr<const EnvContext> ctx, EpisodeStreams& streams) {
  if (static_cast<int>(scenario.v2i_links.size()) >
      static_cast<int>(std::count_if(ctx->bands.begin(), ctx->bands.end(),
                                     [](const Band& b) { return b.rat == RatKind::kCellularSubband; }))) {
    throw std::invalid_argument("fewer cellular sub-bands than V2I links");
  }
  World w;
  w.scenario = scenario;
  w.gains = GainTable(ctx->band_count(), scenario.agents(), static_cast<int>(scenario.v2i_links.size()));
  w.gains.draw_shadowing(ctx->bands, ctx->channel, streams.shadowing);
  w.gains.update_path_loss(scenario, ctx->bands, ctx->channel);
  w.gains.draw_fading(streams.fading);
  w.tvws_sensed_on = streams.tvws.bernoulli(ctx->channel.tvws_occupancy.stationary_on());
  for (int k = 0; k < scenario.agents(); ++k) {
    w.tasks.push_back(PayloadTask::create(ctx->episode.payload_bytes, ctx->episode.chunk_bytes, ctx->episode.slots));
  }
  w.ctx = std::move(ctx);
  return w;
}

/// Cooperative reward: every agent receives the same scalar. The terminal
/// bonus is paid only when every agent delivered its whole payload.
inline std::vector<double> compute_reward(const SlotOutcome& outcome, bool terminal, bool all_delivered,
                                          const RewardConfig& weights) {
  const std::size_t agents = outcome.v2v_rate_bps.size();
  double r = (terminal && all_delivered) ? weights.beta : 0.0;
  if (weights.mode == RewardMode::kShaped) {
    double v2i_loss = 0.0;
    for (std::size_t m = 0; m < outcome.v2i_capacity_bps.size(); ++m) {
      const double free = m < outcome.v2i_free_capacity_bps.size() ? outcome.v2i_free_capacity_bps[m]
                                                                   : outcome.v2i_capacity_bps[m];
      v2i_loss += outcome.v2i_capacity_bps[m] - free;
    }
    double v2v = 0.0;
    for (double rate : outcome.v2v_rate_bps) {
      v2v += outcome.v2v_required_bps > 0 ? std::min(rate / outcome.v2v_required_bps, 1.0) : 0.0;
    }
    r += weights.lambda_v2i * v2i_loss / 1e6 + weights.lambda_v2v * v2v;
  }
  return std::vector<double>(agents, r);
}

/// Applies a joint action for one slot and returns the outcome together
/// with the next world snapshot.
inline std::pair<SlotOutcome, World> step(const World& world, const JointAction& joint, EpisodeStreams& streams) {
  const EnvContext& ctx = *world.ctx;
  const int agents = world.agents();
  const int v2i = world.v2i_links();
  const int bands = ctx.band_count();
  if (world.slot >= ctx.episode.slots) throw std::logic_error("episode already finished");
  if (static_cast<int>(joint.size()) != agents) {
    throw std::invalid_argument("joint action has " + std::to_string(joint.size()) + " entries, expected " +
                                std::to_string(agents));
  }
  for (const Action& a : joint) {
    if (a.band < 0 || a.band >= bands || a.power < 0 || a.power >= ctx.power_count()) {
      throw std::invalid_argument("action index out of range");
    }
  }

  // TV primary state during this slot, one step on from the sensed state.
  const TvwsOccupancy& occ = ctx.channel.tvws_occupancy;
  const double u_tvws = streams.tvws.uniform();
  const bool tvws_on_now = world.tvws_sensed_on ? !(u_tvws < occ.p_on_off) : (u_tvws < occ.p_off_on);

  // Placement: resolved agents and unavailable picks stay silent.
  std::vector<int> band_of(static_cast<std::size_t>(agents), -1);
  for (int k = 0; k < agents; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    if (world.tasks[ku].resolved()) continue;
    if (!world.available(k, joint[ku].band)) continue;
    band_of[ku] = joint[ku].band;
  }
  // Wi-Fi contention: one uniformly chosen winner per crowded AP band.
  for (int b = 0; b < bands; ++b) {
    if (ctx.bands[static_cast<std::size_t>(b)].rat != RatKind::kWifiAp) continue;
    std::vector<int> contenders;
    for (int k = 0; k < agents; ++k) {
      if (band_of[static_cast<std::size_t>(k)] == b) contenders.push_back(k);
    }
    if (contenders.size() < 2) continue;
    const auto winner = contenders[streams.contention.index(contenders.size())];
    for (int k : contenders) {
      if (k != winner) band_of[static_cast<std::size_t>(k)] = -1;
    }
  }

  // Transmitter powers: V2V tx 0..K-1 (0 when silent), then V2I tx on its sub-band.
  std::vector<double> power_w(static_cast<std::size_t>(agents), 0.0);
  for (int k = 0; k < agents; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    if (band_of[ku] >= 0) power_w[ku] = dbm_to_w(ctx.episode.powers_dbm[static_cast<std::size_t>(joint[ku].power)]);
  }
  const double v2i_power = dbm_to_w(ctx.episode.v2i_power_dbm);
  const double n0 = ctx.channel.noise_w_per_hz();
  const int bs = agents;

  SlotOutcome out;
  out.slot = world.slot;
  out.v2i_capacity_bps.assign(static_cast<std::size_t>(v2i), 0.0);
  out.v2i_free_capacity_bps.assign(static_cast<std::size_t>(v2i), 0.0);
  out.v2v_required_bps = ctx.chunk_bits() / ctx.episode.slot_s;
  out.v2v_rate_bps.assign(static_cast<std::size_t>(agents), 0.0);
  out.v2v_sinr.assign(static_cast<std::size_t>(agents), 0.0);
  out.transmitted.assign(static_cast<std::size_t>(agents), 0);
  out.chunk_delivered.assign(static_cast<std::size_t>(agents), 0);
  out.chunk_failed.assign(static_cast<std::size_t>(agents), 0);
  out.sensed_interference_w.assign(static_cast<std::size_t>(agents), std::vector<double>(static_cast<std::size_t>(bands), 0.0));

  for (int m = 0; m < v2i; ++m) {
    const int b = world.scenario.v2i_links[static_cast<std::size_t>(m)].subband;
    std::vector<Transmission> txs{{agents + m, b, v2i_power, world.gains.linear(b, agents + m, bs)}};
    for (int k = 0; k < agents; ++k) {
      if (band_of[static_cast<std::size_t>(k)] == b) {
        txs.push_back({k, b, power_w[static_cast<std::size_t>(k)], world.gains.linear(b, k, bs)});
      }
    }
    const SinrReport rep = compute_sinr(agents + m, ctx.bands[static_cast<std::size_t>(b)], txs, n0);
    const double bw = ctx.bands[static_cast<std::size_t>(b)].bandwidth_hz;
    out.v2i_capacity_bps[static_cast<std::size_t>(m)] = capacity(rep.sinr, bw);
    out.v2i_free_capacity_bps[static_cast<std::size_t>(m)] = capacity(rep.signal_w / rep.noise_w, bw);
  }

  auto v2i_on_band = [&](int b) -> int {
    for (int m = 0; m < v2i; ++m) {
      if (world.scenario.v2i_links[static_cast<std::size_t>(m)].subband == b) return m;
    }
    return -1;
  };

  std::vector<PayloadTask> tasks = world.tasks;
  for (int k = 0; k < agents; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    for (int b = 0; b < bands; ++b) {
      const Band& band = ctx.bands[static_cast<std::size_t>(b)];
      double interference = 0.0;
      for (int j = 0; j < agents; ++j) {
        if (j != k && band_of[static_cast<std::size_t>(j)] == b) {
          interference += power_w[static_cast<std::size_t>(j)] * world.gains.linear(b, j, k);
        }
      }
      if (const int m = v2i_on_band(b); m >= 0) interference += v2i_power * world.gains.linear(b, agents + m, k);
      out.sensed_interference_w[ku][static_cast<std::size_t>(b)] = interference + n0 * band.bandwidth_hz;
    }

    const int b = band_of[ku];
    if (b < 0) continue;
    const Band& band = ctx.bands[static_cast<std::size_t>(b)];
    std::vector<Transmission> txs{{k, b, power_w[ku], world.gains.linear(b, k, k)}};
    for (int j = 0; j < agents; ++j) {
      if (j != k && band_of[static_cast<std::size_t>(j)] == b) {
        txs.push_back({j, b, power_w[static_cast<std::size_t>(j)], world.gains.linear(b, j, k)});
      }
    }
    if (const int m = v2i_on_band(b); m >= 0) txs.push_back({agents + m, b, v2i_power, world.gains.linear(b, agents + m, k)});
    const SinrReport rep = compute_sinr(k, band, txs, n0);
    const double rate = capacity(rep.sinr, band.bandwidth_hz);
    out.transmitted[ku] = 1;
    out.v2v_sinr[ku] = rep.sinr;

    const bool primary_collision = band.rat == RatKind::kTvWhiteSpace && tvws_on_now;
    const bool ok = !primary_collision && rate * ctx.episode.slot_s >= ctx.chunk_bits() && rep.sinr >= ctx.episode.sinr_min;
    if (ok) {
      out.chunk_delivered[ku] = 1;
      out.v2v_rate_bps[ku] = rate;
      ++tasks[ku].chunks_delivered;
    } else {
      out.chunk_failed[ku] = 1;
      ++tasks[ku].chunk_failures;
      tasks[ku].failed = true;
    }
  }

  const bool all_resolved = std::all_of(tasks.begin(), tasks.end(), [](const PayloadTask& t) { return t.resolved(); });
  out.all_delivered = std::all_of(tasks.begin(), tasks.end(), [](const PayloadTask& t) { return t.delivered(); });
  out.terminal = all_resolved || world.slot + 1 >= ctx.episode.slots;
  out.reward = compute_reward(out, out.terminal, out.all_delivered, ctx.episode.reward);

  World next;
  next.ctx = world.ctx;
  next.scenario = step_mobility(world.scenario, ctx.episode.slot_s, streams.mobility);
  next.gains = world.gains;
  next.gains.update_path_loss(next.scenario, ctx.bands, ctx.channel);
  next.gains.draw_fading(streams.fading);
  next.tasks = std::move(tasks);
  next.slot = world.slot + 1;
  next.tvws_sensed_on = tvws_on_now;
  return {std::move(out), std::move(next)};
}

/// A joint policy maps the current world and the previous slot outcome
/// (null at slot 0) to one action per agent.
template <typename P>
concept JointPolicy = requires(P p, const World& w, const SlotOutcome* prev) {
  { p(w, prev) } -> std::convertible_to<JointAction>;
};

/// Runs all T slots. Agents go silent once their payload resolves; V2I
/// capacities keep accumulating so the capacity metric always averages T slots.
template <JointPolicy Policy>
EpisodeMetrics run_episode(Policy&& policy, const Scenario& scenario, std::shared_ptr<const EnvContext> ctx,
                           EpisodeStreams& streams) {
  World world = make_world(scenario, std::move(ctx), streams);
  const int T = world.ctx->episode.slots;
  const int agents = world.agents();
  EpisodeMetrics m;
  m.v2i_sum_trace_bps.reserve(static_cast<std::size_t>(T));

  bool done = world.finished();
  std::optional<SlotOutcome> prev;
  const JointAction silent(static_cast<std::size_t>(agents), Action{});
  for (int t = 0; t < T; ++t) {
    JointAction joint = done ? silent : JointAction(policy(world, prev ? &*prev : nullptr));
    auto [outcome, next] = step(world, joint, streams);
    m.v2i_sum_trace_bps.push_back(outcome.v2i_sum_bps());
    if (!done) {
      m.cumulative_reward += outcome.reward.front();
      m.slots_used = t + 1;
      done = outcome.terminal;
    }
    prev = std::move(outcome);
    world = std::move(next);
  }
  m.v2i_sum_capacity_bps = std::accumulate(m.v2i_sum_trace_bps.begin(), m.v2i_sum_trace_bps.end(), 0.0) / T;
  for (const PayloadTask& task : world.tasks) {
    m.success_flags.push_back(task.delivered());
    m.chunk_failures.push_back(task.chunk_failures);
  }
  return m;
}

/// Fraction of true flags over R runs x K agents.
inline double success_probability(std::span<const std::vector<bool>> runs) {
  if (runs.empty()) throw std::invalid_argument("success probability needs at least one run");
  std::size_t total = 0;
  std::size_t ok = 0;
  for (const auto& flags : runs) {
    total += flags.size();
    ok += static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));
  }
  return total == 0 ? 0.0 : static_cast<double>(ok) / static_cast<double>(total);
}

}  // namespace hetvnet
