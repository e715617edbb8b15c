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

#include "hetvnet/episode.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "test_support.hpp"

namespace hetvnet {
namespace {

using testing::FixedPolicy;
using testing::context_for;
using testing::flat_fading;
using testing::no_shadowing;
using testing::pairs_scenario;

EpisodeStreams streams_for(std::uint64_t seed, std::uint64_t run = 0) {
  return EpisodeStreams::derive(seed, StreamPurpose::kEvalEpisode, run);
}

TEST(PayloadTask, ChunkCountIsCeiling) {
  EXPECT_EQ(PayloadTask::create(1060, 300, 100).chunks_total, 4);
  EXPECT_EQ(PayloadTask::create(900, 300, 100).chunks_total, 3);
  EXPECT_EQ(PayloadTask::create(6360, 300, 100).chunks_total, 22);
  EXPECT_EQ(PayloadTask::create(1, 300, 100).chunks_total, 1);
  const PayloadTask empty = PayloadTask::create(0, 300, 100);
  EXPECT_EQ(empty.chunks_total, 0);
  EXPECT_TRUE(empty.delivered());
  EXPECT_THROW(PayloadTask::create(-1, 300, 100), std::invalid_argument);
}

TEST(PayloadTask, MonotoneHardness) {
  int last = 0;
  for (long bytes = 0; bytes < 10000; bytes += 37) {
    const int chunks = PayloadTask::create(bytes, 300, 100).chunks_total;
    EXPECT_GE(chunks, last);
    last = chunks;
  }
}

TEST(ActionIndex, RoundTrip) {
  for (int i = 0; i < 27; ++i) EXPECT_EQ(action_index(action_from_index(i, 3), 3), i);
  EXPECT_EQ(action_from_index(7, 3), (Action{2, 1}));
}

TEST(Step, UnavailableBandMeansSilence) {
  // One AP far from the pair: its band is unavailable.
  const Scenario s = pairs_scenario(1, 1, 20.0, {{{240.0, 240.0}, 50.0}});
  EpisodeConfig ep;
  ep.payload_bytes = 1060;
  auto ctx = context_for(s, ChannelParams{}, BandCatalogConfig{}, ep);
  ASSERT_EQ(ctx->bands[2].rat, RatKind::kWifiAp);
  EpisodeStreams st = streams_for(1);
  const World w = make_world(s, ctx, st);
  ASSERT_FALSE(w.available(0, 2));
  const auto [out, next] = step(w, {{2, 0}}, st);
  EXPECT_EQ(out.transmitted[0], 0);
  EXPECT_EQ(out.chunk_failed[0], 0);
  EXPECT_EQ(out.chunk_delivered[0], 0);
  EXPECT_FALSE(next.tasks[0].failed);
  EXPECT_EQ(out.v2i_capacity_bps, out.v2i_free_capacity_bps);
  EXPECT_EQ(next.slot, 1);
}

TEST(Step, SingleChunkOverDsrcMatchesHandComputedRate) {
  const Scenario s = pairs_scenario(1, 1, 20.0);
  EpisodeConfig ep;
  ep.payload_bytes = 300;
  BandCatalogConfig offered;
  offered.wifi = false;
  offered.tvws = false;
  auto ctx = context_for(s, no_shadowing(), offered, ep);
  ASSERT_EQ(ctx->bands[1].rat, RatKind::kDsrc);
  EpisodeStreams st = streams_for(2);
  World w = make_world(s, ctx, st);
  flat_fading(w);

  // 23 dBm over 20 m of DSRC: 63 + 28 log10(2) dB loss; noise -174 + 70 dBm.
  const double rx_dbm = 23.0 - (63.0 + 28.0 * std::log10(2.0));
  const double snr = std::pow(10.0, (rx_dbm - (-174.0 + 70.0)) / 10.0);
  const double expected_rate = 10e6 * std::log2(1.0 + snr);

  const auto [out, next] = step(w, {{1, 0}}, st);
  EXPECT_EQ(out.transmitted[0], 1);
  EXPECT_EQ(out.chunk_delivered[0], 1);
  EXPECT_NEAR(out.v2v_sinr[0] / snr, 1.0, 1e-9);
  EXPECT_NEAR(out.v2v_rate_bps[0] / expected_rate, 1.0, 1e-9);
  EXPECT_TRUE(next.tasks[0].delivered());
  EXPECT_TRUE(out.terminal);
  EXPECT_TRUE(out.all_delivered);
  EXPECT_TRUE(next.finished());
}

TEST(Step, ChunkFailsBelowSinrThreshold) {
  const Scenario s = pairs_scenario(1, 1, 20.0);
  EpisodeConfig ep;
  ep.payload_bytes = 600;
  auto ctx = context_for(s, no_shadowing(), BandCatalogConfig{false, false, false}, ep);
  EpisodeStreams st = streams_for(3);
  World w = make_world(s, ctx, st);
  flat_fading(w, 1e-12);
  const auto [out, next] = step(w, {{0, 2}}, st);
  EXPECT_EQ(out.chunk_failed[0], 1);
  EXPECT_EQ(out.v2v_rate_bps[0], 0.0);
  EXPECT_TRUE(next.tasks[0].failed);
  EXPECT_TRUE(out.terminal);
  EXPECT_FALSE(out.all_delivered);

  // A failed payload never transmits again.
  ASSERT_TRUE(next.finished());
}

TEST(Step, TvPrimarySwitchingOnFailsTheChunk) {
  const Scenario s = pairs_scenario(1, 1, 20.0);
  ChannelParams p = no_shadowing();
  p.tvws_occupancy = {1.0, 0.0};
  EpisodeConfig ep;
  ep.payload_bytes = 1060;
  auto ctx = context_for(s, p, BandCatalogConfig{false, false, true}, ep);
  ASSERT_EQ(ctx->bands[1].rat, RatKind::kTvWhiteSpace);
  EpisodeStreams st = streams_for(4);
  World w = make_world(s, ctx, st);
  EXPECT_TRUE(w.tvws_sensed_on);
  w.tvws_sensed_on = false;
  flat_fading(w);
  ASSERT_TRUE(w.available(0, 1));
  const auto [out, next] = step(w, {{1, 0}}, st);
  EXPECT_EQ(out.transmitted[0], 1);
  EXPECT_EQ(out.chunk_failed[0], 1);
  EXPECT_TRUE(next.tasks[0].failed);
  EXPECT_TRUE(next.tvws_sensed_on);
  EXPECT_FALSE(next.available(0, 1));
}

TEST(Step, WifiContentionLeavesOneWinner) {
  const Scenario s = pairs_scenario(2, 1, 10.0, {{{30.0, 25.0}, 100.0}});
  EpisodeConfig ep;
  auto ctx = context_for(s, no_shadowing(), BandCatalogConfig{false, true, false}, ep);
  ASSERT_EQ(ctx->bands[1].rat, RatKind::kWifiAp);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EpisodeStreams st = streams_for(seed);
    World w = make_world(s, ctx, st);
    flat_fading(w);
    const auto [out, next] = step(w, {{1, 0}, {1, 0}}, st);
    EXPECT_EQ(out.transmitted[0] + out.transmitted[1], 1);
    EXPECT_EQ(out.chunk_failed[0] + out.chunk_failed[1], 0);
    EXPECT_EQ(out.chunk_delivered[0] + out.chunk_delivered[1], 1);
  }
}

TEST(Step, RejectsMalformedJointActions) {
  const Scenario s = pairs_scenario(2, 1, 20.0);
  auto ctx = context_for(s, ChannelParams{}, BandCatalogConfig{}, EpisodeConfig{});
  EpisodeStreams st = streams_for(5);
  const World w = make_world(s, ctx, st);
  EXPECT_THROW(step(w, {{0, 0}}, st), std::invalid_argument);
  EXPECT_THROW(step(w, {{0, 0}, {ctx->band_count(), 0}}, st), std::invalid_argument);
  EXPECT_THROW(step(w, {{0, 0}, {0, 3}}, st), std::invalid_argument);
  EXPECT_THROW(step(w, {{0, 0}, {-1, 0}}, st), std::invalid_argument);
}

TEST(Step, ResolvedAgentsStaySilent) {
  const Scenario s = pairs_scenario(2, 1, 20.0);
  EpisodeConfig ep;
  ep.payload_bytes = 600;
  auto ctx = context_for(s, no_shadowing(), BandCatalogConfig{true, false, false}, ep);
  EpisodeStreams st = streams_for(6);
  World w = make_world(s, ctx, st);
  w.tasks[0].chunks_delivered = w.tasks[0].chunks_total;
  const auto [out, next] = step(w, {{1, 0}, {0, 0}}, st);
  EXPECT_EQ(out.transmitted[0], 0);
  EXPECT_EQ(next.tasks[0].chunks_delivered, 2);
}

SlotOutcome outcome_with(std::vector<double> rates, std::vector<double> v2i, std::vector<double> v2i_free) {
  SlotOutcome o;
  o.v2v_rate_bps = std::move(rates);
  o.v2i_capacity_bps = std::move(v2i);
  o.v2i_free_capacity_bps = std::move(v2i_free);
  o.v2v_required_bps = 2.4e6;
  return o;
}

TEST(ComputeReward, TerminalBonusOnlyWhenAllDelivered) {
  RewardConfig w;
  w.mode = RewardMode::kStrict;
  const SlotOutcome o = outcome_with({1e7, 0, 1e7}, {5e6}, {6e6});
  EXPECT_EQ(compute_reward(o, true, true, w), std::vector<double>(3, 10.0));
  EXPECT_EQ(compute_reward(o, true, false, w), std::vector<double>(3, 0.0));
  EXPECT_EQ(compute_reward(o, false, true, w), std::vector<double>(3, 0.0));
  EXPECT_EQ(compute_reward(o, false, false, w), std::vector<double>(3, 0.0));
}

TEST(ComputeReward, ShapedTermsHandComputed) {
  RewardConfig w;
  // V2V: min(1.2e6/2.4e6, 1) + min(9.6e6/2.4e6, 1) = 1.5; V2I: (4 - 6) + (3 - 3) = -2 Mbps.
  const SlotOutcome o = outcome_with({1.2e6, 9.6e6}, {4e6, 3e6}, {6e6, 3e6});
  const double expected = 0.9 * 1.5 + 0.1 * -2.0;
  const auto r = compute_reward(o, false, false, w);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_NEAR(r[0], expected, 1e-12);
  EXPECT_EQ(r[0], r[1]);
  EXPECT_NEAR(compute_reward(o, true, true, w)[1], expected + 10.0, 1e-12);
}

TEST(RunEpisode, EmptyPayloadIsImmediateSuccess) {
  const Scenario s = pairs_scenario(2, 2, 20.0);
  EpisodeConfig ep;
  ep.payload_bytes = 0;
  auto ctx = context_for(s, ChannelParams{}, BandCatalogConfig{}, ep);
  EpisodeStreams st = streams_for(7);
  const EpisodeMetrics m = run_episode(FixedPolicy{{{0, 0}, {0, 0}}}, s, ctx, st);
  EXPECT_EQ(m.success_flags, (std::vector<bool>{true, true}));
  EXPECT_EQ(m.slots_used, 0);
  EXPECT_EQ(m.cumulative_reward, 0.0);
  EXPECT_EQ(m.v2i_sum_trace_bps.size(), 100u);
}

TEST(RunEpisode, OrthogonalBandsFinishInChunkCountSlots) {
  const Scenario s = pairs_scenario(2, 1, 10.0);
  ChannelParams p = no_shadowing();
  p.tvws_occupancy = {0.0, 1.0};
  EpisodeConfig ep;
  ep.payload_bytes = 1060;
  auto ctx = context_for(s, p, BandCatalogConfig{true, false, true}, ep);
  ASSERT_EQ(ctx->bands[1].rat, RatKind::kDsrc);
  ASSERT_EQ(ctx->bands[2].rat, RatKind::kTvWhiteSpace);
  EpisodeStreams st = streams_for(8);
  const EpisodeMetrics m = run_episode(FixedPolicy{{{1, 0}, {2, 0}}}, s, ctx, st);
  EXPECT_EQ(m.success_flags, (std::vector<bool>{true, true}));
  EXPECT_EQ(m.slots_used, 4);
  EXPECT_EQ(m.chunk_failures, (std::vector<int>{0, 0}));
  // Shaped: 4 slots of two full chunks, no cellular use, then the bonus.
  EXPECT_NEAR(m.cumulative_reward, 4 * 0.9 * 2.0 + 10.0, 1e-9);
}

TEST(RunEpisode, AllUnavailableHitsTheDeadline) {
  const Scenario s = pairs_scenario(1, 1, 20.0, {{{240.0, 240.0}, 10.0}});
  EpisodeConfig ep;
  ep.payload_bytes = 300;
  auto ctx = context_for(s, ChannelParams{}, BandCatalogConfig{false, true, false}, ep);
  EpisodeStreams st = streams_for(9);
  const EpisodeMetrics m = run_episode(FixedPolicy{{{1, 0}}}, s, ctx, st);
  EXPECT_EQ(m.success_flags, std::vector<bool>{false});
  EXPECT_EQ(m.slots_used, 100);
  EXPECT_EQ(m.chunk_failures, std::vector<int>{0});
}

TEST(SuccessProbability, FractionOverRunsAndAgents) {
  const std::vector<std::vector<bool>> one{{true, true, false, true}};
  EXPECT_DOUBLE_EQ(success_probability(one), 0.75);
  const std::vector<std::vector<bool>> two{{true, false}, {false, false}};
  EXPECT_DOUBLE_EQ(success_probability(two), 0.25);
  EXPECT_THROW(success_probability(std::span<const std::vector<bool>>{}), std::invalid_argument);
}

/// Uniform random joint actions over the full action space.
struct RandomJoint {
  RngStream rng;
  JointAction operator()(const World& w, const SlotOutcome*) {
    JointAction j;
    for (int k = 0; k < w.agents(); ++k) {
      j.push_back({static_cast<int>(rng.index(static_cast<std::uint64_t>(w.ctx->band_count()))),
                   static_cast<int>(rng.index(static_cast<std::uint64_t>(w.ctx->power_count())))});
    }
    return j;
  }
};

TEST(RunEpisode, DeterministicGivenSeeds) {
  const Scenario s = spawn_scenario(ScenarioConfig{}, 4);
  EpisodeConfig ep;
  ep.payload_bytes = 2120;
  auto ctx = make_context(ScenarioConfig{}, ChannelParams{}, BandCatalogConfig{}, ep);
  EpisodeStreams a = streams_for(10);
  EpisodeStreams b = streams_for(10);
  const EpisodeMetrics x = run_episode(RandomJoint{RngStream(3)}, s, ctx, a);
  const EpisodeMetrics y = run_episode(RandomJoint{RngStream(3)}, s, ctx, b);
  EXPECT_EQ(x.v2i_sum_trace_bps, y.v2i_sum_trace_bps);
  EXPECT_EQ(x.success_flags, y.success_flags);
  EXPECT_EQ(x.cumulative_reward, y.cumulative_reward);
  EXPECT_EQ(x.slots_used, y.slots_used);
}

TEST(RunEpisode, AllOrNothingAndRewardSymmetry) {
  ScenarioConfig sc;
  EpisodeConfig ep;
  ep.payload_bytes = 1060;
  auto ctx = make_context(sc, ChannelParams{}, BandCatalogConfig{}, ep);
  for (std::uint64_t run = 0; run < 200; ++run) {
    const Scenario s = spawn_scenario(sc, run);
    EpisodeStreams st = streams_for(11, run);
    World w = make_world(s, ctx, st);
    RandomJoint policy{RngStream(run)};
    std::vector<int> failures(4, 0);
    while (!w.finished()) {
      auto [out, next] = step(w, policy(w, nullptr), st);
      for (double r : out.reward) ASSERT_EQ(r, out.reward.front());
      for (int k = 0; k < 4; ++k) failures[static_cast<std::size_t>(k)] += out.chunk_failed[static_cast<std::size_t>(k)];
      w = std::move(next);
    }
    for (int k = 0; k < 4; ++k) {
      if (failures[static_cast<std::size_t>(k)] > 0) {
        EXPECT_FALSE(w.tasks[static_cast<std::size_t>(k)].delivered());
      }
      EXPECT_LE(failures[static_cast<std::size_t>(k)], 1);
    }
  }
}

/// Picks uniformly among non-cellular bands.
struct NonCellular {
  RngStream rng;
  JointAction operator()(const World& w, const SlotOutcome*) {
    const int first = w.v2i_links();
    JointAction j;
    for (int k = 0; k < w.agents(); ++k) {
      const auto extra = static_cast<std::uint64_t>(w.ctx->band_count() - first);
      j.push_back({first + static_cast<int>(rng.index(extra)), static_cast<int>(rng.index(3))});
    }
    return j;
  }
};

TEST(RunEpisode, NonCellularTrafficLeavesV2iUntouched) {
  ScenarioConfig sc;
  EpisodeConfig ep;
  ep.payload_bytes = 6360;
  auto ctx = make_context(sc, ChannelParams{}, BandCatalogConfig{}, ep);
  // Reference run without V2V traffic: empty payloads never transmit.
  EpisodeConfig silent_ep = ep;
  silent_ep.payload_bytes = 0;
  auto silent_ctx = make_context(sc, ChannelParams{}, BandCatalogConfig{}, silent_ep);
  for (std::uint64_t run = 0; run < 20; ++run) {
    const Scenario s = spawn_scenario(sc, 100 + run);
    EpisodeStreams a = streams_for(12, run);
    EpisodeStreams b = streams_for(12, run);
    const EpisodeMetrics with = run_episode(NonCellular{RngStream(run)}, s, ctx, a);
    const EpisodeMetrics without = run_episode(FixedPolicy{JointAction(4)}, s, silent_ctx, b);
    EXPECT_EQ(with.v2i_sum_trace_bps, without.v2i_sum_trace_bps);
  }
}

}  // namespace
}  // namespace hetvnet
