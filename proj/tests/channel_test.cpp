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

#include "hetvnet/channel.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

namespace hetvnet {
namespace {

constexpr double kRel = 1e-9;

void expect_rel(double actual, double expected) {
  EXPECT_LE(std::abs(actual - expected), kRel * std::max(std::abs(expected), 1e-300)) << actual << " vs " << expected;
}

TEST(PathLoss, OneDecadeIsTenAlpha) {
  const RatParams rat{2e9, 1e6, 3.0, 60.0, 0.0};
  expect_rel(path_loss_db(rat, 100.0) - path_loss_db(rat, 10.0), 30.0);
}

TEST(PathLoss, ReferenceDistanceGivesPl0) { expect_rel(path_loss_db(RatParams{0, 1, 3.0, 60.0, 0}, 10.0), 60.0); }

TEST(PathLoss, TwentyMeters) {
  // 60 + 30 log10(2) = 69.0309 dB
  const double expected = 60.0 + 30.0 * 0.30102999566398120;
  expect_rel(path_loss_db(RatParams{0, 1, 3.0, 60.0, 0}, 20.0), expected);
  EXPECT_NEAR(expected, 69.03, 0.005);
}

TEST(PathLoss, ClampedAtMinimumDistance) {
  const RatParams rat{0, 1, 3.0, 60.0, 0};
  EXPECT_EQ(path_loss_db(rat, 0.0), path_loss_db(rat, 1.0));
  EXPECT_EQ(path_loss_db(rat, 0.3), path_loss_db(rat, 1.0));
}

TEST(PathLoss, MonotoneForEveryRat) {
  const ChannelParams p;
  for (RatKind rat : {RatKind::kCellularSubband, RatKind::kDsrc, RatKind::kWifiAp, RatKind::kTvWhiteSpace}) {
    double last = -1e300;
    for (double d = 0.0; d < 2000.0; d += 3.7) {
      const double pl = path_loss_db(rat, d, p);
      EXPECT_GE(pl, last);
      last = pl;
    }
  }
}

TEST(Shadowing, DegenerateSigma) {
  RngStream rng(3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_shadowing(rng, 0.0), 0.0);
}

TEST(Shadowing, MonteCarloMoments) {
  RngStream rng(2024);
  const int n = 100000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_shadowing(rng, 8.0);
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  EXPECT_NEAR(mean, 0.0, 0.2);
  EXPECT_NEAR(sd, 8.0, 0.3);
}

TEST(Shadowing, ReproducibleFromSeed) {
  RngStream a(77);
  RngStream b(77);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_shadowing(a, 6.0), sample_shadowing(b, 6.0));
}

TEST(FastFading, ExponentialUnitMean) {
  RngStream rng(5);
  const int n = 100000;
  double sum = 0.0;
  int above_median = 0;
  for (int i = 0; i < n; ++i) {
    const double h = sample_fast_fading(rng);
    ASSERT_GT(h, 0.0);
    sum += h;
    if (h > std::log(2.0)) ++above_median;
  }
  EXPECT_NEAR(sum / n, 1.0, 0.03);
  EXPECT_NEAR(static_cast<double>(above_median) / n, 0.5, 0.01);
}

TEST(ChannelGain, CombinedLinear) {
  const ChannelGain g{80.0, 5.0, 3.0};
  expect_rel(g.linear(), std::pow(10.0, -8.2));
  EXPECT_GT(g.linear(), 0.0);
}

Band make_band(int index, double bw = 1e6) {
  Band b;
  b.index = index;
  b.bandwidth_hz = bw;
  return b;
}

TEST(ComputeSinr, NoInterferers) {
  // signal 1e-9 W, noise 1e-10 W -> 10
  const Band band = make_band(0, 1e6);
  const std::vector<Transmission> txs{{0, 0, 1.0, 1e-9}};
  const SinrReport r = compute_sinr(0, band, txs, 1e-16);
  expect_rel(r.signal_w, 1e-9);
  expect_rel(r.noise_w, 1e-10);
  EXPECT_EQ(r.interference_w, 0.0);
  expect_rel(r.sinr, 10.0);
}

TEST(ComputeSinr, ZeroOwnPower) {
  const std::vector<Transmission> txs{{0, 0, 0.0, 1e-9}, {1, 0, 1.0, 1e-12}};
  EXPECT_EQ(compute_sinr(0, make_band(0), txs, 1e-16).sinr, 0.0);
}

TEST(ComputeSinr, OtherBandDoesNotInterfere) {
  const std::vector<Transmission> txs{{0, 0, 1.0, 1e-9}, {1, 1, 100.0, 1e-3}};
  const SinrReport r = compute_sinr(0, make_band(0), txs, 1e-16);
  EXPECT_EQ(r.interference_w, 0.0);
  expect_rel(r.sinr, 10.0);
}

TEST(ComputeSinr, SameBandInterferenceClosedForm) {
  const std::vector<Transmission> txs{{0, 0, 2.0, 1e-9}, {3, 0, 0.5, 2e-10}};
  const SinrReport r = compute_sinr(0, make_band(0), txs, 1e-16);
  expect_rel(r.interference_w, 1e-10);
  expect_rel(r.sinr, 2e-9 / 2e-10);
}

TEST(ComputeSinr, RejectsMissingOwnSignal) {
  const std::vector<Transmission> txs{{1, 0, 1.0, 1e-9}};
  EXPECT_THROW(compute_sinr(0, make_band(0), txs, 1e-16), std::invalid_argument);
}

TEST(ComputeSinr, PermutationInvariantAndInterfererNeverHelps) {
  RngStream rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Transmission> txs{{0, 0, rng.uniform(0, 1), rng.uniform(1e-12, 1e-8)}};
    const int n = 1 + static_cast<int>(rng.index(5));
    for (int i = 1; i <= n; ++i) {
      txs.push_back({i, static_cast<int>(rng.index(2)), rng.uniform(0, 1), rng.uniform(1e-12, 1e-8)});
    }
    const double base = compute_sinr(0, make_band(0), txs, 1e-17).sinr;
    std::vector<Transmission> rev(txs.rbegin(), txs.rend());
    EXPECT_DOUBLE_EQ(compute_sinr(0, make_band(0), rev, 1e-17).sinr, base);
    txs.push_back({99, 0, rng.uniform(1e-6, 1), rng.uniform(1e-12, 1e-8)});
    EXPECT_LE(compute_sinr(0, make_band(0), txs, 1e-17).sinr, base);
  }
}

TEST(Capacity, ShannonClosedForms) {
  EXPECT_EQ(capacity(0.0, 1e6), 0.0);
  expect_rel(capacity(1.0, 1e6), 1e6);
  expect_rel(capacity(15.0, 1e6), 4e6);
}

TEST(Capacity, MonotoneInSinrLinearInBandwidth) {
  double last = -1.0;
  for (double s = 0.0; s < 1000.0; s = s * 1.5 + 0.01) {
    const double c = capacity(s, 1e6);
    EXPECT_GE(c, last);
    last = c;
    EXPECT_NEAR(capacity(s, 3e6), 3.0 * c, 1e-9 * c + 1e-12);
  }
}

Scenario two_vehicle_scenario(Vec2 tx, Vec2 rx) {
  Scenario s;
  s.vehicles = {{0, tx, 10, {1, 0}}, {1, rx, 10, {1, 0}}};
  s.v2v_links = {{0, 1}};
  s.wifi_aps = {{{0.0, 0.0}, 100.0}};
  return s;
}

TEST(BandAvailable, PerRatRules) {
  const ChannelParams p;
  const auto bands = build_band_catalog(2, 1, p, BandCatalogConfig{});
  ASSERT_EQ(bands.size(), 5u);
  EXPECT_EQ(bands[2].rat, RatKind::kDsrc);
  EXPECT_EQ(bands[3].rat, RatKind::kWifiAp);
  EXPECT_EQ(bands[4].rat, RatKind::kTvWhiteSpace);

  const Scenario far = two_vehicle_scenario({30, 0}, {150, 0});
  const Scenario near = two_vehicle_scenario({30, 0}, {0, 60});
  EXPECT_TRUE(band_available(bands[0], far.v2v_links[0], far, true));
  EXPECT_TRUE(band_available(bands[2], far.v2v_links[0], far, true));
  EXPECT_FALSE(band_available(bands[3], far.v2v_links[0], far, false));
  EXPECT_TRUE(band_available(bands[3], near.v2v_links[0], near, false));
  EXPECT_FALSE(band_available(bands[4], near.v2v_links[0], near, true));
  EXPECT_TRUE(band_available(bands[4], near.v2v_links[0], near, false));
}

TEST(BandCatalog, DefaultDeskCatalog) {
  const auto bands = build_band_catalog(4, 3, ChannelParams{}, BandCatalogConfig{});
  ASSERT_EQ(bands.size(), 9u);
  for (int i = 0; i < 9; ++i) EXPECT_EQ(bands[static_cast<std::size_t>(i)].index, i);
  EXPECT_EQ(std::count_if(bands.begin(), bands.end(), [](const Band& b) { return b.rat == RatKind::kCellularSubband; }), 4);
  EXPECT_EQ(bands[5].wifi_ap_index, 0);
  EXPECT_EQ(bands[7].wifi_ap_index, 2);
  EXPECT_TRUE(bands[8].tvws_occupancy.has_value());
  EXPECT_EQ(bands[4].bandwidth_hz, 10e6);
}

TEST(Noise, SpectralDensity) {
  // -174 dBm/Hz over 1 MHz = -114 dBm
  const ChannelParams p;
  EXPECT_NEAR(w_to_dbm(p.noise_w_per_hz() * 1e6), -114.0, 1e-9);
}

}  // namespace
}  // namespace hetvnet
