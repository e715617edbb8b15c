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
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hetvnet/rng.hpp"
#include "hetvnet/topology.hpp"

namespace hetvnet {

enum class RatKind { kCellularSubband, kDsrc, kWifiAp, kTvWhiteSpace };

inline std::string_view to_string(RatKind rat) {
  switch (rat) {
    case RatKind::kCellularSubband: return "cellular";
    case RatKind::kDsrc: return "dsrc";
    case RatKind::kWifiAp: return "wifi";
    case RatKind::kTvWhiteSpace: return "tvws";
  }
  return "?";
}

/// Log-distance propagation and band parameters for one radio technology.
struct RatParams {
  double carrier_hz = 0.0;
  double bandwidth_hz = 0.0;
  double alpha = 0.0;            // path-loss exponent
  double pl0_db = 0.0;           // loss at the reference distance
  double shadow_sigma_db = 0.0;  // log-normal shadowing std-dev
  bool operator==(const RatParams&) const = default;
};

/// Two-state on/off Markov chain for the TV primary user, stepped per slot.
struct TvwsOccupancy {
  double p_off_on = 0.05;
  double p_on_off = 0.1;
  double stationary_on() const {
    const double s = p_off_on + p_on_off;
    return s > 0 ? p_off_on / s : 0.0;
  }
  bool operator==(const TvwsOccupancy&) const = default;
};

struct ChannelParams {
  RatParams cellular{2.0e9, 1.0e6, 3.0, 60.0, 8.0};
  RatParams dsrc{5.9e9, 10.0e6, 2.8, 63.0, 4.0};
  RatParams wifi{5.0e9, 20.0e6, 3.2, 62.0, 6.0};
  RatParams tvws{600.0e6, 6.0e6, 2.5, 50.0, 6.0};
  TvwsOccupancy tvws_occupancy;
  double noise_dbm_per_hz = -174.0;
  double reference_distance_m = 10.0;
  double min_distance_m = 1.0;

  const RatParams& params(RatKind rat) const {
    switch (rat) {
      case RatKind::kCellularSubband: return cellular;
      case RatKind::kDsrc: return dsrc;
      case RatKind::kWifiAp: return wifi;
      case RatKind::kTvWhiteSpace: return tvws;
    }
    throw std::logic_error("unknown RAT");
  }
  double noise_w_per_hz() const { return std::pow(10.0, (noise_dbm_per_hz - 30.0) / 10.0); }
  bool operator==(const ChannelParams&) const = default;
};

/// Which non-cellular RATs are offered to the agents. Cellular sub-bands are
/// always present (one per V2I link); Wi-Fi contributes one band per AP.
struct BandCatalogConfig {
  bool dsrc = true;
  bool wifi = true;
  bool tvws = true;
  bool operator==(const BandCatalogConfig&) const = default;
};

struct Band {
  int index = 0;
  RatKind rat = RatKind::kCellularSubband;
  double bandwidth_hz = 0.0;
  double carrier_hz = 0.0;
  std::optional<int> wifi_ap_index;
  std::optional<TvwsOccupancy> tvws_occupancy;
  bool operator==(const Band&) const = default;
};

/// Band order: cellular sub-bands 0..M-1, then DSRC, Wi-Fi (one per AP), TVWS.
inline std::vector<Band> build_band_catalog(int subbands, int wifi_aps, const ChannelParams& params,
                                            const BandCatalogConfig& offered) {
  std::vector<Band> bands;
  auto add = [&](RatKind rat) -> Band& {
    const RatParams& p = params.params(rat);
    if (!(p.bandwidth_hz > 0)) throw std::invalid_argument("band bandwidth must be positive");
    Band b;
    b.index = static_cast<int>(bands.size());
    b.rat = rat;
    b.bandwidth_hz = p.bandwidth_hz;
    b.carrier_hz = p.carrier_hz;
    bands.push_back(b);
    return bands.back();
  };
  for (int m = 0; m < subbands; ++m) add(RatKind::kCellularSubband);
  if (offered.dsrc) add(RatKind::kDsrc);
  if (offered.wifi) {
    for (int a = 0; a < wifi_aps; ++a) add(RatKind::kWifiAp).wifi_ap_index = a;
  }
  if (offered.tvws) add(RatKind::kTvWhiteSpace).tvws_occupancy = params.tvws_occupancy;
  return bands;
}

/// PL(d) = PL0 + 10 alpha log10(d / d0), with d clamped below at min_distance.
inline double path_loss_db(const RatParams& rat, double distance_m, double reference_distance_m = 10.0,
                           double min_distance_m = 1.0) {
  const double d = std::max(distance_m, min_distance_m);
  return rat.pl0_db + 10.0 * rat.alpha * std::log10(d / reference_distance_m);
}

inline double path_loss_db(RatKind rat, double distance_m, const ChannelParams& params) {
  return path_loss_db(params.params(rat), distance_m, params.reference_distance_m, params.min_distance_m);
}

/// Zero-mean Gaussian shadowing in dB.
inline double sample_shadowing(RngStream& rng, double sigma_db) {
  if (sigma_db <= 0.0) return 0.0;
  return sigma_db * rng.normal();
}

/// Rayleigh block fading: unit-mean exponential power gain.
inline double sample_fast_fading(RngStream& rng) { return rng.exponential(); }

struct ChannelGain {
  double path_loss_db = 0.0;
  double shadowing_db = 0.0;
  double fast_fading_db = 0.0;

  double linear() const { return std::pow(10.0, -(path_loss_db + shadowing_db - fast_fading_db) / 10.0); }
  double db() const { return -(path_loss_db + shadowing_db - fast_fading_db); }
};

struct Transmission {
  int transmitter = 0;
  int band = 0;
  double power_w = 0.0;
  double gain = 0.0;  // linear gain from this transmitter to the receiver
};

struct SinrReport {
  double signal_w = 0.0;
  double interference_w = 0.0;
  double noise_w = 0.0;
  double sinr = 0.0;
};

/// SINR at one receiver. Only transmissions on `band` interfere; the entry
/// whose transmitter equals `own_transmitter` is the wanted signal.
inline SinrReport compute_sinr(int own_transmitter, const Band& band, std::span<const Transmission> transmissions,
                               double noise_w_per_hz) {
  SinrReport r;
  r.noise_w = noise_w_per_hz * band.bandwidth_hz;
  bool found = false;
  for (const Transmission& t : transmissions) {
    if (t.power_w < 0) throw std::invalid_argument("negative transmit power");
    if (t.transmitter == own_transmitter) {
      if (found) throw std::invalid_argument("duplicate own-signal entry");
      found = true;
      r.signal_w = t.power_w * t.gain;
    } else if (t.band == band.index) {
      r.interference_w += t.power_w * t.gain;
    }
  }
  if (!found) throw std::invalid_argument("transmission list lacks the receiver's own signal");
  r.sinr = r.signal_w / (r.interference_w + r.noise_w);
  return r;
}

/// Shannon capacity in bits/second.
inline double capacity(double sinr, double bandwidth_hz) { return bandwidth_hz * std::log2(1.0 + sinr); }

/// Whether a V2V link may use `band` right now. `tvws_primary_on` is the
/// sensed state of the TV primary user.
inline bool band_available(const Band& band, const V2vLink& link, const Scenario& scenario, bool tvws_primary_on) {
  switch (band.rat) {
    case RatKind::kCellularSubband:
    case RatKind::kDsrc:
      return true;
    case RatKind::kWifiAp: {
      const WifiAp& ap = scenario.wifi_aps.at(static_cast<std::size_t>(band.wifi_ap_index.value()));
      return pairwise_distance(scenario.vehicle(link.tx).position, ap.position) <= ap.radius &&
             pairwise_distance(scenario.vehicle(link.rx).position, ap.position) <= ap.radius;
    }
    case RatKind::kTvWhiteSpace:
      return !tvws_primary_on;
  }
  return false;
}

inline double dbm_to_w(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double w_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

/// Link gains between every transmitter and receiver on every band.
/// Transmitters: V2V tx 0..K-1, then V2I tx K..K+M-1. Receivers: V2V rx
/// 0..K-1, then the base station at K. Shadowing is drawn once per episode;
/// fast fading is redrawn every slot. Draw counts never depend on actions.
class GainTable {
 public:
  GainTable() = default;
  GainTable(int bands, int agents, int v2i_links)
      : bands_(bands),
        tx_(agents + v2i_links),
        rx_(agents + 1),
        shadowing_db_(size(), 0.0),
        fading_(size(), 1.0),
        path_loss_db_(size(), 0.0) {}

  int bands() const { return bands_; }
  int transmitters() const { return tx_; }
  int receivers() const { return rx_; }

  void draw_shadowing(const std::vector<Band>& catalog, const ChannelParams& params, RngStream& rng) {
    for (int b = 0; b < bands_; ++b) {
      const double sigma = params.params(catalog[static_cast<std::size_t>(b)].rat).shadow_sigma_db;
      for (int t = 0; t < tx_; ++t) {
        for (int r = 0; r < rx_; ++r) shadowing_db_[at(b, t, r)] = sample_shadowing(rng, sigma);
      }
    }
  }

  void draw_fading(RngStream& rng) {
    for (double& f : fading_) f = sample_fast_fading(rng);
  }

  void update_path_loss(const Scenario& s, const std::vector<Band>& catalog, const ChannelParams& params) {
    const int agents = rx_ - 1;
    for (int t = 0; t < tx_; ++t) {
      const Vec2 tp = t < agents ? s.vehicle(s.v2v_links[static_cast<std::size_t>(t)].tx).position
                                 : s.vehicle(s.v2i_links[static_cast<std::size_t>(t - agents)].vehicle).position;
      for (int r = 0; r < rx_; ++r) {
        const Vec2 rp = r < agents ? s.vehicle(s.v2v_links[static_cast<std::size_t>(r)].rx).position : s.base_station;
        const double d = pairwise_distance(tp, rp);
        for (int b = 0; b < bands_; ++b) {
          path_loss_db_[at(b, t, r)] = path_loss_db(catalog[static_cast<std::size_t>(b)].rat, d, params);
        }
      }
    }
  }

  ChannelGain gain(int band, int tx, int rx) const {
    const std::size_t i = at(band, tx, rx);
    return {path_loss_db_[i], shadowing_db_[i], 10.0 * std::log10(fading_[i])};
  }
  double linear(int band, int tx, int rx) const {
    const std::size_t i = at(band, tx, rx);
    return std::pow(10.0, -(path_loss_db_[i] + shadowing_db_[i]) / 10.0) * fading_[i];
  }

  void set_shadowing_db(int band, int tx, int rx, double v) { shadowing_db_[at(band, tx, rx)] = v; }
  void set_fading(int band, int tx, int rx, double v) { fading_[at(band, tx, rx)] = v; }

  bool operator==(const GainTable&) const = default;

 private:
  std::size_t size() const { return static_cast<std::size_t>(bands_ * tx_ * rx_); }
  std::size_t at(int b, int t, int r) const {
    return static_cast<std::size_t>((b * tx_ + t) * rx_ + r);
  }

  int bands_ = 0;
  int tx_ = 0;
  int rx_ = 0;
  std::vector<double> shadowing_db_;
  std::vector<double> fading_;
  std::vector<double> path_loss_db_;
};

}  // namespace hetvnet
