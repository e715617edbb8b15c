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
#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "hetvnet/baselines.hpp"
#include "hetvnet/channel.hpp"
#include "hetvnet/episode.hpp"
#include "hetvnet/marl/trainer.hpp"
#include "hetvnet/topology.hpp"

namespace hetvnet::harness {

/// Invalid configuration. `key` is the dotted key path; `line` is 1-based,
/// 0 when the problem is not tied to a line (e.g. a missing key).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, int line, const std::string& what)
      : std::runtime_error(format(key, line, what)), key_(std::move(key)), line_(line) {}
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  static std::string format(const std::string& key, int line, const std::string& what) {
    std::string s = "config error";
    if (line > 0) s += " at line " + std::to_string(line);
    if (!key.empty()) s += " [" + key + "]";
    return s + ": " + what;
  }
  std::string key_;
  int line_;
};

struct ExperimentConfig {
  ScenarioConfig scenario;
  ChannelParams channel;
  BandCatalogConfig bands;
  EpisodeConfig episode;
  marl::TrainConfig train;
  std::vector<PolicyKind> policies;
  std::vector<long> payloads{1060, 2120, 3180, 4240, 5300, 6360};
  std::vector<std::uint64_t> seeds;
  int replicates = 100;
  std::string output_dir = "results";
  bool operator==(const ExperimentConfig&) const = default;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  if (out.size() == 1 && out.front().empty()) out.clear();
  return out;
}

template <typename T>
T parse_number(const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) throw std::invalid_argument("expected a number, got '" + text + "'");
  return value;
}

inline bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw std::invalid_argument("expected true/false, got '" + text + "'");
}

template <typename T>
std::string format_number(T value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& fmt) {
  std::string s;
  for (std::size_t i = 0; i < items.size(); ++i) s += (i ? ", " : "") + fmt(items[i]);
  return s;
}

struct Field {
  std::string key;
  bool required = false;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename T, typename Access>
Field number(std::string key, Access access) {
  return {std::move(key), false,
          [access](ExperimentConfig& c, const std::string& v) { access(c) = parse_number<T>(v); },
          [access](const ExperimentConfig& c) { return format_number<T>(access(const_cast<ExperimentConfig&>(c))); }};
}

template <typename Access>
Field boolean(std::string key, Access access) {
  return {std::move(key), false, [access](ExperimentConfig& c, const std::string& v) { access(c) = parse_bool(v); },
          [access](const ExperimentConfig& c) {
            return std::string(access(const_cast<ExperimentConfig&>(c)) ? "true" : "false");
          }};
}

template <typename T, typename Access>
Field number_list(std::string key, Access access) {
  return {std::move(key), false,
          [access](ExperimentConfig& c, const std::string& v) {
            std::vector<T> out;
            for (const auto& item : split_list(v)) out.push_back(parse_number<T>(item));
            access(c) = std::move(out);
          },
          [access](const ExperimentConfig& c) {
            return join(access(const_cast<ExperimentConfig&>(c)), [](T x) { return format_number<T>(x); });
          }};
}

inline void add_rat(std::vector<Field>& f, const std::string& name, RatParams ChannelParams::*member) {
  const std::string p = "channel." + name + ".";
  f.push_back(number<double>(p + "carrier_hz", [member](ExperimentConfig& c) -> double& { return (c.channel.*member).carrier_hz; }));
  f.push_back(number<double>(p + "bandwidth_hz", [member](ExperimentConfig& c) -> double& { return (c.channel.*member).bandwidth_hz; }));
  f.push_back(number<double>(p + "alpha", [member](ExperimentConfig& c) -> double& { return (c.channel.*member).alpha; }));
  f.push_back(number<double>(p + "pl0_db", [member](ExperimentConfig& c) -> double& { return (c.channel.*member).pl0_db; }));
  f.push_back(number<double>(p + "shadow_sigma_db", [member](ExperimentConfig& c) -> double& { return (c.channel.*member).shadow_sigma_db; }));
}

#define HETVNET_FIELD(expr) [](ExperimentConfig& c) -> auto& { return expr; }

inline const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(number<int>("scenario.vehicles", HETVNET_FIELD(c.scenario.vehicles)));
    f.push_back(number<int>("scenario.v2v_links", HETVNET_FIELD(c.scenario.v2v_links)));
    f.push_back(number<int>("scenario.v2i_links", HETVNET_FIELD(c.scenario.v2i_links)));
    f.push_back(number<int>("scenario.wifi_aps", HETVNET_FIELD(c.scenario.wifi_aps)));
    f.push_back(number<double>("scenario.wifi_radius_m", HETVNET_FIELD(c.scenario.wifi_radius)));
    f.push_back(number<double>("scenario.grid_width_m", HETVNET_FIELD(c.scenario.grid.width)));
    f.push_back(number<double>("scenario.grid_height_m", HETVNET_FIELD(c.scenario.grid.height)));
    f.push_back(number<double>("scenario.lane_spacing_m", HETVNET_FIELD(c.scenario.grid.lane_spacing)));
    f.push_back(number<double>("scenario.speed_min", HETVNET_FIELD(c.scenario.speed_min)));
    f.push_back(number<double>("scenario.speed_max", HETVNET_FIELD(c.scenario.speed_max)));
    f.push_back(number<double>("scenario.turn_left", HETVNET_FIELD(c.scenario.turns.left)));
    f.push_back(number<double>("scenario.turn_right", HETVNET_FIELD(c.scenario.turns.right)));

    f.push_back(boolean("bands.dsrc", HETVNET_FIELD(c.bands.dsrc)));
    f.push_back(boolean("bands.wifi", HETVNET_FIELD(c.bands.wifi)));
    f.push_back(boolean("bands.tvws", HETVNET_FIELD(c.bands.tvws)));

    add_rat(f, "cellular", &ChannelParams::cellular);
    add_rat(f, "dsrc", &ChannelParams::dsrc);
    add_rat(f, "wifi", &ChannelParams::wifi);
    add_rat(f, "tvws", &ChannelParams::tvws);
    f.push_back(number<double>("channel.tvws.p_off_on", HETVNET_FIELD(c.channel.tvws_occupancy.p_off_on)));
    f.push_back(number<double>("channel.tvws.p_on_off", HETVNET_FIELD(c.channel.tvws_occupancy.p_on_off)));
    f.push_back(number<double>("channel.noise_dbm_per_hz", HETVNET_FIELD(c.channel.noise_dbm_per_hz)));
    f.push_back(number<double>("channel.reference_distance_m", HETVNET_FIELD(c.channel.reference_distance_m)));
    f.push_back(number<double>("channel.min_distance_m", HETVNET_FIELD(c.channel.min_distance_m)));

    f.push_back(number<double>("episode.slot_s", HETVNET_FIELD(c.episode.slot_s)));
    f.push_back(number<int>("episode.slots", HETVNET_FIELD(c.episode.slots)));
    f.push_back(number<int>("episode.chunk_bytes", HETVNET_FIELD(c.episode.chunk_bytes)));
    f.push_back(number<double>("episode.sinr_min", HETVNET_FIELD(c.episode.sinr_min)));
    f.push_back(number_list<double>("episode.powers_dbm", HETVNET_FIELD(c.episode.powers_dbm)));
    f.push_back(number<double>("episode.v2i_power_dbm", HETVNET_FIELD(c.episode.v2i_power_dbm)));

    f.push_back({"reward.mode", false,
                 [](ExperimentConfig& c, const std::string& v) {
                   if (v == "shaped") {
                     c.episode.reward.mode = RewardMode::kShaped;
                   } else if (v == "strict") {
                     c.episode.reward.mode = RewardMode::kStrict;
                   } else {
                     throw std::invalid_argument("expected shaped or strict, got '" + v + "'");
                   }
                 },
                 [](const ExperimentConfig& c) {
                   return std::string(c.episode.reward.mode == RewardMode::kShaped ? "shaped" : "strict");
                 }});
    f.push_back(number<double>("reward.lambda_v2i", HETVNET_FIELD(c.episode.reward.lambda_v2i)));
    f.push_back(number<double>("reward.lambda_v2v", HETVNET_FIELD(c.episode.reward.lambda_v2v)));
    f.push_back(number<double>("reward.beta", HETVNET_FIELD(c.episode.reward.beta)));

    f.push_back(number<double>("train.learning_rate", HETVNET_FIELD(c.train.learning_rate)));
    f.push_back(number<double>("train.gamma", HETVNET_FIELD(c.train.gamma)));
    f.push_back(number<std::size_t>("train.replay_capacity", HETVNET_FIELD(c.train.replay_capacity)));
    f.push_back(number<std::size_t>("train.batch_size", HETVNET_FIELD(c.train.batch_size)));
    f.push_back(number<int>("train.target_period", HETVNET_FIELD(c.train.target_period)));
    f.push_back(number<double>("train.epsilon_start", HETVNET_FIELD(c.train.epsilon.start)));
    f.push_back(number<double>("train.epsilon_end", HETVNET_FIELD(c.train.epsilon.end)));
    f.push_back(number<int>("train.epsilon_decay_episodes", HETVNET_FIELD(c.train.epsilon.decay_episodes)));
    f.push_back(number<int>("train.episodes", HETVNET_FIELD(c.train.episodes)));
    f.push_back(number<int>("train.update_period", HETVNET_FIELD(c.train.update_period)));
    f.push_back(number<double>("train.grad_clip", HETVNET_FIELD(c.train.grad_clip)));
    f.push_back(number_list<int>("train.hidden", HETVNET_FIELD(c.train.hidden)));

    f.push_back(number<double>("observation.gain_min_db", HETVNET_FIELD(c.train.observation.gain_min_db)));
    f.push_back(number<double>("observation.gain_max_db", HETVNET_FIELD(c.train.observation.gain_max_db)));
    f.push_back(number<double>("observation.interference_min_dbm", HETVNET_FIELD(c.train.observation.interference_min_dbm)));
    f.push_back(number<double>("observation.interference_max_dbm", HETVNET_FIELD(c.train.observation.interference_max_dbm)));

    Field policies{"experiment.policies", true,
                   [](ExperimentConfig& c, const std::string& v) {
                     c.policies.clear();
                     for (const auto& name : split_list(v)) {
                       const auto p = parse_policy(name);
                       if (!p) throw std::invalid_argument("unknown policy '" + name + "'");
                       c.policies.push_back(*p);
                     }
                   },
                   [](const ExperimentConfig& c) {
                     return join(c.policies, [](PolicyKind p) { return std::string(to_string(p)); });
                   }};
    f.push_back(std::move(policies));
    f.push_back(number_list<long>("experiment.payloads", HETVNET_FIELD(c.payloads)));
    Field seeds = number_list<std::uint64_t>("experiment.seeds", HETVNET_FIELD(c.seeds));
    seeds.required = true;
    f.push_back(std::move(seeds));
    f.push_back(number<int>("experiment.replicates", HETVNET_FIELD(c.replicates)));
    f.push_back({"experiment.output_dir", false, [](ExperimentConfig& c, const std::string& v) { c.output_dir = v; },
                 [](const ExperimentConfig& c) { return c.output_dir; }});
    return f;
  }();
  return table;
}

#undef HETVNET_FIELD

}  // namespace detail

/// Checks cross-field invariants. `lines` maps keys to the line that set them.
inline void validate(const ExperimentConfig& c, const std::map<std::string, int>& lines = {}) {
  auto fail = [&](const std::string& key, const std::string& what) {
    const auto it = lines.find(key);
    throw ConfigError(key, it == lines.end() ? 0 : it->second, what);
  };
  if (c.policies.empty()) fail("experiment.policies", "at least one policy is required");
  if (c.seeds.empty()) fail("experiment.seeds", "at least one seed is required");
  if (std::set<std::uint64_t>(c.seeds.begin(), c.seeds.end()).size() != c.seeds.size()) {
    fail("experiment.seeds", "seeds must be distinct");
  }
  if (c.payloads.empty()) fail("experiment.payloads", "at least one payload value is required");
  for (long p : c.payloads) {
    if (p <= 0) fail("experiment.payloads", "payload values must be positive, got " + std::to_string(p));
  }
  if (c.replicates < 1) fail("experiment.replicates", "must be at least 1");
  if (c.episode.slots < 1) fail("episode.slots", "must be at least 1");
  if (!(c.episode.slot_s > 0)) fail("episode.slot_s", "must be positive");
  if (c.episode.chunk_bytes < 1) fail("episode.chunk_bytes", "must be positive");
  if (c.episode.powers_dbm.empty()) fail("episode.powers_dbm", "power catalog must not be empty");
  for (const char* rat : {"cellular", "dsrc", "wifi", "tvws"}) {
    const RatKind kind = rat == std::string_view("cellular") ? RatKind::kCellularSubband
                         : rat == std::string_view("dsrc")   ? RatKind::kDsrc
                         : rat == std::string_view("wifi")   ? RatKind::kWifiAp
                                                             : RatKind::kTvWhiteSpace;
    if (!(c.channel.params(kind).bandwidth_hz > 0)) fail(std::string("channel.") + rat + ".bandwidth_hz", "must be positive");
    if (c.channel.params(kind).shadow_sigma_db < 0) fail(std::string("channel.") + rat + ".shadow_sigma_db", "must be non-negative");
  }
  const auto prob = [](double p) { return p >= 0 && p <= 1; };
  if (!prob(c.channel.tvws_occupancy.p_off_on)) fail("channel.tvws.p_off_on", "must lie in [0, 1]");
  if (!prob(c.channel.tvws_occupancy.p_on_off)) fail("channel.tvws.p_on_off", "must lie in [0, 1]");
  if (c.train.gamma < 0 || c.train.gamma > 1) fail("train.gamma", "must lie in [0, 1]");
  if (!prob(c.train.epsilon.start)) fail("train.epsilon_start", "must lie in [0, 1]");
  if (!prob(c.train.epsilon.end)) fail("train.epsilon_end", "must lie in [0, 1]");
  try {
    hetvnet::validate(c.scenario);
  } catch (const std::invalid_argument& e) {
    fail("scenario", e.what());
  }
  try {
    marl::validate(c.train);
  } catch (const std::invalid_argument& e) {
    fail("train", e.what());
  }
}

/// Parses the flat `key = value` format; `#` starts a comment.
inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::map<std::string, int> lines;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = detail::trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("", line_no, "expected 'key = value'");
    const std::string key = detail::trim(std::string_view(line).substr(0, eq));
    const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
    const auto& table = detail::fields();
    const auto it = std::find_if(table.begin(), table.end(), [&](const detail::Field& f) { return f.key == key; });
    if (it == table.end()) throw ConfigError(key, line_no, "unknown key");
    if (lines.contains(key)) throw ConfigError(key, line_no, "duplicate key (first set at line " + std::to_string(lines[key]) + ")");
    try {
      it->set(c, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key, line_no, e.what());
    }
    lines[key] = line_no;
  }
  for (const auto& f : detail::fields()) {
    if (f.required && !lines.contains(f.key)) throw ConfigError(f.key, 0, "missing required key");
  }
  validate(c, lines);
  return c;
}

inline ExperimentConfig parse_config(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot open config file '" + path + "'");
  return parse_config(in);
}

/// Every key with its current value, in canonical order.
inline std::string serialize(const ExperimentConfig& c) {
  std::string out;
  for (const auto& f : detail::fields()) out += f.key + " = " + f.get(c) + "\n";
  return out;
}

}  // namespace hetvnet::harness
