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
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "hetvnet/rng.hpp"

namespace hetvnet {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Vec2&) const = default;
};

/// Euclidean distance in meters.
inline double pairwise_distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct Vehicle {
  int id = 0;
  Vec2 position;
  double speed = 0.0;  // m/s
  Vec2 heading;        // axis-aligned unit vector
  bool operator==(const Vehicle&) const = default;
};

/// Manhattan grid on a torus: roads run along every multiple of
/// lane_spacing in both axes, coordinates wrap at width/height.
struct Grid {
  double width = 250.0;
  double height = 250.0;
  double lane_spacing = 50.0;
  bool operator==(const Grid&) const = default;
};

struct WifiAp {
  Vec2 position;
  double radius = 100.0;
  bool operator==(const WifiAp&) const = default;
};

struct V2iLink {
  int vehicle = 0;
  int subband = 0;
  bool operator==(const V2iLink&) const = default;
};

struct V2vLink {
  int tx = 0;
  int rx = 0;
  bool operator==(const V2vLink&) const = default;
};

struct TurnProbabilities {
  double left = 0.25;
  double right = 0.25;
  bool operator==(const TurnProbabilities&) const = default;
};

struct ScenarioConfig {
  int vehicles = 20;
  int v2v_links = 4;  // K agents
  int v2i_links = 4;  // M, also the number of cellular sub-bands
  int wifi_aps = 3;
  double wifi_radius = 100.0;
  Grid grid;
  double speed_min = 10.0;
  double speed_max = 15.0;
  TurnProbabilities turns;
  bool operator==(const ScenarioConfig&) const = default;
};

struct Scenario {
  std::vector<Vehicle> vehicles;
  Vec2 base_station;
  std::vector<WifiAp> wifi_aps;
  std::vector<V2iLink> v2i_links;
  std::vector<V2vLink> v2v_links;
  Grid grid;
  TurnProbabilities turns;

  const Vehicle& vehicle(int id) const { return vehicles.at(static_cast<std::size_t>(id)); }
  int agents() const { return static_cast<int>(v2v_links.size()); }
  bool operator==(const Scenario&) const = default;
};

inline void validate(const ScenarioConfig& config) {
  if (config.v2v_links < 1) throw std::invalid_argument("scenario needs at least one V2V link");
  if (config.v2i_links < 1) throw std::invalid_argument("scenario needs at least one V2I link");
  if (config.wifi_aps < 0) throw std::invalid_argument("negative Wi-Fi AP count");
  if (config.vehicles < std::max(2 * config.v2v_links, config.v2i_links)) {
    throw std::invalid_argument("vehicle count " + std::to_string(config.vehicles) +
                                " cannot supply " + std::to_string(config.v2v_links) +
                                " disjoint V2V pairs and " + std::to_string(config.v2i_links) +
                                " V2I links");
  }
  const Grid& g = config.grid;
  if (!(g.width > 0 && g.height > 0 && g.lane_spacing > 0) || g.lane_spacing > std::min(g.width, g.height)) {
    throw std::invalid_argument("invalid grid geometry");
  }
  if (config.speed_min < 0 || config.speed_max < config.speed_min) {
    throw std::invalid_argument("invalid speed range");
  }
  const auto& t = config.turns;
  if (t.left < 0 || t.right < 0 || t.left + t.right > 1) throw std::invalid_argument("invalid turn probabilities");
}

namespace detail {

inline double wrap(double v, double extent) {
  double r = std::fmod(v, extent);
  if (r < 0) r += extent;
  if (r >= extent) r = 0.0;
  return r;
}

inline int road_count(double extent, double spacing) {
  return std::max(1, static_cast<int>(std::ceil(extent / spacing - 1e-9)));
}

template <typename T>
void shuffle(std::vector<T>& v, RngStream& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.index(i)]);
  }
}

}  // namespace detail

/// Drops vehicles on lanes, places infrastructure and pairs links. The
/// result is a pure function of (config, seed).
inline Scenario spawn_scenario(const ScenarioConfig& config, std::uint64_t seed) {
  validate(config);
  RngStream rng = RngStream::derive(seed, StreamPurpose::kSpawn);
  const Grid& g = config.grid;

  Scenario s;
  s.grid = g;
  s.turns = config.turns;
  s.base_station = {g.width / 2.0, g.height / 2.0};

  const int horizontal_roads = detail::road_count(g.height, g.lane_spacing);
  const int vertical_roads = detail::road_count(g.width, g.lane_spacing);
  s.vehicles.reserve(static_cast<std::size_t>(config.vehicles));
  for (int id = 0; id < config.vehicles; ++id) {
    Vehicle v;
    v.id = id;
    const bool horizontal = rng.bernoulli(0.5);
    const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
    if (horizontal) {
      const auto road = static_cast<double>(rng.index(static_cast<std::uint64_t>(horizontal_roads)));
      v.position = {rng.uniform(0.0, g.width), road * g.lane_spacing};
      v.heading = {sign, 0.0};
    } else {
      const auto road = static_cast<double>(rng.index(static_cast<std::uint64_t>(vertical_roads)));
      v.position = {road * g.lane_spacing, rng.uniform(0.0, g.height)};
      v.heading = {0.0, sign};
    }
    v.speed = rng.uniform(config.speed_min, config.speed_max);
    s.vehicles.push_back(v);
  }

  for (int a = 0; a < config.wifi_aps; ++a) {
    s.wifi_aps.push_back({{rng.uniform(0.0, g.width), rng.uniform(0.0, g.height)}, config.wifi_radius});
  }

  // V2V: random transmitters, each paired with its nearest unused vehicle.
  std::vector<int> order(static_cast<std::size_t>(config.vehicles));
  std::iota(order.begin(), order.end(), 0);
  detail::shuffle(order, rng);
  std::vector<bool> used(order.size(), false);
  const auto k_links = static_cast<std::size_t>(config.v2v_links);
  for (std::size_t i = 0; i < k_links; ++i) used[static_cast<std::size_t>(order[i])] = true;
  for (std::size_t i = 0; i < k_links; ++i) {
    const int tx = order[i];
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (const Vehicle& cand : s.vehicles) {
      if (used[static_cast<std::size_t>(cand.id)]) continue;
      const double d = pairwise_distance(s.vehicle(tx).position, cand.position);
      if (d < best_d) {
        best_d = d;
        best = cand.id;
      }
    }
    used[static_cast<std::size_t>(best)] = true;
    s.v2v_links.push_back({tx, best});
  }

  // V2I: prefer vehicles that are not V2V endpoints; one sub-band each.
  std::vector<int> free_ids;
  std::vector<int> busy_ids;
  for (int id = 0; id < config.vehicles; ++id) {
    (used[static_cast<std::size_t>(id)] ? busy_ids : free_ids).push_back(id);
  }
  detail::shuffle(free_ids, rng);
  detail::shuffle(busy_ids, rng);
  free_ids.insert(free_ids.end(), busy_ids.begin(), busy_ids.end());
  for (int m = 0; m < config.v2i_links; ++m) {
    s.v2i_links.push_back({free_ids[static_cast<std::size_t>(m)], m});
  }
  return s;
}

/// Advances every vehicle by speed * dt along its lane. Crossing an
/// intersection draws a turn (left / right / straight); coordinates wrap at
/// the grid bounds. Speeds and link assignments are untouched.
inline Scenario step_mobility(const Scenario& scenario, double dt, RngStream& rng) {
  if (dt < 0) throw std::invalid_argument("negative mobility step");
  Scenario next = scenario;
  const Grid& g = scenario.grid;
  const double spacing = g.lane_spacing;
  for (Vehicle& v : next.vehicles) {
    double remaining = v.speed * dt;
    int guard = 0;
    while (remaining > 0.0 && guard++ < 100000) {
      const bool along_x = v.heading.x != 0.0;
      double& coord = along_x ? v.position.x : v.position.y;
      const double extent = along_x ? g.width : g.height;
      const double dir = along_x ? v.heading.x : v.heading.y;

      const double cell = coord / spacing;
      double boundary;
      if (dir > 0) {
        boundary = (std::floor(cell) + 1.0) * spacing;
      } else {
        const double c = std::ceil(cell);
        boundary = (c == cell ? c - 1.0 : std::floor(cell)) * spacing;
      }
      const double gap = std::abs(boundary - coord);
      if (remaining < gap) {
        coord = detail::wrap(coord + dir * remaining, extent);
        remaining = 0.0;
        break;
      }
      remaining -= gap;
      coord = detail::wrap(boundary, extent);
      const double u = rng.uniform();
      const Vec2 h = v.heading;
      if (u < scenario.turns.left) {
        v.heading = {-h.y, h.x};
      } else if (u < scenario.turns.left + scenario.turns.right) {
        v.heading = {h.y, -h.x};
      }
    }
  }
  return next;
}

}  // namespace hetvnet
