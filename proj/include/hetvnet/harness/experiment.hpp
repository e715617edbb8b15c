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
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hetvnet/baselines.hpp"
#include "hetvnet/episode.hpp"
#include "hetvnet/harness/config.hpp"
#include "hetvnet/marl/checkpoint.hpp"
#include "hetvnet/marl/trainer.hpp"
#include "hetvnet/rng.hpp"
#include "hetvnet/topology.hpp"

namespace hetvnet::harness {

struct ResultRow {
  PolicyKind policy = PolicyKind::kRandom;
  std::uint64_t seed = 0;
  long payload_bytes = 0;
  int run = 0;
  double v2i_sum_mbps = 0.0;
  double v2v_success = 0.0;
  double reward = 0.0;
};

struct SummaryRow {
  PolicyKind policy = PolicyKind::kRandom;
  long payload_bytes = 0;
  double v2i_sum_mbps_mean = 0.0;
  double v2i_sum_mbps_std = 0.0;
  double success_mean = 0.0;
  double success_std = 0.0;
  std::size_t n = 0;
};

inline constexpr const char* kResultsHeader = "policy,seed,payload_bytes,run,v2i_sum_mbps,v2v_success,reward";
inline constexpr const char* kSummaryHeader =
    "policy,payload_bytes,v2i_sum_mbps_mean,v2i_sum_mbps_std,success_mean,success_std,n";
inline constexpr const char* kTraceHeader = "policy,seed,payload_bytes,episode,epsilon,reward,successes";

/// Six significant digits, fixed for byte-stable CSVs.
inline std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

/// Writes `content` to `path` through a temporary file and a rename, so
/// readers only ever see a complete file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string results_csv(const std::vector<ResultRow>& rows) {
  std::string s = std::string(kResultsHeader) + "\n";
  for (const ResultRow& r : rows) {
    s += std::string(to_string(r.policy)) + "," + std::to_string(r.seed) + "," + std::to_string(r.payload_bytes) + "," +
         std::to_string(r.run) + "," + fmt6(r.v2i_sum_mbps) + "," + fmt6(r.v2v_success) + "," + fmt6(r.reward) + "\n";
  }
  return s;
}

inline std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string s = std::string(kSummaryHeader) + "\n";
  for (const SummaryRow& r : rows) {
    s += std::string(to_string(r.policy)) + "," + std::to_string(r.payload_bytes) + "," + fmt6(r.v2i_sum_mbps_mean) +
         "," + fmt6(r.v2i_sum_mbps_std) + "," + fmt6(r.success_mean) + "," + fmt6(r.success_std) + "," +
         std::to_string(r.n) + "\n";
  }
  return s;
}

namespace detail {
inline void mean_std(const std::vector<double>& xs, double& mean, double& sd) {
  mean = 0.0;
  sd = 0.0;
  if (xs.empty()) return;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
}
}  // namespace detail

/// Mean and sample standard deviation per (policy, payload), in the order
/// the pairs first appear among the rows.
inline std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  std::vector<SummaryRow> out;
  std::vector<std::pair<PolicyKind, long>> keys;
  for (const ResultRow& r : rows) {
    const std::pair<PolicyKind, long> key{r.policy, r.payload_bytes};
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  }
  for (const auto& [policy, payload] : keys) {
    std::vector<double> v2i;
    std::vector<double> success;
    for (const ResultRow& r : rows) {
      if (r.policy == policy && r.payload_bytes == payload) {
        v2i.push_back(r.v2i_sum_mbps);
        success.push_back(r.v2v_success);
      }
    }
    SummaryRow s;
    s.policy = policy;
    s.payload_bytes = payload;
    s.n = v2i.size();
    detail::mean_std(v2i, s.v2i_sum_mbps_mean, s.v2i_sum_mbps_std);
    detail::mean_std(success, s.success_mean, s.success_std);
    out.push_back(s);
  }
  return out;
}

inline std::shared_ptr<const EnvContext> make_context(const ExperimentConfig& c, long payload_bytes) {
  EpisodeConfig episode = c.episode;
  episode.payload_bytes = payload_bytes;
  return hetvnet::make_context(c.scenario, c.channel, c.bands, episode);
}

/// Training scenarios depend only on (seed, episode); evaluation scenarios
/// only on (seed, run). Every policy and payload therefore sees the same worlds.
inline marl::ScenarioGenerator training_scenarios(const ScenarioConfig& config, std::uint64_t seed) {
  return [config, seed](int episode) {
    return spawn_scenario(config, RngStream::derive(seed, StreamPurpose::kTrainEpisode,
                                                    {static_cast<std::uint64_t>(episode), 0xC0FFEEULL})
                                      .next());
  };
}

inline Scenario evaluation_scenario(const ScenarioConfig& config, std::uint64_t seed, int run) {
  return spawn_scenario(config,
                        RngStream::derive(seed, StreamPurpose::kEvalEpisode, {static_cast<std::uint64_t>(run), 0xC0FFEEULL})
                            .next());
}

inline EpisodeStreams evaluation_streams(std::uint64_t seed, int run) {
  return EpisodeStreams::derive(seed, StreamPurpose::kEvalEpisode, static_cast<std::uint64_t>(run));
}

inline marl::Coordination coordination(PolicyKind p) {
  return p == PolicyKind::kSarl ? marl::Coordination::kSharedSequential : marl::Coordination::kIndependent;
}

inline marl::TrainResult train_cell(const ExperimentConfig& c, PolicyKind policy, long payload, std::uint64_t seed) {
  if (!is_learning(policy)) throw std::invalid_argument("policy does not learn");
  return marl::train_agents(coordination(policy), training_scenarios(c.scenario, seed), make_context(c, payload),
                            c.scenario.v2v_links, c.train, seed);
}

/// Evaluates one cell over the replicate count. `networks` is used only by
/// learning policies.
inline std::vector<ResultRow> evaluate_cell(const ExperimentConfig& c, PolicyKind policy, long payload,
                                            std::uint64_t seed, const std::vector<marl::Net>& networks) {
  const auto ctx = make_context(c, payload);
  std::vector<ResultRow> rows;
  for (int run = 0; run < c.replicates; ++run) {
    const Scenario scenario = evaluation_scenario(c.scenario, seed, run);
    EpisodeStreams streams = evaluation_streams(seed, run);
    EpisodeMetrics m;
    switch (policy) {
      case PolicyKind::kMarl:
      case PolicyKind::kSarl:
        m = run_episode(marl::QPolicy(networks, coordination(policy), c.train.observation), scenario, ctx, streams);
        break;
      case PolicyKind::kRandom:
        m = run_episode(RandomPolicy(RngStream::derive(seed, StreamPurpose::kPolicy,
                                                       {static_cast<std::uint64_t>(payload), static_cast<std::uint64_t>(run)})),
                        scenario, ctx, streams);
        break;
      case PolicyKind::kGreedy:
        m = run_episode(GreedyPolicy{}, scenario, ctx, streams);
        break;
    }
    rows.push_back({policy, seed, payload, run, m.v2i_sum_capacity_bps / 1e6, m.success_fraction(), m.cumulative_reward});
  }
  return rows;
}

inline std::filesystem::path checkpoint_path(const std::filesystem::path& out_dir, PolicyKind policy, long payload,
                                             std::uint64_t seed, std::size_t net) {
  return out_dir / "checkpoints" /
         (std::string(to_string(policy)) + "_payload" + std::to_string(payload) + "_seed" + std::to_string(seed) +
          "_net" + std::to_string(net) + ".qnet");
}

inline std::vector<marl::Net> load_networks(const std::filesystem::path& out_dir, PolicyKind policy, long payload,
                                            std::uint64_t seed, std::size_t count) {
  std::vector<marl::Net> nets;
  for (std::size_t i = 0; i < count; ++i) {
    const auto path = checkpoint_path(out_dir, policy, payload, seed, i);
    std::ifstream in(path);
    if (!in) throw std::runtime_error("missing checkpoint " + path.string() + " (run `train` first)");
    nets.push_back(marl::read_checkpoint<float>(in));
  }
  return nets;
}

enum class Stage { kTrain, kEval, kSweep };

struct RunOptions {
  Stage stage = Stage::kSweep;
  std::filesystem::path output_dir;
  std::ostream* log = nullptr;
  int threads = 0;  // 0: HETVNET_THREADS, else hardware concurrency
};

struct ExperimentOutput {
  std::vector<ResultRow> results;
  std::vector<SummaryRow> summary;
};

inline int thread_budget(int requested, std::size_t cells) {
  int n = requested;
  if (n <= 0) {
    if (const char* env = std::getenv("HETVNET_THREADS"); env && *env) n = std::atoi(env);
  }
  if (n <= 0) n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return std::clamp(n, 1, static_cast<int>(std::max<std::size_t>(cells, 1)));
}

/// Runs every (policy, payload, seed) cell: trains learning policies (train
/// and sweep stages), evaluates (eval and sweep stages) and writes
/// results.csv, summary.csv, train_trace.csv and checkpoints atomically.
inline ExperimentOutput run_experiment(const ExperimentConfig& c, const RunOptions& options) {
  validate(c);
  const std::filesystem::path out_dir = options.output_dir.empty() ? std::filesystem::path(c.output_dir) : options.output_dir;
  std::filesystem::create_directories(out_dir);

  struct Cell {
    PolicyKind policy;
    long payload;
    std::uint64_t seed;
    std::vector<ResultRow> rows;
    std::vector<marl::EpisodeTrace> trace;
    std::vector<marl::Net> networks;
  };
  std::vector<Cell> cells;
  for (PolicyKind p : c.policies) {
    for (long payload : c.payloads) {
      for (std::uint64_t seed : c.seeds) cells.push_back({p, payload, seed, {}, {}, {}});
    }
  }

  const bool train = options.stage != Stage::kEval;
  const bool eval = options.stage != Stage::kTrain;
  std::mutex log_mutex;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      Cell& cell = cells[i];
      try {
        if (is_learning(cell.policy)) {
          if (train) {
            marl::TrainResult tr = train_cell(c, cell.policy, cell.payload, cell.seed);
            cell.trace = std::move(tr.trace);
            cell.networks = std::move(tr.networks);
            for (std::size_t n = 0; n < cell.networks.size(); ++n) {
              write_file_atomic(checkpoint_path(out_dir, cell.policy, cell.payload, cell.seed, n),
                                marl::to_checkpoint_string(cell.networks[n]));
            }
          } else {
            const std::size_t count = cell.policy == PolicyKind::kMarl ? static_cast<std::size_t>(c.scenario.v2v_links) : 1;
            cell.networks = load_networks(out_dir, cell.policy, cell.payload, cell.seed, count);
          }
        }
        if (eval) cell.rows = evaluate_cell(c, cell.policy, cell.payload, cell.seed, cell.networks);
        cell.networks.clear();
        if (options.log) {
          std::lock_guard lock(log_mutex);
          *options.log << "[" << to_string(cell.policy) << " payload=" << cell.payload << " seed=" << cell.seed
                       << "] done\n";
        }
      } catch (...) {
        std::lock_guard lock(log_mutex);
        if (!failure) failure = std::current_exception();
        next = cells.size();
      }
    }
  };
  const int threads = thread_budget(options.threads, cells.size());
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentOutput out;
  if (train) {
    std::string trace = std::string(kTraceHeader) + "\n";
    for (const Cell& cell : cells) {
      for (const auto& e : cell.trace) {
        trace += std::string(to_string(cell.policy)) + "," + std::to_string(cell.seed) + "," +
                 std::to_string(cell.payload) + "," + std::to_string(e.episode) + "," + fmt6(e.epsilon) + "," +
                 fmt6(e.cumulative_reward) + "," + std::to_string(e.successes) + "\n";
      }
    }
    write_file_atomic(out_dir / "train_trace.csv", trace);
  }
  if (eval) {
    for (Cell& cell : cells) out.results.insert(out.results.end(), cell.rows.begin(), cell.rows.end());
    out.summary = summarize(out.results);
    write_file_atomic(out_dir / "results.csv", results_csv(out.results));
    write_file_atomic(out_dir / "summary.csv", summary_csv(out.summary));
  }
  return out;
}

}  // namespace hetvnet::harness
