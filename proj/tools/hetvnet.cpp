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

// Command-line front end: train, eval, sweep, validate-config.
//
// Exit codes: 0 success, 1 usage error, 2 config error, 3 runtime failure.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hetvnet/harness/config.hpp"
#include "hetvnet/harness/experiment.hpp"

namespace {

constexpr int kUsageError = 1;
constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

struct Args {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string policy;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Args& args, bool run_options) {
  cmd->add_option("--config", args.config, "Experiment config file (key = value lines)")->required();
  if (!run_options) return;
  cmd->add_option("--seed", args.seed, "Run a single seed instead of the configured list");
  cmd->add_option("--out", args.out, "Output directory (overrides experiment.output_dir)");
  cmd->add_option("--policy", args.policy, "Restrict to one policy")
      ->check(CLI::IsMember({"marl", "sarl", "random", "greedy"}));
  cmd->add_flag("--quiet", args.quiet, "Suppress per-cell progress lines");
}

int run(const std::string& command, const Args& args) {
  hetvnet::harness::ExperimentConfig config;
  try {
    config = hetvnet::harness::load_config(args.config);
    if (args.seed) config.seeds = {*args.seed};
    if (!args.policy.empty()) config.policies = {*hetvnet::parse_policy(args.policy)};
    if (!args.out.empty()) config.output_dir = args.out;
    hetvnet::harness::validate(config);
  } catch (const hetvnet::harness::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  }
  if (command == "validate-config") {
    std::cout << "OK\n";
    return 0;
  }

  hetvnet::harness::RunOptions options;
  options.stage = command == "train"  ? hetvnet::harness::Stage::kTrain
                  : command == "eval" ? hetvnet::harness::Stage::kEval
                                      : hetvnet::harness::Stage::kSweep;
  options.output_dir = config.output_dir;
  options.log = args.quiet ? nullptr : &std::cerr;
  try {
    hetvnet::harness::run_experiment(config, options);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heterogeneous vehicular network spectrum-access simulator with multi-agent DQN"};
  app.require_subcommand(1);
  Args args;
  CLI::App* train = app.add_subcommand("train", "Train learning policies and write checkpoints");
  CLI::App* eval = app.add_subcommand("eval", "Evaluate policies (learning policies load checkpoints)");
  CLI::App* sweep = app.add_subcommand("sweep", "Train and evaluate over the payload sweep");
  CLI::App* check = app.add_subcommand("validate-config", "Parse and validate a config file");
  for (CLI::App* cmd : {train, eval, sweep}) add_common(cmd, args, true);
  add_common(check, args, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kUsageError;
  }
  for (CLI::App* cmd : {train, eval, sweep, check}) {
    if (cmd->parsed()) return run(cmd->get_name(), args);
  }
  std::cerr << app.help();
  return kUsageError;
}
