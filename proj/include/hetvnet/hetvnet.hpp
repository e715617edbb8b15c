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

#include "hetvnet/baselines.hpp"
#include "hetvnet/channel.hpp"
#include "hetvnet/episode.hpp"
#include "hetvnet/harness/config.hpp"
#include "hetvnet/harness/experiment.hpp"
#include "hetvnet/marl/checkpoint.hpp"
#include "hetvnet/marl/dqn.hpp"
#include "hetvnet/marl/observation.hpp"
#include "hetvnet/marl/qnetwork.hpp"
#include "hetvnet/marl/replay_buffer.hpp"
#include "hetvnet/marl/trainer.hpp"
#include "hetvnet/rng.hpp"
#include "hetvnet/topology.hpp"
