// SPDX-License-Identifier: Apache-2.0
//
// usbf: joint user scheduling and beamforming for multiuser MISO downlink
// Copyright (C) 2026 The usbf authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef USBF_GREEDY_HPP
#define USBF_GREEDY_HPP

#include "usbf/schedule.hpp"

namespace usbf {

struct GreedyResult : Schedule
{
    std::size_t stage1_size = 0; // cardinality after the first greedy expansion
    int set_optimization_rounds = 0;
};

// Per-user SINR targets gamma~ from the config's rate requirement.
RealVector sinr_targets(const SystemConfig &cfg);

// Greedy search with set optimization (two stages).
GreedyResult gusbf(const ChannelSample &sample, const SystemConfig &cfg);

inline constexpr int exhaustive_max_users = 12;

// Largest feasible set by enumeration; ties by smaller power, then lexicographic order.
Schedule exhaustive_oracle(const ChannelSample &sample, const SystemConfig &cfg);

} // namespace usbf

#endif
