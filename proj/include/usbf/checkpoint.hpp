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

#ifndef USBF_CHECKPOINT_HPP
#define USBF_CHECKPOINT_HPP

#include "usbf/cnn_baseline.hpp"
#include "usbf/trainer.hpp"

#include <filesystem>
#include <string>
#include <variant>

namespace usbf {

class CheckpointError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int checkpoint_format_version = 1;

struct TrainingMeta
{
    long steps = 0;
    LagrangeState lag;
    nn::AdamOptions adam;
};

using AnyModel = std::variant<JeeponModel, CnnModel>;

struct Checkpoint
{
    AnyModel model;
    TrainingMeta meta;

    std::string kind() const;
};

// Layout: text header "usbf-model <version>", "key = value" lines, "end", then
// every tensor as little-endian float64. Tensor order per MLP layer: weight
// (out x in, column-major), bias, scale, shift, running mean, running variance.
// JEEPON stores its MLPs layer by layer, message network before update network.
std::string serialize_checkpoint(const Checkpoint &ckpt);
Checkpoint deserialize_checkpoint(const std::string &bytes);

void save_checkpoint(const std::filesystem::path &path, const Checkpoint &ckpt);
Checkpoint load_checkpoint(const std::filesystem::path &path);

} // namespace usbf

#endif
