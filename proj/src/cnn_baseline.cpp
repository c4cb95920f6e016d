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

#include "usbf/cnn_baseline.hpp"

#include <stdexcept>

namespace usbf {

CnnModel CnnModel::make(const CnnConfig &cfg, std::uint64_t seed)
{
    if (cfg.chain.size() < 2 || cfg.chain.front() != 3 || cfg.chain.back() != 2)
        throw std::invalid_argument("CnnModel::make: chain must start at 3 inputs and end at 2 outputs");
    if (cfg.kernel_size != 1)
        throw std::invalid_argument("CnnModel::make: only kernel size 1 is supported");
    CnnModel m;
    m.config = cfg;
    Rng rng(seed);
    m.net = nn::Mlp::make(cfg.chain, true, true, rng);
    return m;
}

CnnModel CnnModel::zeros_like() const
{
    CnnModel z;
    z.config = config;
    z.net = net.zeros_like();
    return z;
}

std::vector<std::span<double>> CnnModel::trainable()
{
    std::vector<std::span<double>> out;
    nn::trainable(net, out);
    return out;
}

std::vector<std::span<double>> CnnModel::all_tensors()
{
    std::vector<std::span<double>> out;
    nn::all_tensors(net, out);
    return out;
}

RealMatrix CnnModel::forward(const GraphInstance &g, nn::Mode mode, Tape *tape) const
{
    if (g.e.rows() != g.nodes() || g.e.cols() != g.nodes())
        throw std::invalid_argument("CnnModel::forward: edge matrix does not match node count");
    if (tape)
    {
        tape->nodes = g.nodes();
        tape->owner = this;
    }
    return nn::forward(net, node_summary_features(g), mode, tape ? &tape->net : nullptr);
}

void CnnModel::backward(const Tape &tape, const RealMatrix &d_raw, CnnModel &grad) const
{
    if (tape.owner != this)
        throw std::invalid_argument("CnnModel::backward: stale or foreign tape");
    if (d_raw.rows() != tape.nodes || d_raw.cols() != 2)
        throw std::invalid_argument("CnnModel::backward: seed must be K x 2");
    nn::backward(net, tape.net, d_raw, grad.net);
}

void CnnModel::update_running_statistics(const Tape &tape)
{
    if (tape.owner != this)
        throw std::invalid_argument("CnnModel::update_running_statistics: stale or foreign tape");
    nn::update_running_statistics(net, tape.net);
}

} // namespace usbf
