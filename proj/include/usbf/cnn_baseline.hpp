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

#ifndef USBF_CNN_BASELINE_HPP
#define USBF_CNN_BASELINE_HPP

#include "usbf/jeepon.hpp"

namespace usbf {

// Per-node network over (x_v, max e, mean e). The convolution stage uses
// kernel size 1 over the node axis, which makes it a shared per-node affine map,
// so the whole network is one chain 3 -> 256 -> 128 -> 64 -> 32 -> 16 -> 2 with
// normalization and leaky rectifier after every layer.
struct CnnConfig
{
    std::vector<int> chain = {3, 256, 128, 64, 32, 16, 2};
    int conv_layers = 3; // leading layers that realize the convolution stage
    int kernel_size = 1;
    // Normalization statistics at inference: per-graph batch statistics by default.
    nn::Mode inference = nn::Mode::batch;
};

struct CnnModel
{
    CnnConfig config;
    nn::Mlp net;

    static CnnModel make(const CnnConfig &cfg, std::uint64_t seed);
    CnnModel zeros_like() const;
    std::size_t parameter_count() const { return net.parameter_count(); }
    std::vector<std::span<double>> trainable();
    std::vector<std::span<double>> all_tensors();

    struct Tape
    {
        nn::MlpTape net;
        Eigen::Index nodes = 0;
        const CnnModel *owner = nullptr;
    };

    nn::Mode inference_mode() const { return config.inference; }
    RealMatrix forward(const GraphInstance &g, nn::Mode mode, Tape *tape = nullptr) const;
    void backward(const Tape &tape, const RealMatrix &d_raw, CnnModel &grad) const;
    void update_running_statistics(const Tape &tape);

    static constexpr const char *kind = "cnn";
};

} // namespace usbf

#endif
