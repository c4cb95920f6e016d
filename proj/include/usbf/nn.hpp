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

#ifndef USBF_NN_HPP
#define USBF_NN_HPP

#include "usbf/numerics.hpp"
#include "usbf/system.hpp"

#include <span>
#include <string>
#include <vector>

namespace usbf::nn {

// Which statistics normalization layers use. Training always uses batch
// statistics (one batch = the rows of one graph) and folds them into the
// running estimates; inference may use either.
enum class Mode
{
    batch,
    running
};

std::string to_string(Mode m);
Mode mode_from_string(const std::string &s);

inline constexpr double leaky_slope = 0.01;
inline constexpr double norm_eps = 1e-5;
inline constexpr double running_momentum = 0.9; // weight kept on the old running value

// Affine map, optional batch normalization over the rows of the batch, optional
// leaky rectifier. Batches are row-major: one item per row.
struct Dense
{
    RealMatrix weight; // out x in
    RealVector bias;
    bool normalize = false;
    bool activate = false;
    RealVector scale;        // normalization gain
    RealVector shift;        // normalization offset
    RealVector running_mean; // not trainable
    RealVector running_var;

    Eigen::Index inputs() const { return weight.cols(); }
    Eigen::Index outputs() const { return weight.rows(); }
};

struct DenseTape
{
    RealMatrix input;
    RealMatrix normalized; // zhat, when normalizing
    RealVector inv_std;
    RealVector batch_mean;
    RealVector batch_var; // biased
    RealMatrix pre_activation;
    Mode mode = Mode::batch;
};

struct Mlp
{
    std::vector<Dense> layers;

    // Hidden layers get normalization + activation; the last layer gets them
    // only when the flags ask for it. Weights ~ U(-1/sqrt(in), 1/sqrt(in)).
    static Mlp make(const std::vector<int> &chain, bool last_normalize, bool last_activate, Rng &rng);

    std::vector<int> chain() const;
    Mlp zeros_like() const;
    std::size_t parameter_count() const;
};

struct MlpTape
{
    std::vector<DenseTape> layers;
};

RealMatrix forward(const Dense &layer, const RealMatrix &x, Mode mode, DenseTape *tape);
// Accumulates parameter gradients into grad and returns the input gradient.
RealMatrix backward(const Dense &layer, const DenseTape &tape, const RealMatrix &dy, Dense &grad);

RealMatrix forward(const Mlp &mlp, const RealMatrix &x, Mode mode, MlpTape *tape);
RealMatrix backward(const Mlp &mlp, const MlpTape &tape, const RealMatrix &dy, Mlp &grad);

// Folds the batch statistics recorded in a training-mode tape into the running estimates.
void update_running_statistics(Mlp &mlp, const MlpTape &tape);

// Trainable tensors in a fixed order: per layer weight (column-major), bias, scale, shift.
void trainable(Mlp &mlp, std::vector<std::span<double>> &out);
// Every stored tensor, trainable ones first per layer, then the running statistics.
void all_tensors(Mlp &mlp, std::vector<std::span<double>> &out);

struct AdamOptions
{
    double learning_rate = 5e-5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

class Adam
{
public:
    explicit Adam(AdamOptions opt = {}) : opt_(opt) {}

    void step(const std::vector<std::span<double>> &params, const std::vector<std::span<double>> &grads);

    long steps() const { return t_; }
    const AdamOptions &options() const { return opt_; }

private:
    AdamOptions opt_;
    long t_ = 0;
    std::vector<double> m_, v_;
};

} // namespace usbf::nn

#endif
