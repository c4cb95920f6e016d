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

#ifndef USBF_JEEPON_HPP
#define USBF_JEEPON_HPP

#include "usbf/nn.hpp"
#include "usbf/rates.hpp"

#include <string>
#include <vector>

namespace usbf {

// Complete directed graph over the candidate users.
struct GraphInstance
{
    RealVector x; // x_v = |hbar_v^H h_v|
    RealMatrix e; // e(u, v) = |hbar_u^H h_v| for u != v; diagonal unused (zero)

    Eigen::Index nodes() const { return x.size(); }
};

GraphInstance build_graph(const ChannelSample &sample);

// Per-node inputs of the CNN baseline: (x_v, max_u e(u, v), mean_u e(u, v)).
RealMatrix node_summary_features(const GraphInstance &g);

struct JeeponConfig
{
    int message_width = 16;
    int layers = 2;
    // Strict mode keeps the nominal input widths and drops the third update
    // output; otherwise that output is carried as an extra per-node input.
    bool strict = true;
    std::vector<int> message_hidden = {256, 128, 64, 32, 16};
    std::vector<int> update_hidden = {256, 128, 64, 32, 16};
    // Normalization statistics at inference: per-graph batch statistics by default.
    nn::Mode inference = nn::Mode::batch;

    std::vector<int> message_chain() const;
    std::vector<int> update_chain() const;
};

struct JeeponModel
{
    JeeponConfig config;
    std::vector<nn::Mlp> message; // one per layer
    std::vector<nn::Mlp> update;

    static JeeponModel make(const JeeponConfig &cfg, std::uint64_t seed);
    JeeponModel zeros_like() const;
    std::size_t parameter_count() const;
    // Trainable tensors: layer by layer, message network then update network.
    std::vector<std::span<double>> trainable();
    std::vector<std::span<double>> all_tensors();

    struct Tape
    {
        struct Layer
        {
            RealMatrix message_input;
            nn::MlpTape message;
            std::vector<Eigen::Index> argmax; // (node * m + feature) -> edge row
            RealMatrix update_input;
            nn::MlpTape update;
        };
        std::vector<Layer> layers;
        Eigen::Index nodes = 0;
        const JeeponModel *owner = nullptr;
    };

    nn::Mode inference_mode() const { return config.inference; }
    // Returns K x 2 raw outputs (kappa_raw, q_raw) per node.
    RealMatrix forward(const GraphInstance &g, nn::Mode mode, Tape *tape = nullptr) const;
    // d_raw is K x 2; gradients are accumulated into grad.
    void backward(const Tape &tape, const RealMatrix &d_raw, JeeponModel &grad) const;
    void update_running_statistics(const Tape &tape);

    static constexpr const char *kind = "jeepon";
};

// Edge rows are ordered by target node v, then source u ascending (u != v).
Eigen::Index edge_row(Eigen::Index u, Eigen::Index v, Eigen::Index K);

// Projection onto the feasible region: clamp kappa to [0,1], q to [0,P], then
// rescale q so that sum(q) <= P.
struct PacOutput
{
    RealVector kappa;
    RealVector q;
};
PacOutput pac_project(const RealVector &kappa_raw, const RealVector &q_raw, double P);
// Chain rule through pac_project; returns K x 2 gradients w.r.t. the raw outputs.
RealMatrix pac_backward(const RealVector &kappa_raw, const RealVector &q_raw, double P, const RealVector &d_kappa,
                        const RealVector &d_q);

struct LagrangeState
{
    double mu = 1.0;
    double nu = 1.0;
    double eps_mu = 1e-5;
    double eps_nu = 1e-5;
};

struct LossBreakdown
{
    double loss = 0.0;             // L / K
    double objective = 0.0;        // -sum kappa
    double binary_violation = 0.0; // sum max(kappa - kappa^2, 0)
    double sinr_violation = 0.0;   // sum max(kappa gt - gamma_hat, 0)
};

LossBreakdown lagrangian_loss(const RealVector &kappa, const RealVector &q, const ComplexColumns &hbar,
                              const RealVector &gamma_tilde, const LagrangeState &lag);

struct HeadGradients
{
    RealVector d_kappa;
    RealVector d_q;
};

enum class QGradient
{
    analytic,
    finite_difference
};

HeadGradients head_gradients(const RealVector &kappa, const RealVector &q, const ComplexColumns &hbar,
                             const RealVector &gamma_tilde, const LagrangeState &lag,
                             QGradient method = QGradient::analytic);

} // namespace usbf

#endif
