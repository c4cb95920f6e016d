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

#ifndef USBF_TEST_GRADCHECK_HPP
#define USBF_TEST_GRADCHECK_HPP

#include "usbf/jeepon.hpp"

#include <algorithm>
#include <functional>

namespace testing {

using namespace usbf;

// Scalar head on the raw model outputs: value and gradient w.r.t. the K x 2 raw matrix.
struct HeadValue
{
    double value = 0.0;
    RealMatrix d_raw;
};
using Head = std::function<HeadValue(const RealMatrix &)>;

struct GradReport
{
    double max_rel = 0.0;
    std::size_t checked = 0;
};

// Relative error with a small floor so parameters with vanishing gradients
// are compared absolutely.
inline double relative_error(double a, double b, double floor = 1e-6)
{
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

// Compares backward() against central differences over every trainable
// parameter, step 1e-5 relative to the parameter magnitude.
template <class Model>
GradReport check_model_gradients(Model &model, const GraphInstance &g, const Head &head,
                                 nn::Mode mode = nn::Mode::batch)
{
    typename Model::Tape tape;
    const RealMatrix raw = model.forward(g, mode, &tape);
    Model grad = model.zeros_like();
    model.backward(tape, head(raw).d_raw, grad);

    auto params = model.trainable();
    const auto grads = grad.trainable();
    GradReport rep;
    for (std::size_t t = 0; t < params.size(); ++t)
        for (std::size_t i = 0; i < params[t].size(); ++i)
        {
            double &theta = params[t][i];
            const double saved = theta;
            const double step = 1e-5 * std::max(1.0, std::abs(saved));
            theta = saved + step;
            const double up = head(model.forward(g, mode)).value;
            theta = saved - step;
            const double down = head(model.forward(g, mode)).value;
            theta = saved;
            const double fd = (up - down) / (2.0 * step);
            rep.max_rel = std::max(rep.max_rel, relative_error(grads[t][i], fd));
            ++rep.checked;
        }
    return rep;
}

// Training head: projection, Lagrangian loss, analytic head gradients.
inline Head training_head(const ComplexColumns &hbar, const RealVector &targets, double P,
                          const LagrangeState &lag)
{
    return [=](const RealMatrix &raw) {
        const RealVector kr = raw.col(0), qr = raw.col(1);
        const PacOutput pac = pac_project(kr, qr, P);
        HeadValue hv;
        hv.value = lagrangian_loss(pac.kappa, pac.q, hbar, targets, lag).loss;
        const HeadGradients hg = head_gradients(pac.kappa, pac.q, hbar, targets, lag);
        hv.d_raw = pac_backward(kr, qr, P, hg.d_kappa, hg.d_q);
        return hv;
    };
}

// Smooth head: a fixed linear functional of the raw outputs.
inline Head linear_head(const RealMatrix &weights)
{
    return [=](const RealMatrix &raw) { return HeadValue{raw.cwiseProduct(weights).sum(), weights}; };
}

// Random graph with distinct node and edge features.
inline GraphInstance random_graph(Eigen::Index K, std::uint64_t seed)
{
    Rng rng(seed);
    std::uniform_real_distribution<double> u(0.05, 2.0);
    GraphInstance g;
    g.x.resize(K);
    g.e = RealMatrix::Zero(K, K);
    for (Eigen::Index v = 0; v < K; ++v)
    {
        g.x(v) = u(rng);
        for (Eigen::Index w = 0; w < K; ++w)
            if (v != w)
                g.e(v, w) = u(rng);
    }
    return g;
}

// Moves every normalization gain, offset and bias away from its initial value.
template <class Model> void jitter_parameters(Model &model, std::uint64_t seed)
{
    Rng rng(seed);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (std::span<double> t : model.trainable())
        for (double &x : t)
            x += 0.3 * u(rng);
}

} // namespace testing

#endif
