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

#ifndef USBF_TRAINER_HPP
#define USBF_TRAINER_HPP

#include "usbf/greedy.hpp"
#include "usbf/jeepon.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace usbf {

class TrainingError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct TrainHyper
{
    int epochs = 200;
    nn::AdamOptions adam;
    LagrangeState lag;
    double validation_split = 0.2;
    std::uint64_t shuffle_seed = 1;
    bool timing = false; // record wall time per epoch (otherwise 0)
    QGradient q_gradient = QGradient::analytic;
};

struct EpochRecord
{
    int epoch = 0;
    double train_loss = 0.0; // mean over training samples
    double val_loss = 0.0;   // mean over validation samples, inference statistics
    double binary_violation = 0.0; // epoch sums over training samples
    double sinr_violation = 0.0;
    double mu = 0.0; // after the epoch's dual update
    double nu = 0.0;
    double wall_seconds = 0.0;
};

struct TrainResult
{
    std::vector<EpochRecord> history;
    LagrangeState lag;
    long steps = 0;
    std::size_t train_samples = 0;
    std::size_t validation_samples = 0;
};

// Called after each training sample with the epoch, the dataset index and the loss terms.
using SampleObserver = std::function<void(int, std::size_t, const LossBreakdown &)>;

// Training split: the first (1 - validation_split) share of the samples.
inline std::size_t training_count(std::size_t n, double validation_split)
{
    if (validation_split < 0.0 || validation_split >= 1.0)
        throw std::invalid_argument("validation split must lie in [0, 1)");
    const auto val = static_cast<std::size_t>(std::floor(static_cast<double>(n) * validation_split));
    return n - val;
}

template <class Model>
TrainResult train(Model &model, const std::vector<ChannelSample> &data, const SystemConfig &cfg,
                  const TrainHyper &hyper, const SampleObserver &observer = {})
{
    for (const ChannelSample &s : data)
        if (s.users() != cfg.K || s.antennas() != cfg.N)
            throw std::invalid_argument("train: sample shape does not match the configuration");
    if (hyper.lag.mu < 0.0 || hyper.lag.nu < 0.0 || hyper.lag.eps_mu < 0.0 || hyper.lag.eps_nu < 0.0)
        throw std::invalid_argument("train: multipliers and their steps must be nonnegative");

    const RealVector targets = sinr_targets(cfg);
    const double P = cfg.power();
    TrainResult res;
    res.lag = hyper.lag;
    res.train_samples = training_count(data.size(), hyper.validation_split);
    res.validation_samples = data.size() - res.train_samples;

    std::vector<std::size_t> order(res.train_samples);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng(hyper.shuffle_seed);
    nn::Adam adam(hyper.adam);
    Model grad = model.zeros_like();

    for (int epoch = 1; epoch <= hyper.epochs; ++epoch)
    {
        const auto t0 = std::chrono::steady_clock::now();
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        EpochRecord rec;
        rec.epoch = epoch;
        for (std::size_t i : order)
        {
            const ChannelSample &s = data[i];
            const ComplexColumns hbar = s.normalized_channels();
            const GraphInstance g = build_graph(s);
            typename Model::Tape tape;
            const RealMatrix raw = model.forward(g, nn::Mode::batch, &tape);
            const RealVector kr = raw.col(0), qr = raw.col(1);
            const PacOutput pac = pac_project(kr, qr, P);
            const LossBreakdown b = lagrangian_loss(pac.kappa, pac.q, hbar, targets, res.lag);
            if (!std::isfinite(b.loss))
                throw TrainingError("train: non-finite loss at epoch " + std::to_string(epoch) + ", sample " +
                                    std::to_string(i));
            const HeadGradients hg = head_gradients(pac.kappa, pac.q, hbar, targets, res.lag, hyper.q_gradient);
            const RealMatrix d_raw = pac_backward(kr, qr, P, hg.d_kappa, hg.d_q);

            for (std::span<double> t : grad.trainable())
                std::fill(t.begin(), t.end(), 0.0);
            model.backward(tape, d_raw, grad);
            adam.step(model.trainable(), grad.trainable());
            model.update_running_statistics(tape);

            rec.train_loss += b.loss;
            rec.binary_violation += b.binary_violation;
            rec.sinr_violation += b.sinr_violation;
            if (observer)
                observer(epoch, i, b);
        }
        if (res.train_samples > 0)
            rec.train_loss /= static_cast<double>(res.train_samples);

        for (std::size_t i = res.train_samples; i < data.size(); ++i)
        {
            const ChannelSample &s = data[i];
            const RealMatrix raw = model.forward(build_graph(s), model.inference_mode());
            const PacOutput pac = pac_project(raw.col(0), raw.col(1), P);
            rec.val_loss += lagrangian_loss(pac.kappa, pac.q, s.normalized_channels(), targets, res.lag).loss;
        }
        if (res.validation_samples > 0)
            rec.val_loss /= static_cast<double>(res.validation_samples);

        res.lag.mu += res.lag.eps_mu * rec.binary_violation;
        res.lag.nu += res.lag.eps_nu * rec.sinr_violation;
        rec.mu = res.lag.mu;
        rec.nu = res.lag.nu;
        if (hyper.timing)
            rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        res.history.push_back(rec);
    }
    res.steps = adam.steps();
    return res;
}

// Inference pipeline: forward, projection, claim every user with kappa above
// the threshold, then the shared verification filter.
template <class Model>
Schedule learned_infer(const Model &model, const ChannelSample &sample, const SystemConfig &cfg,
                       double claim_threshold = 0.0)
{
    if (sample.users() != cfg.K || sample.antennas() != cfg.N)
        throw std::invalid_argument("infer: sample shape does not match the configuration");
    const RealMatrix raw = model.forward(build_graph(sample), model.inference_mode());
    const PacOutput pac = pac_project(raw.col(0), raw.col(1), cfg.power());
    UserSet claimed;
    for (Eigen::Index k = 0; k < pac.kappa.size(); ++k)
        if (pac.kappa(k) > claim_threshold)
            claimed.push_back(static_cast<int>(k));
    return filter_claimed(sample.normalized_channels(), pac.q, claimed, sinr_targets(cfg));
}

inline Schedule jusbf_infer(const JeeponModel &model, const ChannelSample &sample, const SystemConfig &cfg,
                            double claim_threshold = 0.0)
{
    return learned_infer(model, sample, cfg, claim_threshold);
}

} // namespace usbf

#endif
