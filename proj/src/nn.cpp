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

#include "usbf/nn.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace usbf::nn {

std::string to_string(Mode m)
{
    return m == Mode::batch ? "batch" : "running";
}

Mode mode_from_string(const std::string &s)
{
    if (s == "batch")
        return Mode::batch;
    if (s == "running")
        return Mode::running;
    throw std::invalid_argument("unknown normalization mode '" + s + "'");
}

Mlp Mlp::make(const std::vector<int> &chain, bool last_normalize, bool last_activate, Rng &rng)
{
    if (chain.size() < 2)
        throw std::invalid_argument("Mlp::make: a chain needs at least two sizes");
    Mlp mlp;
    for (std::size_t i = 0; i + 1 < chain.size(); ++i)
    {
        const int in = chain[i], out = chain[i + 1];
        if (in <= 0 || out <= 0)
            throw std::invalid_argument("Mlp::make: layer sizes must be positive");
        const bool last = i + 2 == chain.size();
        Dense d;
        std::uniform_real_distribution<double> u(-1.0 / std::sqrt(in), 1.0 / std::sqrt(in));
        d.weight.resize(out, in);
        for (Eigen::Index r = 0; r < out; ++r)
            for (Eigen::Index c = 0; c < in; ++c)
                d.weight(r, c) = u(rng);
        d.bias = RealVector::Zero(out);
        d.normalize = last ? last_normalize : true;
        d.activate = last ? last_activate : true;
        d.scale = RealVector::Ones(out);
        d.shift = RealVector::Zero(out);
        d.running_mean = RealVector::Zero(out);
        d.running_var = RealVector::Ones(out);
        mlp.layers.push_back(std::move(d));
    }
    return mlp;
}

std::vector<int> Mlp::chain() const
{
    std::vector<int> c;
    if (layers.empty())
        return c;
    c.push_back(static_cast<int>(layers.front().inputs()));
    for (const Dense &d : layers)
        c.push_back(static_cast<int>(d.outputs()));
    return c;
}

Mlp Mlp::zeros_like() const
{
    Mlp z = *this;
    for (Dense &d : z.layers)
    {
        d.weight.setZero();
        d.bias.setZero();
        d.scale.setZero();
        d.shift.setZero();
        d.running_mean.setZero();
        d.running_var.setZero();
    }
    return z;
}

std::size_t Mlp::parameter_count() const
{
    std::size_t n = 0;
    for (const Dense &d : layers)
        n += static_cast<std::size_t>(d.weight.size() + d.bias.size() + d.scale.size() + d.shift.size());
    return n;
}

RealMatrix forward(const Dense &layer, const RealMatrix &x, Mode mode, DenseTape *tape)
{
    if (x.cols() != layer.inputs())
        throw std::invalid_argument("Dense forward: input width " + std::to_string(x.cols()) + " != " +
                                    std::to_string(layer.inputs()));
    RealMatrix z = x * layer.weight.transpose();
    z.rowwise() += layer.bias.transpose();
    if (tape)
    {
        tape->input = x;
        tape->mode = mode;
    }
    if (layer.normalize)
    {
        const Eigen::Index n = z.rows();
        RealVector mean, var;
        if (mode == Mode::batch)
        {
            mean = z.colwise().mean().transpose();
            var = (z.rowwise() - mean.transpose()).array().square().colwise().sum().transpose() /
                  static_cast<double>(std::max<Eigen::Index>(n, 1));
        }
        else
        {
            mean = layer.running_mean;
            var = layer.running_var;
        }
        const RealVector inv_std = (var.array() + norm_eps).rsqrt().matrix();
        RealMatrix zhat = (z.rowwise() - mean.transpose()) * inv_std.asDiagonal();
        z = zhat * layer.scale.asDiagonal();
        z.rowwise() += layer.shift.transpose();
        if (tape)
        {
            tape->normalized = std::move(zhat);
            tape->inv_std = inv_std;
            tape->batch_mean = mean;
            tape->batch_var = var;
        }
    }
    if (tape)
        tape->pre_activation = z;
    if (layer.activate)
        z = z.array().max(leaky_slope * z.array()).matrix();
    return z;
}

RealMatrix backward(const Dense &layer, const DenseTape &tape, const RealMatrix &dy, Dense &grad)
{
    RealMatrix dz = dy;
    if (layer.activate)
        dz = (tape.pre_activation.array() > 0.0).select(dz, leaky_slope * dz);
    if (layer.normalize)
    {
        grad.shift += dz.colwise().sum().transpose();
        grad.scale += (dz.cwiseProduct(tape.normalized)).colwise().sum().transpose();
        const RealMatrix dzhat = dz * layer.scale.asDiagonal();
        if (tape.mode == Mode::batch)
        {
            const auto n = static_cast<double>(dz.rows());
            const RealVector sum = dzhat.colwise().sum().transpose();
            const RealVector dot = dzhat.cwiseProduct(tape.normalized).colwise().sum().transpose();
            RealMatrix t = n * dzhat;
            t.rowwise() -= sum.transpose();
            t -= tape.normalized * dot.asDiagonal();
            dz = t * (tape.inv_std / n).asDiagonal();
        }
        else
        {
            dz = dzhat * tape.inv_std.asDiagonal();
        }
    }
    grad.bias += dz.colwise().sum().transpose();
    grad.weight.noalias() += dz.transpose() * tape.input;
    return dz * layer.weight;
}

RealMatrix forward(const Mlp &mlp, const RealMatrix &x, Mode mode, MlpTape *tape)
{
    if (tape)
        tape->layers.resize(mlp.layers.size());
    RealMatrix h = x;
    for (std::size_t i = 0; i < mlp.layers.size(); ++i)
        h = forward(mlp.layers[i], h, mode, tape ? &tape->layers[i] : nullptr);
    return h;
}

RealMatrix backward(const Mlp &mlp, const MlpTape &tape, const RealMatrix &dy, Mlp &grad)
{
    if (tape.layers.size() != mlp.layers.size() || grad.layers.size() != mlp.layers.size())
        throw std::invalid_argument("Mlp backward: tape does not belong to this network");
    RealMatrix d = dy;
    for (std::size_t i = mlp.layers.size(); i-- > 0;)
        d = backward(mlp.layers[i], tape.layers[i], d, grad.layers[i]);
    return d;
}

void update_running_statistics(Mlp &mlp, const MlpTape &tape)
{
    for (std::size_t i = 0; i < mlp.layers.size(); ++i)
    {
        Dense &d = mlp.layers[i];
        const DenseTape &t = tape.layers[i];
        if (!d.normalize || t.mode != Mode::batch)
            continue;
        const auto n = static_cast<double>(t.input.rows());
        const RealVector unbiased = n > 1.0 ? RealVector(t.batch_var * (n / (n - 1.0))) : t.batch_var;
        d.running_mean = running_momentum * d.running_mean + (1.0 - running_momentum) * t.batch_mean;
        d.running_var = running_momentum * d.running_var + (1.0 - running_momentum) * unbiased;
    }
}

namespace {

template <class M> std::span<double> view(M &m) { return {m.data(), static_cast<std::size_t>(m.size())}; }

} // namespace

void trainable(Mlp &mlp, std::vector<std::span<double>> &out)
{
    for (Dense &d : mlp.layers)
    {
        out.push_back(view(d.weight));
        out.push_back(view(d.bias));
        out.push_back(view(d.scale));
        out.push_back(view(d.shift));
    }
}

void all_tensors(Mlp &mlp, std::vector<std::span<double>> &out)
{
    for (Dense &d : mlp.layers)
    {
        out.push_back(view(d.weight));
        out.push_back(view(d.bias));
        out.push_back(view(d.scale));
        out.push_back(view(d.shift));
        out.push_back(view(d.running_mean));
        out.push_back(view(d.running_var));
    }
}

void Adam::step(const std::vector<std::span<double>> &params, const std::vector<std::span<double>> &grads)
{
    if (params.size() != grads.size())
        throw std::invalid_argument("Adam::step: parameter/gradient lists differ");
    std::size_t total = 0;
    for (std::size_t i = 0; i < params.size(); ++i)
    {
        if (params[i].size() != grads[i].size())
            throw std::invalid_argument("Adam::step: tensor size mismatch");
        total += params[i].size();
    }
    if (m_.empty())
    {
        m_.assign(total, 0.0);
        v_.assign(total, 0.0);
    }
    if (m_.size() != total)
        throw std::invalid_argument("Adam::step: parameter count changed");
    ++t_;
    const double c1 = 1.0 - std::pow(opt_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(opt_.beta2, static_cast<double>(t_));
    std::size_t j = 0;
    for (std::size_t i = 0; i < params.size(); ++i)
        for (std::size_t e = 0; e < params[i].size(); ++e, ++j)
        {
            const double g = grads[i][e];
            m_[j] = opt_.beta1 * m_[j] + (1.0 - opt_.beta1) * g;
            v_[j] = opt_.beta2 * v_[j] + (1.0 - opt_.beta2) * g * g;
            params[i][e] -= opt_.learning_rate * (m_[j] / c1) / (std::sqrt(v_[j] / c2) + opt_.eps);
        }
}

} // namespace usbf::nn
