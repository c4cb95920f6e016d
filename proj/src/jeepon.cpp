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

#include "usbf/jeepon.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace usbf {

GraphInstance build_graph(const ChannelSample &sample)
{
    const ComplexColumns hbar = sample.normalized_channels();
    // cross(u, v) = hbar_u^H h_v
    const ComplexMatrix h = sample.H.transpose();
    const RealMatrix cross = (hbar.adjoint() * h).cwiseAbs();
    GraphInstance g;
    g.x = cross.diagonal();
    g.e = cross;
    g.e.diagonal().setZero();
    return g;
}

RealMatrix node_summary_features(const GraphInstance &g)
{
    const Eigen::Index K = g.nodes();
    RealMatrix f = RealMatrix::Zero(K, 3);
    for (Eigen::Index v = 0; v < K; ++v)
    {
        f(v, 0) = g.x(v);
        if (K < 2)
            continue;
        double mx = -std::numeric_limits<double>::infinity(), sum = 0.0;
        for (Eigen::Index u = 0; u < K; ++u)
            if (u != v)
            {
                mx = std::max(mx, g.e(u, v));
                sum += g.e(u, v);
            }
        f(v, 1) = mx;
        f(v, 2) = sum / static_cast<double>(K - 1);
    }
    return f;
}

std::vector<int> JeeponConfig::message_chain() const
{
    std::vector<int> c{strict ? 4 : 5};
    c.insert(c.end(), message_hidden.begin(), message_hidden.end());
    c.push_back(message_width);
    return c;
}

std::vector<int> JeeponConfig::update_chain() const
{
    std::vector<int> c{(strict ? 3 : 4) + 2 * message_width};
    c.insert(c.end(), update_hidden.begin(), update_hidden.end());
    c.push_back(3);
    return c;
}

JeeponModel JeeponModel::make(const JeeponConfig &cfg, std::uint64_t seed)
{
    if (cfg.message_width <= 0 || cfg.layers <= 0)
        throw std::invalid_argument("JeeponModel::make: message width and layer count must be positive");
    JeeponModel m;
    m.config = cfg;
    Rng rng(seed);
    for (int l = 0; l < cfg.layers; ++l)
    {
        m.message.push_back(nn::Mlp::make(cfg.message_chain(), false, false, rng));
        m.update.push_back(nn::Mlp::make(cfg.update_chain(), false, false, rng));
    }
    return m;
}

JeeponModel JeeponModel::zeros_like() const
{
    JeeponModel z;
    z.config = config;
    for (const auto &mlp : message)
        z.message.push_back(mlp.zeros_like());
    for (const auto &mlp : update)
        z.update.push_back(mlp.zeros_like());
    return z;
}

std::size_t JeeponModel::parameter_count() const
{
    std::size_t n = 0;
    for (std::size_t l = 0; l < message.size(); ++l)
        n += message[l].parameter_count() + update[l].parameter_count();
    return n;
}

std::vector<std::span<double>> JeeponModel::trainable()
{
    std::vector<std::span<double>> out;
    for (std::size_t l = 0; l < message.size(); ++l)
    {
        nn::trainable(message[l], out);
        nn::trainable(update[l], out);
    }
    return out;
}

std::vector<std::span<double>> JeeponModel::all_tensors()
{
    std::vector<std::span<double>> out;
    for (std::size_t l = 0; l < message.size(); ++l)
    {
        nn::all_tensors(message[l], out);
        nn::all_tensors(update[l], out);
    }
    return out;
}

Eigen::Index edge_row(Eigen::Index u, Eigen::Index v, Eigen::Index K)
{
    return v * (K - 1) + (u < v ? u : u - 1);
}

RealMatrix JeeponModel::forward(const GraphInstance &g, nn::Mode mode, Tape *tape) const
{
    const Eigen::Index K = g.nodes();
    if (g.e.rows() != K || g.e.cols() != K)
        throw std::invalid_argument("JeeponModel::forward: edge matrix does not match node count");
    const bool strict = config.strict;
    const Eigen::Index m = config.message_width;
    const Eigen::Index edges = K * (K - 1);
    if (tape)
    {
        tape->layers.assign(message.size(), {});
        tape->nodes = K;
        tape->owner = this;
    }

    RealMatrix beta = RealMatrix::Zero(K, 2);
    RealVector aux = RealVector::Zero(K);
    for (std::size_t l = 0; l < message.size(); ++l)
    {
        Tape::Layer *tl = tape ? &tape->layers[l] : nullptr;
        const Eigen::Index min = strict ? 4 : 5;
        RealMatrix msg_in(edges, min);
        for (Eigen::Index v = 0; v < K; ++v)
            for (Eigen::Index u = 0; u < K; ++u)
            {
                if (u == v)
                    continue;
                const Eigen::Index r = edge_row(u, v, K);
                msg_in(r, 0) = beta(u, 0);
                msg_in(r, 1) = beta(u, 1);
                msg_in(r, 2) = g.x(u);
                if (strict)
                    msg_in(r, 3) = g.e(u, v);
                else
                {
                    msg_in(r, 3) = aux(u);
                    msg_in(r, 4) = g.e(u, v);
                }
            }

        RealMatrix agg = RealMatrix::Zero(K, 2 * m);
        std::vector<Eigen::Index> argmax;
        if (edges > 0)
        {
            const RealMatrix msgs = nn::forward(message[l], msg_in, mode, tl ? &tl->message : nullptr);
            argmax.assign(static_cast<std::size_t>(K * m), 0);
            for (Eigen::Index v = 0; v < K; ++v)
            {
                const Eigen::Index first = v * (K - 1);
                for (Eigen::Index j = 0; j < m; ++j)
                {
                    Eigen::Index best = first;
                    double sum = 0.0;
                    for (Eigen::Index r = first; r < first + K - 1; ++r)
                    {
                        if (msgs(r, j) > msgs(best, j))
                            best = r;
                        sum += msgs(r, j);
                    }
                    agg(v, j) = msgs(best, j);
                    agg(v, m + j) = sum / static_cast<double>(K - 1);
                    argmax[static_cast<std::size_t>(v * m + j)] = best;
                }
            }
        }

        const Eigen::Index uin = (strict ? 3 : 4) + 2 * m;
        RealMatrix upd_in(K, uin);
        upd_in.col(0) = beta.col(0);
        upd_in.col(1) = beta.col(1);
        upd_in.col(2) = g.x;
        Eigen::Index off = 3;
        if (!strict)
            upd_in.col(off++) = aux;
        upd_in.rightCols(2 * m) = agg;
        const RealMatrix out = nn::forward(update[l], upd_in, mode, tl ? &tl->update : nullptr);
        beta = out.leftCols(2);
        aux = out.col(2);

        if (tl)
        {
            tl->message_input = std::move(msg_in);
            tl->argmax = std::move(argmax);
            tl->update_input = std::move(upd_in);
        }
    }
    return beta;
}

void JeeponModel::backward(const Tape &tape, const RealMatrix &d_raw, JeeponModel &grad) const
{
    const Eigen::Index K = tape.nodes;
    if (tape.owner != this || tape.layers.size() != message.size())
        throw std::invalid_argument("JeeponModel::backward: stale or foreign tape");
    if (d_raw.rows() != K || d_raw.cols() != 2)
        throw std::invalid_argument("JeeponModel::backward: seed must be K x 2");
    const bool strict = config.strict;
    const Eigen::Index m = config.message_width;

    RealMatrix d_beta = d_raw;
    RealVector d_aux = RealVector::Zero(K);
    for (std::size_t l = message.size(); l-- > 0;)
    {
        const Tape::Layer &tl = tape.layers[l];
        RealMatrix d_out(K, 3);
        d_out.leftCols(2) = d_beta;
        d_out.col(2) = d_aux;
        const RealMatrix d_in = nn::backward(update[l], tl.update, d_out, grad.update[l]);

        RealMatrix d_beta_prev = d_in.leftCols(2);
        RealVector d_aux_prev = strict ? RealVector::Zero(K) : RealVector(d_in.col(3));
        const RealMatrix d_agg = d_in.rightCols(2 * m);

        if (K > 1)
        {
            const Eigen::Index edges = K * (K - 1);
            RealMatrix d_msgs = RealMatrix::Zero(edges, m);
            for (Eigen::Index v = 0; v < K; ++v)
                for (Eigen::Index j = 0; j < m; ++j)
                {
                    d_msgs(tl.argmax[static_cast<std::size_t>(v * m + j)], j) += d_agg(v, j);
                    const double share = d_agg(v, m + j) / static_cast<double>(K - 1);
                    for (Eigen::Index r = v * (K - 1); r < (v + 1) * (K - 1); ++r)
                        d_msgs(r, j) += share;
                }
            const RealMatrix d_msg_in = nn::backward(message[l], tl.message, d_msgs, grad.message[l]);
            for (Eigen::Index v = 0; v < K; ++v)
                for (Eigen::Index u = 0; u < K; ++u)
                {
                    if (u == v)
                        continue;
                    const Eigen::Index r = edge_row(u, v, K);
                    d_beta_prev(u, 0) += d_msg_in(r, 0);
                    d_beta_prev(u, 1) += d_msg_in(r, 1);
                    if (!strict)
                        d_aux_prev(u) += d_msg_in(r, 3);
                }
        }
        d_beta = std::move(d_beta_prev);
        d_aux = std::move(d_aux_prev);
    }
}

void JeeponModel::update_running_statistics(const Tape &tape)
{
    if (tape.owner != this || tape.layers.size() != message.size())
        throw std::invalid_argument("JeeponModel::update_running_statistics: stale or foreign tape");
    for (std::size_t l = 0; l < message.size(); ++l)
    {
        if (!tape.layers[l].message.layers.empty())
            nn::update_running_statistics(message[l], tape.layers[l].message);
        nn::update_running_statistics(update[l], tape.layers[l].update);
    }
}

PacOutput pac_project(const RealVector &kappa_raw, const RealVector &q_raw, double P)
{
    PacOutput out;
    out.kappa = kappa_raw.cwiseMax(0.0).cwiseMin(1.0);
    const RealVector qc = q_raw.cwiseMax(0.0).cwiseMin(P);
    const double s = qc.sum();
    out.q = s > P ? RealVector(qc * (P / s)) : qc;
    return out;
}

RealMatrix pac_backward(const RealVector &kappa_raw, const RealVector &q_raw, double P, const RealVector &d_kappa,
                        const RealVector &d_q)
{
    const Eigen::Index K = kappa_raw.size();
    RealMatrix d(K, 2);
    const RealVector qc = q_raw.cwiseMax(0.0).cwiseMin(P);
    const double s = qc.sum();
    RealVector d_qc = d_q;
    if (s > P)
    {
        // q = P qc / s
        const double dot = qc.dot(d_q);
        d_qc = (P / s) * d_q - RealVector::Constant(K, P * dot / (s * s));
    }
    for (Eigen::Index k = 0; k < K; ++k)
    {
        d(k, 0) = (kappa_raw(k) > 0.0 && kappa_raw(k) < 1.0) ? d_kappa(k) : 0.0;
        d(k, 1) = (q_raw(k) > 0.0 && q_raw(k) < P) ? d_qc(k) : 0.0;
    }
    return d;
}

namespace {

double positive(double x) { return x > 0.0 ? x : 0.0; }
double active(double x) { return x > 0.0 ? 1.0 : 0.0; }

} // namespace

LossBreakdown lagrangian_loss(const RealVector &kappa, const RealVector &q, const ComplexColumns &hbar,
                              const RealVector &gamma_tilde, const LagrangeState &lag)
{
    const Eigen::Index K = kappa.size();
    if (q.size() != K || hbar.cols() != K || gamma_tilde.size() != K)
        throw std::invalid_argument("lagrangian_loss: dimension mismatch");
    const RealVector gamma_hat = mmse_uplink_sinr(hbar, q);
    LossBreakdown b;
    for (Eigen::Index k = 0; k < K; ++k)
    {
        b.objective -= kappa(k);
        b.binary_violation += positive(kappa(k) - kappa(k) * kappa(k));
        b.sinr_violation += positive(kappa(k) * gamma_tilde(k) - gamma_hat(k));
    }
    b.loss = (b.objective + lag.mu * b.binary_violation + lag.nu * b.sinr_violation) / static_cast<double>(K);
    return b;
}

HeadGradients head_gradients(const RealVector &kappa, const RealVector &q, const ComplexColumns &hbar,
                             const RealVector &gamma_tilde, const LagrangeState &lag, QGradient method)
{
    const Eigen::Index K = kappa.size();
    const auto Kd = static_cast<double>(K);
    const RealVector gamma_hat = mmse_uplink_sinr(hbar, q);
    HeadGradients hg;
    hg.d_kappa.resize(K);
    RealVector chi(K);
    for (Eigen::Index k = 0; k < K; ++k)
    {
        chi(k) = active(kappa(k) * gamma_tilde(k) - gamma_hat(k));
        hg.d_kappa(k) = (-1.0 + lag.mu * active(kappa(k) - kappa(k) * kappa(k)) * (1.0 - 2.0 * kappa(k)) +
                         lag.nu * chi(k) * gamma_tilde(k)) /
                        Kd;
    }
    if (method == QGradient::analytic)
    {
        const RealMatrix J = mmse_uplink_sinr_jacobian(hbar, q);
        hg.d_q = -(lag.nu / Kd) * (J.transpose() * chi);
        return hg;
    }
    hg.d_q.resize(K);
    RealVector probe = q;
    for (Eigen::Index l = 0; l < K; ++l)
    {
        const double h = std::max(1e-6, 1e-4 * q(l));
        probe(l) = q(l) + h;
        const double up = lagrangian_loss(kappa, probe, hbar, gamma_tilde, lag).loss;
        // Powers cannot go negative; fall back to a forward difference at the boundary.
        const double lo = std::max(0.0, q(l) - h);
        probe(l) = lo;
        const double down = lagrangian_loss(kappa, probe, hbar, gamma_tilde, lag).loss;
        probe(l) = q(l);
        hg.d_q(l) = (up - down) / (q(l) + h - lo);
    }
    return hg;
}

} // namespace usbf
