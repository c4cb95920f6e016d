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

#include "usbf/rates.hpp"

#include <algorithm>

namespace usbf {

RateParams RateParams::make(int D, int n_bl, double eps, RateMode mode)
{
    if (D < 1 || n_bl < 1)
        throw std::invalid_argument("RateParams: D and n_bl must be >= 1");
    RateParams rp;
    rp.D = D;
    rp.n_bl = n_bl;
    rp.eps = eps;
    rp.mode = mode;
    rp.theta = q_function_inverse(eps) / std::sqrt(static_cast<double>(n_bl));
    rp.r_nats = static_cast<double>(D) / n_bl * std::log(2.0);
    return rp;
}

double shannon_capacity(double gamma)
{
    if (gamma < 0.0)
        throw std::invalid_argument("shannon_capacity: negative SINR");
    return std::log1p(gamma);
}

double channel_dispersion(double gamma)
{
    if (gamma < 0.0)
        throw std::invalid_argument("channel_dispersion: negative SINR");
    const double a = 1.0 + gamma;
    return 1.0 - 1.0 / (a * a);
}

double fbl_rate(double gamma, const RateParams &rp)
{
    if (rp.mode == RateMode::shannon)
        return shannon_capacity(gamma);
    return shannon_capacity(gamma) - rp.theta * std::sqrt(channel_dispersion(gamma));
}

double min_sinr_threshold(const RateParams &rp)
{
    if (rp.mode == RateMode::shannon)
        return std::exp2(static_cast<double>(rp.D) / rp.n_bl) - 1.0;

    double lo = 0.0, hi = 1e6;
    auto excess = [&](double g) { return fbl_rate(g, rp) - rp.r_nats; };
    if (excess(lo) >= 0.0 || excess(hi) <= 0.0)
        throw std::domain_error("min_sinr_threshold: target rate not bracketed on [0, 1e6]");
    while (hi - lo > 1e-12 * std::max(1.0, hi))
    {
        const double mid = 0.5 * (lo + hi);
        if (excess(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

void require_unit(const ComplexColumns &W, int k)
{
    if (std::abs(W.col(k).norm() - 1.0) > 1e-6)
        throw std::invalid_argument("beamformer of user " + std::to_string(k) + " is not unit norm");
}

bool contains(const UserSet &S, int k) { return std::find(S.begin(), S.end(), k) != S.end(); }

} // namespace

double downlink_sinr(const ComplexColumns &hbar, const RealVector &p, const ComplexColumns &W, int k,
                     const UserSet &active)
{
    if (!contains(active, k))
        throw std::invalid_argument("downlink_sinr: user " + std::to_string(k) + " is not active");
    double interference = 1.0;
    for (int l : active)
    {
        require_unit(W, l);
        if (l != k)
            interference += p(l) * std::norm(hbar.col(k).dot(W.col(l)));
    }
    return p(k) * std::norm(hbar.col(k).dot(W.col(k))) / interference;
}

double downlink_sinr(const ChannelSample &sample, const Allocation &alloc, int k, const UserSet &active)
{
    return downlink_sinr(sample.normalized_channels(), alloc.p, alloc.W, k, active);
}

double uplink_sinr(const ComplexColumns &hbar, const RealVector &q, const ComplexColumns &W, int k,
                   const UserSet &users)
{
    if (!contains(users, k))
        throw std::invalid_argument("uplink_sinr: user " + std::to_string(k) + " is not in the user set");
    require_unit(W, k);
    double interference = 1.0;
    for (int l : users)
        if (l != k)
            interference += q(l) * std::norm(hbar.col(l).dot(W.col(k)));
    return q(k) * std::norm(hbar.col(k).dot(W.col(k))) / interference;
}

double uplink_sinr(const ChannelSample &sample, const RealVector &q, const ComplexColumns &W, int k,
                   const UserSet &users)
{
    return uplink_sinr(sample.normalized_channels(), q, W, k, users);
}

RealVector mmse_uplink_sinr(const ComplexColumns &hbar, const RealVector &q)
{
    if (hbar.cols() != q.size())
        throw std::invalid_argument("mmse_uplink_sinr: power vector length mismatch");
    if ((q.array() < 0.0).any())
        throw std::invalid_argument("mmse_uplink_sinr: negative power");

    const Eigen::Index K = hbar.cols();
    const ComplexColumns T = sherman_morrison_chain(hbar, q, hbar.rows());
    const ComplexColumns V = T * hbar;             // column k: Lambda^{-1} hbar_k
    const ComplexColumns C = hbar.adjoint() * V;   // C(l, k) = hbar_l^H Lambda^{-1} hbar_k
    const RealMatrix C2 = C.cwiseAbs2();

    RealVector gamma(K);
    for (Eigen::Index k = 0; k < K; ++k)
    {
        if (q(k) == 0.0)
        {
            gamma(k) = 0.0;
            continue;
        }
        const double cross = q.dot(C2.col(k)) - q(k) * C2(k, k);
        gamma(k) = q(k) * C2(k, k) / (cross + V.col(k).squaredNorm());
    }
    return gamma;
}

RealVector mmse_uplink_sinr(const ChannelSample &sample, const RealVector &q)
{
    return mmse_uplink_sinr(sample.normalized_channels(), q);
}

RealMatrix mmse_uplink_sinr_jacobian(const ComplexColumns &hbar, const RealVector &q)
{
    // With s_k = hbar_k^H Lambda^{-1} hbar_k the MMSE SINR collapses to
    // q_k s_k / (1 - q_k s_k), and d s_k / d q_l = -|hbar_l^H Lambda^{-1} hbar_k|^2.
    const Eigen::Index K = hbar.cols();
    const ComplexColumns T = sherman_morrison_chain(hbar, q, hbar.rows());
    const ComplexColumns G = hbar.adjoint() * T * hbar;
    const RealMatrix G2 = G.cwiseAbs2();

    RealMatrix J(K, K);
    for (Eigen::Index k = 0; k < K; ++k)
    {
        const double s = G(k, k).real();
        const double u = q(k) * s;
        const double scale = 1.0 / ((1.0 - u) * (1.0 - u));
        for (Eigen::Index l = 0; l < K; ++l)
            J(k, l) = scale * ((l == k ? s : 0.0) - q(k) * G2(l, k));
    }
    return J;
}

} // namespace usbf
