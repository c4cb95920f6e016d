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

#ifndef USBF_RATES_HPP
#define USBF_RATES_HPP

#include "usbf/allocation.hpp"
#include "usbf/system.hpp"

namespace usbf {

// Finite-blocklength rate parameters. Rates are in nats per channel use.
struct RateParams
{
    int D = 256;
    int n_bl = 128;
    double eps = 1e-6;
    RateMode mode = RateMode::finite_blocklength;
    double theta = 0.0;  // Q^{-1}(eps) / sqrt(n)
    double r_nats = 0.0; // (D / n) ln 2

    static RateParams make(int D, int n_bl, double eps, RateMode mode = RateMode::finite_blocklength);
    static RateParams from(const SystemConfig &cfg) { return make(cfg.D, cfg.n_bl, cfg.eps, cfg.rate_mode); }
};

double shannon_capacity(double gamma);
double channel_dispersion(double gamma);

// ln(1 + gamma) - theta sqrt(V(gamma)); the dispersion term is dropped in Shannon mode.
double fbl_rate(double gamma, const RateParams &rp);

// Smallest SINR whose rate reaches r_nats (2^{D/n} - 1 in Shannon mode).
double min_sinr_threshold(const RateParams &rp);

// SINR expressions. `hbar` is the N x K normalized channel matrix and W holds
// one beamformer per column.
double downlink_sinr(const ComplexColumns &hbar, const RealVector &p, const ComplexColumns &W, int k,
                     const UserSet &active);
double downlink_sinr(const ChannelSample &sample, const Allocation &alloc, int k, const UserSet &active);

double uplink_sinr(const ComplexColumns &hbar, const RealVector &q, const ComplexColumns &W, int k,
                   const UserSet &users);
double uplink_sinr(const ChannelSample &sample, const RealVector &q, const ComplexColumns &W, int k,
                   const UserSet &users);

// Uplink SINR of every candidate under MMSE receivers at powers q; the inverse
// of I + sum_k q_k hbar_k hbar_k^H comes from the Sherman-Morrison chain.
RealVector mmse_uplink_sinr(const ComplexColumns &hbar, const RealVector &q);
RealVector mmse_uplink_sinr(const ChannelSample &sample, const RealVector &q);

// Jacobian d(gamma_hat_k)/d(q_l), row k, column l.
RealMatrix mmse_uplink_sinr_jacobian(const ComplexColumns &hbar, const RealVector &q);

} // namespace usbf

#endif
