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

#include "usbf/schedule.hpp"

#include <algorithm>

namespace usbf {

Schedule filter_claimed(const ComplexColumns &hbar, const RealVector &q, const UserSet &claimed,
                        const RealVector &gamma_targets)
{
    const Eigen::Index K = hbar.cols();
    if (q.size() != K || gamma_targets.size() != K)
        throw std::invalid_argument("filter_claimed: vector length mismatch");
    Schedule out;
    out.alloc = Allocation::zeros(K, hbar.rows());

    UserSet S;
    for (int k : claimed)
        if (q(k) > 0.0 && hbar.col(k).squaredNorm() > 0.0)
            S.push_back(k);

    ComplexColumns W;
    RealVector sinr;
    while (!S.empty())
    {
        RealVector qs = RealVector::Zero(K);
        for (int k : S)
            qs(k) = q(k);
        const ComplexColumns all = mmse_beamformers(hbar, qs);
        W = ComplexColumns::Zero(hbar.rows(), K);
        for (int k : S)
            W.col(k) = all.col(k);
        sinr = RealVector::Zero(K);
        int worst = -1;
        double worst_deficit = verification_tolerance;
        for (int k : S)
        {
            sinr(k) = uplink_sinr(hbar, qs, W, k, S);
            const double deficit = (gamma_targets(k) - sinr(k)) / gamma_targets(k);
            if (deficit > worst_deficit)
            {
                worst = k;
                worst_deficit = deficit;
            }
        }
        if (worst < 0)
            break;
        S.erase(std::find(S.begin(), S.end(), worst));
    }
    if (S.empty())
        return out;

    try
    {
        out.alloc.q = downlink_to_uplink_powers(hbar, W, sinr, S);
        out.alloc.p = uplink_to_downlink_powers(hbar, W, sinr, S);
    }
    catch (const std::runtime_error &)
    {
        return Schedule{{}, Allocation::zeros(K, hbar.rows()), 0.0};
    }
    out.S = S;
    for (int k : S)
        out.alloc.kappa(k) = 1.0;
    out.alloc.W = W;
    out.total_power = total_power(out.alloc.p, S);
    return out;
}

} // namespace usbf
