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

#ifndef USBF_ALLOCATION_HPP
#define USBF_ALLOCATION_HPP

#include "usbf/numerics.hpp"

#include <vector>

namespace usbf {

// Sorted list of scheduled user indices.
using UserSet = std::vector<int>;

// Joint decision state over all K candidates. W is N x K; column k is w_k and
// is unit norm whenever kappa_k > 0.
struct Allocation
{
    RealVector kappa;
    RealVector q;
    RealVector p;
    ComplexColumns W;

    static Allocation zeros(Eigen::Index K, Eigen::Index N)
    {
        return {RealVector::Zero(K), RealVector::Zero(K), RealVector::Zero(K), ComplexColumns::Zero(N, K)};
    }
};

// Users with kappa_k == 1.
inline UserSet scheduled_users(const Allocation &a)
{
    UserSet s;
    for (Eigen::Index k = 0; k < a.kappa.size(); ++k)
        if (a.kappa(k) == 1.0)
            s.push_back(static_cast<int>(k));
    return s;
}

inline double total_power(const RealVector &v, const UserSet &S)
{
    double sum = 0.0;
    for (int k : S)
        sum += v(k);
    return sum;
}

} // namespace usbf

#endif
