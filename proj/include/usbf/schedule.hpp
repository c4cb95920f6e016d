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

#ifndef USBF_SCHEDULE_HPP
#define USBF_SCHEDULE_HPP

#include "usbf/duality.hpp"

namespace usbf {

// A scheduled set and the allocation serving it. kappa is 1 on S, 0 elsewhere.
struct Schedule
{
    UserSet S;
    Allocation alloc;
    double total_power = 0.0;
};

// Users whose uplink SINR is at least (1 - tol) times their target pass verification.
inline constexpr double verification_tolerance = 1e-8;

// Serves the claimed users at fixed uplink powers q: MMSE receivers are formed
// over the claimed set, the user with the largest relative SINR deficit is
// dropped until every remaining user meets its target, and downlink powers
// follow from the achieved SINRs through duality (so sum p = sum q on S).
Schedule filter_claimed(const ComplexColumns &hbar, const RealVector &q, const UserSet &claimed,
                        const RealVector &gamma_targets);

} // namespace usbf

#endif
