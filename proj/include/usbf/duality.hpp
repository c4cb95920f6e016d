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

#ifndef USBF_DUALITY_HPP
#define USBF_DUALITY_HPP

#include "usbf/allocation.hpp"
#include "usbf/rates.hpp"
#include "usbf/system.hpp"

#include <string>

namespace usbf {

class SingularSystem : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class InfeasibleTargets : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// MMSE receive/transmit filter of user k at uplink powers q (Sherman-Morrison path).
ComplexVector mmse_beamformer(const ComplexColumns &hbar, const RealVector &q, int k);
ComplexVector mmse_beamformer(const ChannelSample &sample, const RealVector &q, int k);
// All K MMSE filters at once; columns for zero channels are left zero.
ComplexColumns mmse_beamformers(const ComplexColumns &hbar, const RealVector &q);

ComplexVector mrt_beamformer(const ComplexColumns &hbar, int k);
ComplexVector mrt_beamformer(const ChannelSample &sample, int k);

// q = Psi^{-1} 1 on S, achieving uplink SINR gammas_k with receivers W.
// Vectors are indexed over all K users; entries outside S are zero.
RealVector downlink_to_uplink_powers(const ComplexColumns &hbar, const ComplexColumns &W, const RealVector &gammas,
                                     const UserSet &S);
// p = D^{-1} 1 on S, achieving downlink SINR gammas_k with transmit beams W.
RealVector uplink_to_downlink_powers(const ComplexColumns &hbar, const ComplexColumns &W, const RealVector &gammas,
                                     const UserSet &S);

struct FeasibilityOptions
{
    int max_iter = 500;
    double tol = 1e-8;
    double divergence_factor = 1e3; // sum q above factor * P counts as infeasible
};

struct FeasibilityResult
{
    bool feasible = false;  // converged and sum p <= P
    bool converged = false;
    int iterations = 0;
    double total_power = 0.0; // sum p on S (infinity when not converged)
    RealVector q;             // K-length, zero outside S
    RealVector p;             // K-length, zero outside S
    ComplexColumns W;         // N x K, MMSE beams on S
};

// Minimum total power meeting gamma_targets on S, via the interference-function
// fixed point with interleaved MMSE receiver updates, then mapped to downlink
// powers through duality.
FeasibilityResult min_power_feasibility(const ComplexColumns &hbar, const UserSet &S, const RealVector &gamma_targets,
                                        double P, const FeasibilityOptions &opt = {});
FeasibilityResult min_power_feasibility(const ChannelSample &sample, const UserSet &S,
                                        const RealVector &gamma_targets, double P,
                                        const FeasibilityOptions &opt = {});

// Independent check of a downlink schedule, recomputed from the raw channels.
struct FeasibilityCheck
{
    bool ok = true;
    double total_power = 0.0;
    double min_rate_margin = 0.0; // min over S of rate - r (nats); 0 for an empty set
    std::string reason;
};

FeasibilityCheck check_downlink_schedule(const ChannelSample &sample, const SystemConfig &cfg, const UserSet &S,
                                         const RealVector &p, const ComplexColumns &W, double rate_tol = 1e-6,
                                         double power_tol = 1e-6);

} // namespace usbf

#endif
