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

#include "usbf/greedy.hpp"

#include <algorithm>
#include <numeric>
#include <optional>

namespace usbf {

RealVector sinr_targets(const SystemConfig &cfg)
{
    return RealVector::Constant(cfg.K, min_sinr_threshold(RateParams::from(cfg)));
}

namespace {

struct Candidate
{
    UserSet S;
    FeasibilityResult fr;
};

Schedule to_schedule(const ComplexColumns &hbar, const Candidate &c)
{
    Schedule s;
    s.alloc = Allocation::zeros(hbar.cols(), hbar.rows());
    s.S = c.S;
    if (c.S.empty())
        return s;
    for (int k : c.S)
        s.alloc.kappa(k) = 1.0;
    s.alloc.q = c.fr.q;
    s.alloc.p = c.fr.p;
    s.alloc.W = c.fr.W;
    s.total_power = c.fr.total_power;
    return s;
}

UserSet with_user(const UserSet &S, int u)
{
    UserSet out = S;
    out.insert(std::upper_bound(out.begin(), out.end(), u), u);
    return out;
}

// Greedy expansion: repeatedly add the candidate whose inclusion needs the least
// total power, while that power fits the budget.
Candidate expand(const ComplexColumns &hbar, Candidate current, const RealVector &targets, double P)
{
    const auto K = static_cast<int>(hbar.cols());
    while (static_cast<int>(current.S.size()) < K)
    {
        std::optional<Candidate> best;
        for (int u = 0; u < K; ++u)
        {
            if (std::binary_search(current.S.begin(), current.S.end(), u))
                continue;
            UserSet trial = with_user(current.S, u);
            FeasibilityResult fr = min_power_feasibility(hbar, trial, targets, P);
            if (!fr.converged)
                continue;
            if (!best || fr.total_power < best->fr.total_power)
                best = Candidate{std::move(trial), std::move(fr)};
        }
        if (!best || !best->fr.feasible)
            break;
        current = std::move(*best);
    }
    return current;
}

bool better(const Candidate &a, const Candidate &b)
{
    if (a.S.size() != b.S.size())
        return a.S.size() > b.S.size();
    return a.fr.total_power < b.fr.total_power;
}

} // namespace

GreedyResult gusbf(const ChannelSample &sample, const SystemConfig &cfg)
{
    const ComplexColumns hbar = sample.normalized_channels();
    const RealVector targets = sinr_targets(cfg);
    const double P = cfg.power();
    const auto K = static_cast<int>(hbar.cols());

    GreedyResult out;
    out.alloc = Allocation::zeros(K, hbar.rows());

    // Seed: strongest channel, i.e. best single-user MRT rate at full power.
    std::vector<int> order(K);
    std::iota(order.begin(), order.end(), 0);
    const RealVector gain = hbar.colwise().squaredNorm().transpose();
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return gain(a) > gain(b); });

    Candidate seed{{order.front()}, min_power_feasibility(hbar, {order.front()}, targets, P)};
    if (!seed.fr.feasible)
        return out;

    Candidate best = expand(hbar, seed, targets, P);
    out.stage1_size = best.S.size();

    for (int round = 0; round < K && !best.S.empty(); ++round)
    {
        ++out.set_optimization_rounds;
        // Drop the most power-hungry user and search again.
        int worst = best.S.front();
        for (int k : best.S)
            if (best.fr.p(k) > best.fr.p(worst))
                worst = k;
        Candidate reduced;
        for (int k : best.S)
            if (k != worst)
                reduced.S.push_back(k);
        if (!reduced.S.empty())
            reduced.fr = min_power_feasibility(hbar, reduced.S, targets, P);
        Candidate again = expand(hbar, std::move(reduced), targets, P);
        if (again.S.size() > best.S.size())
        {
            best = std::move(again);
            continue;
        }
        if (better(again, best))
            best = std::move(again);
        break;
    }

    static_cast<Schedule &>(out) = to_schedule(hbar, best);
    return out;
}

Schedule exhaustive_oracle(const ChannelSample &sample, const SystemConfig &cfg)
{
    const auto K = static_cast<int>(sample.users());
    if (K > exhaustive_max_users)
        throw std::invalid_argument("exhaustive_oracle: K = " + std::to_string(K) + " exceeds the limit of " +
                                    std::to_string(exhaustive_max_users));
    const ComplexColumns hbar = sample.normalized_channels();
    const RealVector targets = sinr_targets(cfg);
    const double P = cfg.power();

    for (int size = K; size >= 1; --size)
    {
        std::optional<Candidate> best;
        // Lexicographic enumeration of size-subsets via a selection mask.
        std::vector<bool> mask(K, false);
        std::fill(mask.begin(), mask.begin() + size, true);
        do
        {
            UserSet S;
            for (int k = 0; k < K; ++k)
                if (mask[k])
                    S.push_back(k);
            FeasibilityResult fr = min_power_feasibility(hbar, S, targets, P);
            if (fr.feasible && (!best || fr.total_power < best->fr.total_power))
                best = Candidate{std::move(S), std::move(fr)};
        } while (std::prev_permutation(mask.begin(), mask.end()));
        if (best)
            return to_schedule(hbar, *best);
    }
    return to_schedule(hbar, Candidate{});
}

} // namespace usbf
