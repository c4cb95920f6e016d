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

#include "helpers.hpp"
#include "usbf/duality.hpp"
#include "usbf/greedy.hpp"

#include <doctest.h>

using namespace usbf;
using namespace testing;

namespace {

ComplexColumns orthogonal_pair(double a, double b)
{
    ComplexColumns h = ComplexColumns::Zero(2, 2);
    h(0, 0) = a;
    h(1, 1) = b;
    return h;
}

double gain(const ComplexColumns &h, const ComplexColumns &w, int a, int b)
{
    return std::norm(h.col(a).dot(w.col(b)));
}

} // namespace

TEST_CASE("MMSE beamformer special cases")
{
    const ComplexColumns h1 = random_columns(5, 1, 1);
    RealVector q(1);
    q << 4.0;
    const ComplexVector mrt = h1.col(0) / h1.col(0).norm();
    CHECK((mmse_beamformer(h1, q, 0) - mrt).norm() < 1e-12);

    const ComplexColumns h = random_columns(4, 3, 2);
    const ComplexColumns W = mmse_beamformers(h, RealVector::Zero(3));
    for (int k = 0; k < 3; ++k)
        CHECK((W.col(k) - h.col(k) / h.col(k).norm()).norm() < 1e-12);
    CHECK((mrt_beamformer(h, 1) - h.col(1) / h.col(1).norm()).norm() < 1e-15);
}

TEST_CASE("MMSE beamformer maximizes the uplink SINR")
{
    const int K = 4, N = 8;
    const ComplexColumns h = random_columns(N, K, 3);
    const RealVector q = random_uniform(K, 0.5, 2.0, 4);
    const UserSet all{0, 1, 2, 3};
    ComplexColumns W = mmse_beamformers(h, q);
    const ComplexColumns dirs = random_columns(N, 100, 5);
    for (int k = 0; k < K; ++k)
    {
        CHECK(std::abs(W.col(k).norm() - 1.0) < 1e-12);
        const double best = uplink_sinr(h, q, W, k, all);
        for (int d = 0; d < 100; ++d)
        {
            ComplexColumns V = W;
            V.col(k) = W.col(k) + 0.05 * dirs.col(d) / dirs.col(d).norm();
            V.col(k).normalize();
            CHECK(uplink_sinr(h, q, V, k, all) <= best * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("power solves for a single user and orthogonal users")
{
    const ComplexColumns h = random_columns(3, 1, 6);
    const ComplexColumns w = mrt_beamformer(h, 0);
    RealVector g(1);
    g << 2.0;
    const double expect = 2.0 / gain(h, w, 0, 0);
    CHECK(downlink_to_uplink_powers(h, w, g, {0})(0) == doctest::Approx(expect).epsilon(1e-13));
    CHECK(uplink_to_downlink_powers(h, w, g, {0})(0) == doctest::Approx(expect).epsilon(1e-13));

    const ComplexColumns ho = orthogonal_pair(1.5, 0.5);
    const ComplexColumns wo = ComplexColumns::Identity(2, 2);
    RealVector go(2);
    go << 1.0, 3.0;
    const RealVector qo = downlink_to_uplink_powers(ho, wo, go, {0, 1});
    const RealVector po = uplink_to_downlink_powers(ho, wo, go, {0, 1});
    CHECK(qo(0) == doctest::Approx(1.0 / 2.25));
    CHECK(qo(1) == doctest::Approx(3.0 / 0.25));
    CHECK(po(0) == doctest::Approx(qo(0)));
    CHECK(po(1) == doctest::Approx(qo(1)));
}

TEST_CASE("power solves reproduce their targets and conserve total power")
{
    for (std::uint64_t seed = 0; seed < 10; ++seed)
    {
        const int K = 5;
        const ComplexColumns h = random_columns(6, K, 700 + seed);
        const RealVector q0 = random_uniform(K, 0.5, 1.5, 800 + seed);
        const ComplexColumns W = mmse_beamformers(h, q0);
        const UserSet S{0, 2, 4};
        RealVector g = RealVector::Zero(K);
        for (int k : S)
            g(k) = 0.3 + 0.1 * k;
        const RealVector q = downlink_to_uplink_powers(h, W, g, S);
        const RealVector p = uplink_to_downlink_powers(h, W, g, S);
        for (int k : S)
        {
            CHECK(std::abs(uplink_sinr(h, q, W, k, S) - g(k)) <= 1e-8 * g(k));
            CHECK(std::abs(downlink_sinr(h, p, W, k, S) - g(k)) <= 1e-8 * g(k));
        }
        CHECK(q(1) == 0.0);
        CHECK(p(3) == 0.0);
        CHECK(std::abs(p.sum() - q.sum()) <= 1e-6 * q.sum());
    }
}

TEST_CASE("min-power feasibility closed forms")
{
    const ComplexColumns h = random_columns(4, 1, 9);
    RealVector g(1);
    g << 1.5;
    const double need = 1.5 / h.col(0).squaredNorm();
    const FeasibilityResult ok = min_power_feasibility(h, {0}, g, need * 1.01);
    CHECK(ok.feasible);
    CHECK(ok.p(0) == doctest::Approx(need).epsilon(1e-9));
    CHECK_FALSE(min_power_feasibility(h, {0}, g, need * 0.99).feasible);

    const ComplexColumns ho = orthogonal_pair(1.0, 2.0);
    RealVector go(2);
    go << 1.0, 2.0;
    const FeasibilityResult r = min_power_feasibility(ho, {0, 1}, go, 10.0);
    CHECK(r.feasible);
    CHECK(r.p(0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.p(1) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK_FALSE(min_power_feasibility(ho, {0, 1}, go, 1.4).feasible);
}

TEST_CASE("min-power feasibility meets targets and beats a power grid")
{
    const int K = 3;
    const ComplexColumns h = random_columns(3, K, 13);
    const RealVector g = RealVector::Constant(K, 0.8);
    const FeasibilityResult r = min_power_feasibility(h, {0, 1, 2}, g, 100.0);
    REQUIRE(r.feasible);
    const UserSet S{0, 1, 2};
    for (int k = 0; k < K; ++k)
        CHECK(std::abs(downlink_sinr(h, r.p, r.W, k, S) - g(k)) <= 1e-6 * g(k));
    CHECK(std::abs(r.p.sum() - r.q.sum()) <= 1e-6 * r.q.sum());

    // Grid over downlink powers with the returned beams.
    const double top = 2.0 * r.p.maxCoeff();
    const int n = 50;
    double best = std::numeric_limits<double>::infinity();
    RealVector p(K);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
            {
                p << top * a / (n - 1), top * b / (n - 1), top * c / (n - 1);
                bool meets = true;
                for (int k = 0; k < K && meets; ++k)
                    meets = downlink_sinr(h, p, r.W, k, S) >= g(k);
                if (meets)
                    best = std::min(best, p.sum());
            }
    CHECK(r.total_power <= best + 1e-9);
}

TEST_CASE("independent checker")
{
    SystemConfig cfg = small_config(2, 2);
    ChannelSample s = sample_from_columns(orthogonal_pair(2.0, 2.0));
    const double gt = sinr_targets(cfg)(0);
    RealVector p(2);
    p << gt / 4.0, gt / 4.0;
    const ComplexColumns W = ComplexColumns::Identity(2, 2);
    const FeasibilityCheck ok = check_downlink_schedule(s, cfg, {0, 1}, p, W);
    CHECK(ok.ok);
    CHECK(ok.total_power == doctest::Approx(gt / 2.0));
    CHECK(std::abs(ok.min_rate_margin) < 1e-9);

    RealVector low = p;
    low(1) *= 0.99;
    CHECK_FALSE(check_downlink_schedule(s, cfg, {0, 1}, low, W).ok);

    cfg.snr_db = 10.0 * std::log10(0.4 * gt); // P below gt / 2
    CHECK_FALSE(check_downlink_schedule(s, cfg, {0, 1}, p, W).ok);
    CHECK(check_downlink_schedule(s, cfg, {}, RealVector::Zero(2), W).ok);
}
