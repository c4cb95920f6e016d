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
#include "usbf/greedy.hpp"

#include <doctest.h>

using namespace usbf;
using namespace testing;

namespace {

void require_checked(const ChannelSample &s, const SystemConfig &cfg, const Schedule &r)
{
    const FeasibilityCheck chk = check_downlink_schedule(s, cfg, r.S, r.alloc.p, r.alloc.W);
    CHECK_MESSAGE(chk.ok, chk.reason);
    CHECK(chk.total_power == doctest::Approx(r.total_power).epsilon(1e-9));
}

} // namespace

TEST_CASE("single feasible user")
{
    const SystemConfig cfg = small_config(1, 4);
    const ChannelSample s = sample_from_columns(random_columns(4, 1, 3));
    const double need = sinr_targets(cfg)(0) / s.normalized_channels().col(0).squaredNorm();
    REQUIRE(need < cfg.power());
    for (const Schedule &r : {Schedule(gusbf(s, cfg)), exhaustive_oracle(s, cfg)})
    {
        CHECK(r.S == UserSet{0});
        CHECK(r.alloc.p(0) == doctest::Approx(need).epsilon(1e-8));
        require_checked(s, cfg, r);
    }
}

TEST_CASE("orthogonal users with ample power are all scheduled")
{
    const SystemConfig cfg = small_config(2, 2);
    ComplexColumns h = ComplexColumns::Zero(2, 2);
    h(0, 0) = 1.2;
    h(1, 1) = 0.9;
    const ChannelSample s = sample_from_columns(h);
    const double gt = sinr_targets(cfg)(0);
    REQUIRE(gt / 1.44 + gt / 0.81 < cfg.power());
    const GreedyResult r = gusbf(s, cfg);
    CHECK(r.S == UserSet{0, 1});
    require_checked(s, cfg, r);
}

TEST_CASE("individually infeasible users give an empty schedule")
{
    const SystemConfig cfg = small_config(3, 2);
    const ChannelSample s = sample_from_columns(random_columns(2, 3, 5, 1e-3));
    const GreedyResult r = gusbf(s, cfg);
    CHECK(r.S.empty());
    CHECK(r.total_power == 0.0);
    CHECK(exhaustive_oracle(s, cfg).S.empty());
}

TEST_CASE("greedy never beats the exhaustive optimum")
{
    SystemConfig cfg = small_config(6, 4, 17);
    cfg.d_l = 50.0;
    cfg.d_r = 60.0;
    const auto data = generate_dataset(cfg, 20);
    for (const ChannelSample &s : data)
    {
        const GreedyResult g = gusbf(s, cfg);
        const Schedule ex = exhaustive_oracle(s, cfg);
        CHECK(g.S.size() <= ex.S.size());
        require_checked(s, cfg, g);
        require_checked(s, cfg, ex);
        CHECK(std::is_sorted(g.S.begin(), g.S.end()));
    }
}

TEST_CASE("exhaustive oracle dominates greedy on K = 5")
{
    const SystemConfig cfg = small_config(5, 3, 23);
    for (const ChannelSample &s : generate_dataset(cfg, 10))
        CHECK(exhaustive_oracle(s, cfg).S.size() >= gusbf(s, cfg).S.size());
}

TEST_CASE("exhaustive oracle refuses large instances")
{
    const SystemConfig cfg = small_config(exhaustive_max_users + 1, 2);
    CHECK_THROWS_AS(exhaustive_oracle(generate_dataset(cfg, 1)[0], cfg), std::invalid_argument);
}
