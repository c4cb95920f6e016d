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

#ifndef USBF_TEST_HELPERS_HPP
#define USBF_TEST_HELPERS_HPP

#include "usbf/system.hpp"

#include <random>

namespace testing {

using namespace usbf;

// N x K complex Gaussian columns with unit-variance entries.
inline ComplexColumns random_columns(Eigen::Index N, Eigen::Index K, std::uint64_t seed, double scale = 1.0)
{
    Rng rng(seed);
    std::normal_distribution<double> n(0.0, std::sqrt(0.5) * scale);
    ComplexColumns c(N, K);
    for (Eigen::Index j = 0; j < K; ++j)
        for (Eigen::Index i = 0; i < N; ++i)
            c(i, j) = {n(rng), n(rng)};
    return c;
}

inline RealVector random_uniform(Eigen::Index n, double lo, double hi, std::uint64_t seed)
{
    Rng rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    RealVector v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v(i) = u(rng);
    return v;
}

// Sample with unit noise whose channel rows are the given columns.
inline ChannelSample sample_from_columns(const ComplexColumns &hbar)
{
    ChannelSample s;
    s.H = hbar.transpose();
    s.sigma2 = RealVector::Ones(hbar.cols());
    s.distances_m = RealVector::Constant(hbar.cols(), 75.0);
    return s;
}

inline SystemConfig small_config(int K, int N, std::uint64_t seed = 1)
{
    SystemConfig cfg;
    cfg.K = K;
    cfg.N = N;
    cfg.rng_seed = seed;
    return cfg;
}

inline double rel_fro(const ComplexMatrix &a, const ComplexMatrix &b)
{
    return (a - b).norm() / b.norm();
}

} // namespace testing

#endif
