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
#include "usbf/numerics.hpp"

#include <doctest.h>

using namespace usbf;
using namespace testing;

TEST_CASE("hermitian_inverse of the identity and a diagonal")
{
    const ComplexMatrix I = ComplexMatrix::Identity(3, 3);
    CHECK(hermitian_inverse(I).isApprox(I, 1e-15));

    ComplexMatrix D = ComplexMatrix::Zero(2, 2);
    D(0, 0) = 2.0;
    D(1, 1) = 4.0;
    const ComplexMatrix inv = hermitian_inverse(D);
    CHECK(inv(0, 0).real() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(inv(1, 1).real() == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(std::abs(inv(0, 1)) == 0.0);
}

TEST_CASE("hermitian_inverse times the input is the identity")
{
    const ComplexColumns h = random_columns(8, 6, 11);
    const RealVector q = random_uniform(6, 0.1, 3.0, 12);
    const ComplexMatrix L = regularized_gram(h, q);
    const ComplexMatrix inv = hermitian_inverse(L);
    CHECK((inv * L - ComplexMatrix::Identity(8, 8)).norm() < 1e-12);
    CHECK(is_hermitian(inv, 0.0));
}

TEST_CASE("hermitian_inverse rejects bad input")
{
    CHECK_THROWS_AS(hermitian_inverse(ComplexMatrix::Zero(2, 3)), std::invalid_argument);
    ComplexMatrix neg = -ComplexMatrix::Identity(2, 2);
    CHECK_THROWS_AS(hermitian_inverse(neg), FactorizationError);
}

TEST_CASE("sherman_morrison_chain base and scalar cases")
{
    const ComplexColumns none(4, 0);
    CHECK(sherman_morrison_chain(none, RealVector(0), 4).isApprox(ComplexMatrix::Identity(4, 4)));

    ComplexColumns h(1, 1);
    h(0, 0) = 1.0;
    RealVector q(1);
    q << 1.0;
    CHECK(sherman_morrison_chain(h, q, 1)(0, 0).real() == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("sherman_morrison_chain matches the direct inverse")
{
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
        const ComplexColumns h = random_columns(16, 24, 100 + seed);
        RealVector q = random_uniform(24, 0.0, 2.0, 200 + seed);
        q(3) = 0.0; // skipped users are exact
        const ComplexMatrix chain = sherman_morrison_chain(h, q, 16);
        const ComplexMatrix direct = hermitian_inverse(regularized_gram(h, q));
        CHECK(rel_fro(chain, direct) <= 1e-8);
        CHECK(is_hermitian(chain));
    }
}

TEST_CASE("sherman_morrison_chain is insensitive to user order")
{
    const ComplexColumns h = random_columns(6, 5, 7);
    const RealVector q = random_uniform(5, 0.5, 1.5, 8);
    const ComplexColumns hr = h.rowwise().reverse();
    const RealVector qr = q.reverse();
    CHECK(rel_fro(sherman_morrison_chain(h, q, 6), sherman_morrison_chain(hr, qr, 6)) < 1e-12);
}

TEST_CASE("sherman_morrison_chain validates shapes")
{
    const ComplexColumns h = random_columns(3, 2, 1);
    CHECK_THROWS_AS(sherman_morrison_chain(h, RealVector::Ones(2), 4), std::invalid_argument);
    CHECK_THROWS_AS(sherman_morrison_chain(h, RealVector::Ones(3), 3), std::invalid_argument);
}

TEST_CASE("sherman_morrison_chain reports a vanishing denominator")
{
    ComplexColumns h(1, 1);
    h(0, 0) = 1.0;
    RealVector q(1);
    q << -1.0;
    CHECK_THROWS_AS(sherman_morrison_chain(h, q, 1), NumericalBreakdown);
}

TEST_CASE("q_function_inverse")
{
    CHECK(std::abs(q_function_inverse(0.5)) < 1e-12);

    // Bisection on Q(x) - 1e-6 over [0, 10].
    double lo = 0.0, hi = 10.0;
    for (int i = 0; i < 200; ++i)
    {
        const double mid = 0.5 * (lo + hi);
        (0.5 * std::erfc(mid / std::sqrt(2.0)) > 1e-6 ? lo : hi) = mid;
    }
    CHECK(q_function_inverse(1e-6) == doctest::Approx(lo).epsilon(1e-9));
    CHECK(std::abs(q_function_inverse(1e-6) - 4.75342) < 1e-4);

    for (double e : {1e-3, 1e-6, 1e-9})
        CHECK(std::abs(q_function(q_function_inverse(e)) - e) <= 1e-9 * e + 1e-18);

    CHECK_THROWS(q_function_inverse(0.0));
    CHECK_THROWS(q_function_inverse(1.0));
}
