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

#include "usbf/numerics.hpp"

#include <numbers>

namespace usbf {

double q_function_inverse(double eps)
{
    if (!(eps > 0.0 && eps <= 0.5))
        throw std::invalid_argument("q_function_inverse: eps must lie in (0, 0.5], got " + std::to_string(eps));
    if (eps == 0.5)
        return 0.0;

    // Q is strictly decreasing; Q(0) = 0.5 and Q(40) underflows far below any eps of interest.
    double lo = 0.0, hi = 40.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it)
    {
        const double mid = 0.5 * (lo + hi);
        if (q_function(mid) > eps)
            lo = mid;
        else
            hi = mid;
    }
    double x = 0.5 * (lo + hi);

    // Newton polish; Q'(x) = -phi(x).
    for (int it = 0; it < 3; ++it)
    {
        const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
        if (pdf <= 0.0)
            break;
        const double step = (q_function(x) - eps) / pdf;
        if (!std::isfinite(step) || std::abs(step) > 1e-6)
            break;
        x += step;
    }
    return x;
}

} // namespace usbf
