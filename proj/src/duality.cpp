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

#include "usbf/duality.hpp"

#include <algorithm>
#include <limits>

namespace usbf {

ComplexColumns mmse_beamformers(const ComplexColumns &hbar, const RealVector &q)
{
    if (hbar.cols() != q.size())
        throw std::invalid_argument("mmse_beamformers: power vector length mismatch");
    const ComplexColumns T = sherman_morrison_chain(hbar, q, hbar.rows());
    ComplexColumns W = T * hbar;
    for (Eigen::Index k = 0; k < W.cols(); ++k)
    {
        const double n = W.col(k).norm();
        if (n > 0.0)
            W.col(k) /= n;
    }
    return W;
}

ComplexVector mmse_beamformer(const ComplexColumns &hbar, const RealVector &q, int k)
{
    if (hbar.col(k).squaredNorm() == 0.0)
        throw std::invalid_argument("mmse_beamformer: zero channel for user " + std::to_string(k));
    const ComplexColumns T = sherman_morrison_chain(hbar, q, hbar.rows());
    ComplexVector w = T * hbar.col(k);
    return w / w.norm();
}

ComplexVector mmse_beamformer(const ChannelSample &sample, const RealVector &q, int k)
{
    return mmse_beamformer(sample.normalized_channels(), q, k);
}

ComplexVector mrt_beamformer(const ComplexColumns &hbar, int k)
{
    const double n = hbar.col(k).norm();
    if (n == 0.0)
        throw std::invalid_argument("mrt_beamformer: zero channel for user " + std::to_string(k));
    return hbar.col(k) / n;
}

ComplexVector mrt_beamformer(const ChannelSample &sample, int k)
{
    return mrt_beamformer(sample.normalized_channels(), k);
}

namespace {

// Solves M x = 1 for the |S| x |S| system and scatters x back to K entries.
RealVector solve_power_system(const RealMatrix &M, const UserSet &S, Eigen::Index K, const char *who)
{
    Eigen::FullPivLU<RealMatrix> lu(M);
    if (!lu.isInvertible())
        throw SingularSystem(std::string(who) + ": power system is singular");
    const RealVector x = lu.solve(RealVector::Ones(static_cast<Eigen::Index>(S.size())));
    RealVector out = RealVector::Zero(K);
    for (std::size_t i = 0; i < S.size(); ++i)
    {
        if (!(x(i) >= -1e-9))
            throw InfeasibleTargets(std::string(who) + ": targets are infeasible (negative power)");
        out(S[i]) = std::max(0.0, x(i));
    }
    return out;
}

} // namespace

RealVector downlink_to_uplink_powers(const ComplexColumns &hbar, const ComplexColumns &W, const RealVector &gammas,
                                     const UserSet &S)
{
    const auto n = static_cast<Eigen::Index>(S.size());
    RealMatrix psi(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
        {
            const double g = std::norm(hbar.col(S[j]).dot(W.col(S[i]))); // |hbar_l^H w_k|^2
            psi(i, j) = (i == j) ? g / gammas(S[i]) : -g;
        }
    return solve_power_system(psi, S, hbar.cols(), "downlink_to_uplink_powers");
}

RealVector uplink_to_downlink_powers(const ComplexColumns &hbar, const ComplexColumns &W, const RealVector &gammas,
                                     const UserSet &S)
{
    const auto n = static_cast<Eigen::Index>(S.size());
    RealMatrix d(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
        {
            const double g = std::norm(hbar.col(S[i]).dot(W.col(S[j]))); // |hbar_k^H w_l|^2
            d(i, j) = (i == j) ? g / gammas(S[i]) : -g;
        }
    return solve_power_system(d, S, hbar.cols(), "uplink_to_downlink_powers");
}

FeasibilityResult min_power_feasibility(const ComplexColumns &hbar, const UserSet &S, const RealVector &gamma_targets,
                                        double P, const FeasibilityOptions &opt)
{
    if (S.empty())
        throw std::invalid_argument("min_power_feasibility: empty user set");
    const Eigen::Index K = hbar.cols();
    const auto n = static_cast<Eigen::Index>(S.size());

    ComplexColumns hs(hbar.rows(), n);
    RealVector targets(n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        hs.col(i) = hbar.col(S[i]);
        targets(i) = gamma_targets(S[i]);
    }

    FeasibilityResult res;
    res.q = RealVector::Zero(K);
    res.p = RealVector::Zero(K);
    res.W = ComplexColumns::Zero(hbar.rows(), K);
    res.total_power = std::numeric_limits<double>::infinity();

    RealVector q = RealVector::Constant(n, 1e-3 * P / static_cast<double>(n));
    RealVector next(n);
    ComplexColumns Ws;
    for (int it = 1; it <= opt.max_iter; ++it)
    {
        res.iterations = it;
        Ws = mmse_beamformers(hs, q);
        const RealMatrix gains = (hs.adjoint() * Ws).cwiseAbs2(); // (l, k): |hbar_l^H w_k|^2
        for (Eigen::Index k = 0; k < n; ++k)
        {
            const double own = gains(k, k);
            const double interference = q.dot(gains.col(k)) - q(k) * own;
            next(k) = targets(k) * (1.0 + interference) / own;
        }
        if (!next.allFinite() || next.sum() > opt.divergence_factor * P)
            return res;
        const double change = ((next - q).cwiseAbs().array() / next.array()).maxCoeff();
        q = next;
        if (change <= opt.tol)
        {
            res.converged = true;
            break;
        }
    }
    if (!res.converged)
        return res;

    Ws = mmse_beamformers(hs, q);
    RealVector q_full = RealVector::Zero(K);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        q_full(S[i]) = q(i);
        res.W.col(S[i]) = Ws.col(i);
    }
    try
    {
        res.q = downlink_to_uplink_powers(hbar, res.W, gamma_targets, S);
        res.p = uplink_to_downlink_powers(hbar, res.W, gamma_targets, S);
    }
    catch (const std::runtime_error &)
    {
        res.converged = false;
        res.q = q_full;
        return res;
    }
    res.total_power = total_power(res.p, S);
    res.feasible = res.total_power <= P * (1.0 + 1e-12);
    return res;
}

FeasibilityResult min_power_feasibility(const ChannelSample &sample, const UserSet &S,
                                        const RealVector &gamma_targets, double P, const FeasibilityOptions &opt)
{
    return min_power_feasibility(sample.normalized_channels(), S, gamma_targets, P, opt);
}

FeasibilityCheck check_downlink_schedule(const ChannelSample &sample, const SystemConfig &cfg, const UserSet &S,
                                         const RealVector &p, const ComplexColumns &W, double rate_tol,
                                         double power_tol)
{
    // Deliberately recomputed from the raw channel rows with scalar loops so it
    // shares no code path with the schedulers it audits.
    FeasibilityCheck out;
    const RateParams rp = RateParams::from(cfg);
    const Eigen::Index N = sample.antennas();
    auto fail = [&](std::string why) {
        out.ok = false;
        if (out.reason.empty())
            out.reason = std::move(why);
    };

    for (std::size_t i = 0; i < S.size(); ++i)
    {
        const int k = S[i];
        if (k < 0 || k >= sample.users() || (i > 0 && S[i - 1] >= k))
        {
            fail("user set is not a sorted list of valid indices");
            return out;
        }
        double norm2 = 0.0;
        for (Eigen::Index n = 0; n < N; ++n)
            norm2 += std::norm(W(n, k));
        if (std::abs(std::sqrt(norm2) - 1.0) > 1e-6)
            fail("beamformer of user " + std::to_string(k) + " is not unit norm");
        if (!(p(k) >= -power_tol))
            fail("negative power for user " + std::to_string(k));
        out.total_power += p(k);
    }
    if (out.total_power > cfg.power() + power_tol)
        fail("total power " + format_double(out.total_power) + " exceeds budget " + format_double(cfg.power()));

    out.min_rate_margin = S.empty() ? 0.0 : std::numeric_limits<double>::infinity();
    for (int k : S)
    {
        auto gain = [&](int user, int beam) {
            std::complex<double> acc = 0.0;
            for (Eigen::Index n = 0; n < N; ++n)
                acc += std::conj(sample.H(user, n)) * W(n, beam);
            return std::norm(acc) / sample.sigma2(user);
        };
        double interference = 1.0;
        for (int l : S)
            if (l != k)
                interference += std::max(0.0, p(l)) * gain(k, l);
        const double sinr = std::max(0.0, p(k)) * gain(k, k) / interference;
        const double margin = fbl_rate(sinr, rp) - rp.r_nats;
        out.min_rate_margin = std::min(out.min_rate_margin, margin);
        if (margin < -rate_tol)
            fail("user " + std::to_string(k) + " misses its rate target by " + format_double(-margin) + " nats");
    }
    return out;
}

} // namespace usbf
