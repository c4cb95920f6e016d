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

#include "usbf/sca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace usbf {

double sca_objective(const RealVector &kappa, double lambda)
{
    return -kappa.sum() + lambda * (kappa.sum() - kappa.squaredNorm());
}

RealVector capped_simplex_projection(const RealVector &q, double P)
{
    if (P < 0.0)
        throw std::invalid_argument("capped_simplex_projection: negative budget");
    RealVector out = q.cwiseMax(0.0);
    if (out.sum() <= P)
        return out;
    // Projection onto {q >= 0, sum(q) = P}: shift by the threshold theta.
    std::vector<double> u(q.data(), q.data() + q.size());
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j)
    {
        cumulative += u[j];
        const double t = (cumulative - P) / static_cast<double>(j + 1);
        if (u[j] - t > 0.0)
            theta = t;
    }
    return (q.array() - theta).cwiseMax(0.0).matrix();
}

// ---------------------------------------------------------------------------
// Surrogate problem

double InnerProblem::g(const RealVector &kappa) const
{
    const double s = kappa.sum();
    return lambda * (s + s * s);
}

double InnerProblem::h(const RealVector &kappa) const
{
    const double s = kappa.sum();
    return lambda * (kappa.squaredNorm() + s * s);
}

double InnerProblem::psi(const RealVector &kappa) const
{
    const double s0 = kappa0.sum();
    const RealVector slope = 2.0 * lambda * (kappa0.array() + s0).matrix();
    return h(kappa0) + slope.dot(kappa - kappa0);
}

double InnerProblem::objective(const RealVector &kappa) const
{
    return -kappa.sum() + g(kappa) - psi(kappa);
}

RealVector InnerProblem::objective_gradient(const RealVector &kappa) const
{
    const double s = kappa.sum();
    const double s0 = kappa0.sum();
    RealVector grad(kappa.size());
    for (Eigen::Index k = 0; k < kappa.size(); ++k)
        grad(k) = -1.0 + lambda * (1.0 + 2.0 * s) - 2.0 * lambda * (kappa0(k) + s0);
    return grad;
}

RealVector InnerProblem::convex_part(const RealVector &kappa, const RealVector &q) const
{
    const RealVector I = cross * q;
    return (0.5 * (targets.cwiseProduct(kappa) + I).array().square()).matrix();
}

RealVector InnerProblem::concave_exact(const RealVector &kappa, const RealVector &q) const
{
    const RealVector I = cross * q;
    return (0.5 * targets.cwiseProduct(kappa).array().square() + 0.5 * I.array().square()).matrix();
}

RealVector InnerProblem::concave_tangent(const RealVector &kappa, const RealVector &q) const
{
    const RealVector dq = cross * (q - q0);
    RealVector out(users());
    for (Eigen::Index k = 0; k < users(); ++k)
    {
        const double g2 = targets(k) * targets(k);
        out(k) = 0.5 * g2 * kappa0(k) * kappa0(k) + 0.5 * interference0(k) * interference0(k) +
                 g2 * kappa0(k) * (kappa(k) - kappa0(k)) + interference0(k) * dq(k);
    }
    return out;
}

RealVector InnerProblem::constraints(const RealVector &kappa, const RealVector &q) const
{
    return (targets.cwiseProduct(kappa) - q.cwiseProduct(own)) + convex_part(kappa, q) - concave_tangent(kappa, q);
}

RealVector InnerProblem::exact_constraints(const RealVector &kappa, const RealVector &q) const
{
    const RealVector I = cross * q;
    return (targets.cwiseProduct(kappa).array() * (1.0 + I.array()) - q.cwiseProduct(own).array()).matrix();
}

void InnerProblem::constraint_gradient(const RealVector &kappa, const RealVector &q, const RealVector &y,
                                       RealVector &g_kappa, RealVector &g_q) const
{
    const RealVector I = cross * q;
    g_kappa.resize(users());
    // d c_k / d q_l = -a_k delta_kl + (gt_k kappa_k + I_k - I0_k) B(k, l)
    RealVector coeff(users());
    for (Eigen::Index k = 0; k < users(); ++k)
    {
        const double gk = targets(k);
        g_kappa(k) = y(k) * (gk + gk * (gk * kappa(k) + I(k)) - gk * gk * kappa0(k));
        coeff(k) = y(k) * (gk * kappa(k) + I(k) - interference0(k));
    }
    g_q = cross.transpose() * coeff - y.cwiseProduct(own);
}

InnerProblem build_inner_problem(const ScaState &state, const ComplexColumns &hbar, const RealVector &gamma_tilde,
                                 double P)
{
    const Eigen::Index K = hbar.cols();
    if (state.kappa.size() != K || state.q.size() != K || state.W.cols() != K || gamma_tilde.size() != K)
        throw std::invalid_argument("build_inner_problem: dimension mismatch");
    InnerProblem pr;
    pr.targets = gamma_tilde;
    // gains(l, k) = |hbar_l^H w_k|^2
    const RealMatrix gains = (hbar.adjoint() * state.W).cwiseAbs2();
    pr.own = gains.diagonal();
    pr.cross = gains.transpose();
    pr.cross.diagonal().setZero();
    pr.kappa0 = state.kappa;
    pr.q0 = state.q;
    pr.interference0 = pr.cross * state.q;
    pr.lambda = state.lambda;
    pr.P = P;
    return pr;
}

// ---------------------------------------------------------------------------
// Inner solver

namespace {

// Stacked inequality system f(x) <= 0 for x = (kappa, q):
// rows [0, K) the scaled surrogate constraints, then kappa >= 0, kappa <= 1,
// q >= 0 and sum(q) <= P.
struct Inequalities
{
    const InnerProblem &pr;
    RealVector scale;

    Eigen::Index K() const { return pr.users(); }
    Eigen::Index count() const { return 4 * K() + 1; }

    RealVector values(const RealVector &x) const
    {
        const Eigen::Index K = this->K();
        const RealVector kappa = x.head(K), q = x.tail(K);
        RealVector f(count());
        f.head(K) = pr.constraints(kappa, q).cwiseQuotient(scale);
        f.segment(K, K) = -kappa;
        f.segment(2 * K, K) = kappa.array() - 1.0;
        f.segment(3 * K, K) = -q;
        f(4 * K) = q.sum() - pr.P;
        return f;
    }

    RealMatrix jacobian(const RealVector &x) const
    {
        const Eigen::Index K = this->K();
        const RealVector kappa = x.head(K), q = x.tail(K);
        RealMatrix J = RealMatrix::Zero(count(), 2 * K);
        for (Eigen::Index k = 0; k < K; ++k)
        {
            RealVector e = RealVector::Zero(K), gk, gq;
            e(k) = 1.0 / scale(k);
            pr.constraint_gradient(kappa, q, e, gk, gq);
            J.block(k, 0, 1, K) = gk.transpose();
            J.block(k, K, 1, K) = gq.transpose();
            J(K + k, k) = -1.0;
            J(2 * K + k, k) = 1.0;
            J(3 * K + k, K + k) = -1.0;
            J(4 * K, K + k) = 1.0;
        }
        return J;
    }

    // Hessian of the Lagrangian: objective curvature plus z-weighted constraint curvature.
    RealMatrix hessian(const RealVector &z) const
    {
        const Eigen::Index K = this->K();
        RealMatrix H = RealMatrix::Zero(2 * K, 2 * K);
        H.topLeftCorner(K, K).setConstant(2.0 * pr.lambda);
        for (Eigen::Index k = 0; k < K; ++k)
        {
            RealVector v = RealVector::Zero(2 * K);
            v(k) = pr.targets(k);
            v.tail(K) = pr.cross.row(k).transpose();
            H.selfadjointView<Eigen::Lower>().rankUpdate(v, z(k) / scale(k));
        }
        return H.selfadjointView<Eigen::Lower>();
    }
};

double max_step(const RealVector &v, const RealVector &dv)
{
    double alpha = 1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (dv(i) < 0.0)
            alpha = std::min(alpha, -v(i) / dv(i));
    return alpha;
}

} // namespace

InnerSolution solve_inner(const InnerProblem &problem, const RealVector &kappa_start, const RealVector &q_start,
                          const InnerOptions &opt)
{
    const Eigen::Index K = problem.users();
    if (kappa_start.size() != K || q_start.size() != K)
        throw std::invalid_argument("solve_inner: start point dimension mismatch");
    InnerSolution out;
    if (K == 0)
    {
        out.kappa = out.q = out.multipliers = RealVector::Zero(0);
        out.success = true;
        return out;
    }

    RealVector x(2 * K);
    x << kappa_start.cwiseMax(0.0).cwiseMin(1.0), capped_simplex_projection(q_start, problem.P);

    // Each surrogate constraint is measured in units of its gradient norm at the start.
    Inequalities ineq{problem, RealVector::Ones(K)};
    {
        const RealMatrix J = ineq.jacobian(x);
        for (Eigen::Index k = 0; k < K; ++k)
            ineq.scale(k) = std::max(1.0, J.row(k).norm());
    }

    const Eigen::Index m = ineq.count();
    RealVector f = ineq.values(x);
    RealVector s = (-f).cwiseMax(1.0);
    RealVector z = RealVector::Ones(m);
    RealVector grad0(2 * K);
    for (int it = 0; it < opt.max_iterations; ++it)
    {
        out.iterations = it;
        const RealMatrix J = ineq.jacobian(x);
        grad0 << problem.objective_gradient(x.head(K)), RealVector::Zero(K);
        const RealVector r_d = grad0 + J.transpose() * z;
        const RealVector r_p = f + s;
        const double mu = s.dot(z) / static_cast<double>(m);
        if (r_p.lpNorm<Eigen::Infinity>() <= opt.feasibility_tol && r_d.lpNorm<Eigen::Infinity>() <= opt.optimality_tol &&
            mu <= opt.gap_tol)
            break;

        const RealVector d = z.cwiseQuotient(s);
        RealMatrix M = ineq.hessian(z);
        M.noalias() += J.transpose() * d.asDiagonal() * J;
        const Eigen::LDLT<RealMatrix> ldlt(M);
        if (ldlt.info() != Eigen::Success)
            break;

        auto direction = [&](const RealVector &r_c, RealVector &dx, RealVector &ds, RealVector &dz) {
            const RealVector rhs = -r_d - J.transpose() * ((z.cwiseProduct(r_p) - r_c).cwiseQuotient(s));
            dx = ldlt.solve(rhs);
            ds = -r_p - J * dx;
            dz = (-r_c - z.cwiseProduct(ds)).cwiseQuotient(s);
        };

        RealVector dx, ds, dz;
        direction(s.cwiseProduct(z), dx, ds, dz);
        const double a_aff = std::min(max_step(s, ds), max_step(z, dz));
        const double mu_aff = (s + a_aff * ds).dot(z + a_aff * dz) / static_cast<double>(m);
        const double sigma = std::pow(mu_aff / mu, 3.0);
        const RealVector r_c = (s.cwiseProduct(z) + ds.cwiseProduct(dz)).array() - sigma * mu;
        direction(r_c, dx, ds, dz);
        const double alpha = std::min(1.0, 0.99 * std::min(max_step(s, ds), max_step(z, dz)));
        if (!dx.allFinite())
            break;
        x += alpha * dx;
        s += alpha * ds;
        z += alpha * dz;
        f = ineq.values(x);
        // The linearized slack misses the curvature of the quadratic rows; keep s positive.
        s = s.cwiseMax(1e-300);
    }

    out.kappa = x.head(K).cwiseMax(0.0).cwiseMin(1.0);
    out.q = capped_simplex_projection(x.tail(K), problem.P);
    out.zeta = problem.objective(out.kappa);
    out.max_violation = problem.constraints(out.kappa, out.q).cwiseMax(0.0).maxCoeff();
    out.multipliers = z.head(K).cwiseQuotient(ineq.scale);
    out.success = out.max_violation <= 1e-6;
    return out;
}

// ---------------------------------------------------------------------------
// Outer algorithm

UserSet sca_initial_set(const ComplexColumns &hbar, const RealVector &gamma_tilde, double P)
{
    const auto K = static_cast<int>(hbar.cols());
    const RealVector gain = hbar.colwise().squaredNorm().transpose();
    std::vector<int> order;
    for (int k = 0; k < K; ++k)
        if (P * gain(k) >= gamma_tilde(k))
            order.push_back(k);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return gain(a) > gain(b); });

    ComplexColumns W = ComplexColumns::Zero(hbar.rows(), K);
    for (int k : order)
        W.col(k) = mrt_beamformer(hbar, k);

    UserSet S;
    for (int c : order)
    {
        UserSet trial = S;
        trial.insert(std::upper_bound(trial.begin(), trial.end(), c), c);
        const RealVector p = RealVector::Constant(K, P / static_cast<double>(trial.size()));
        bool ok = true;
        for (int k : trial)
            if (downlink_sinr(hbar, p, W, k, trial) < gamma_tilde(k))
            {
                ok = false;
                break;
            }
        if (ok)
            S = std::move(trial);
    }
    return S;
}

namespace {

int count_claimed(const RealVector &kappa, double threshold)
{
    return static_cast<int>((kappa.array() >= threshold).count());
}

} // namespace

ScaResult sca_usbf(const ChannelSample &sample, const SystemConfig &cfg, const ScaOptions &opt)
{
    const ComplexColumns hbar = sample.normalized_channels();
    const RealVector targets = sinr_targets(cfg);
    const double P = cfg.power();
    const Eigen::Index K = hbar.cols();
    const Eigen::Index N = hbar.rows();

    ScaResult out;
    out.alloc = Allocation::zeros(K, N);
    out.initial_set = sca_initial_set(hbar, targets, P);
    if (out.initial_set.empty())
    {
        out.trace.kappa_before_rounding = RealVector::Zero(K);
        return out;
    }

    ScaState st;
    st.lambda = cfg.lambda;
    st.delta = cfg.delta;
    st.kappa = RealVector::Zero(K);
    st.W = ComplexColumns::Zero(N, K);
    for (Eigen::Index k = 0; k < K; ++k)
        if (hbar.col(k).squaredNorm() > 0.0)
            st.W.col(k) = mrt_beamformer(hbar, static_cast<int>(k));
    {
        const UserSet &S0 = out.initial_set;
        const RealVector p0 = RealVector::Constant(K, P / static_cast<double>(S0.size()));
        RealVector achieved = targets;
        for (int k : S0)
        {
            st.kappa(k) = 1.0;
            achieved(k) = downlink_sinr(hbar, p0, st.W, k, S0);
        }
        st.q = downlink_to_uplink_powers(hbar, st.W, achieved, S0);
        st.q = capped_simplex_projection(st.q, P);
    }
    st.multipliers = RealVector::Zero(K);
    st.upsilon = sca_objective(st.kappa, st.lambda);
    st.zeta = st.upsilon;
    out.trace.upsilon.push_back(st.upsilon);

    auto relative_change = [](double now, double before) {
        const double denom = std::abs(before);
        return denom > 0.0 ? std::abs(now - before) / denom : std::abs(now - before);
    };

    for (st.tau = 1; st.tau <= opt.max_outer; ++st.tau)
    {
        std::vector<double> zetas{sca_objective(st.kappa, st.lambda)};
        st.zeta = zetas.front();
        for (st.t = 1; st.t <= opt.max_inner; ++st.t)
        {
            const InnerProblem pr = build_inner_problem(st, hbar, targets, P);
            const InnerSolution sol = solve_inner(pr, st.kappa, st.q, opt.inner);
            if (!sol.success)
            {
                ++out.trace.inner_failures;
                break;
            }
            const double before = st.zeta;
            st.kappa = sol.kappa;
            st.q = sol.q;
            st.multipliers = sol.multipliers;
            st.zeta = sol.zeta;
            zetas.push_back(st.zeta);
            out.trace.entries.push_back({st.tau, st.t, st.zeta, st.upsilon, st.q.sum(),
                                         count_claimed(st.kappa, opt.rounding_threshold)});
            if (relative_change(st.zeta, before) <= st.delta)
                break;
        }
        out.trace.zeta_rounds.push_back(std::move(zetas));

        st.W = mmse_beamformers(hbar, st.q);
        for (Eigen::Index k = 0; k < K; ++k)
            if (st.W.col(k).squaredNorm() == 0.0 && hbar.col(k).squaredNorm() > 0.0)
                st.W.col(k) = mrt_beamformer(hbar, static_cast<int>(k));
        const double before = st.upsilon;
        st.upsilon = sca_objective(st.kappa, st.lambda);
        out.trace.upsilon.push_back(st.upsilon);
        if (relative_change(st.upsilon, before) <= st.delta)
            break;
    }
    out.trace.kappa_before_rounding = st.kappa;

    UserSet claimed;
    for (Eigen::Index k = 0; k < K; ++k)
        if (st.kappa(k) >= opt.rounding_threshold)
            claimed.push_back(static_cast<int>(k));
    static_cast<Schedule &>(out) = filter_claimed(hbar, st.q, claimed, targets);
    return out;
}

} // namespace usbf
