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

#ifndef USBF_SCA_HPP
#define USBF_SCA_HPP

#include "usbf/greedy.hpp"

#include <vector>

namespace usbf {

// -sum(kappa) + g(kappa) - h(kappa) = -sum(kappa) + lambda sum(kappa - kappa^2).
double sca_objective(const RealVector &kappa, double lambda);

// Euclidean projection onto {q >= 0, sum(q) <= P}.
RealVector capped_simplex_projection(const RealVector &q, double P);

// Convex surrogate built at an expansion point (kappa0, q0) for fixed beamformers.
//
// Objective:   -sum(kappa) + g(kappa) - psi(kappa), psi the tangent of h at kappa0.
// Constraints: gt_k kappa_k - q_k a_k + phi_k(kappa, q) - rho_k(kappa, q) <= 0, with
//              phi_k = 1/2 (gt_k kappa_k + I_k(q))^2 and rho_k the tangent of
//              1/2 gt_k^2 kappa_k^2 + 1/2 I_k(q)^2 at the expansion point.
// I_k(q) = sum_{l != k} q_l B(k, l) is the interference seen by receiver w_k.
struct InnerProblem
{
    RealVector targets; // gt_k
    RealVector own;     // a_k = |hbar_k^H w_k|^2
    RealMatrix cross;   // B(k, l) = |hbar_l^H w_k|^2, zero diagonal
    RealVector kappa0;
    RealVector q0;
    RealVector interference0; // I_k(q0)
    double lambda = 1e-2;
    double P = 1.0;

    Eigen::Index users() const { return targets.size(); }

    double g(const RealVector &kappa) const;
    double h(const RealVector &kappa) const;
    double psi(const RealVector &kappa) const;
    double objective(const RealVector &kappa) const; // -sum + g - psi
    RealVector objective_gradient(const RealVector &kappa) const;

    // Surrogate and exact constraint values (<= 0 means satisfied).
    RealVector constraints(const RealVector &kappa, const RealVector &q) const;
    RealVector exact_constraints(const RealVector &kappa, const RealVector &q) const;
    // phi_k - rho_k pieces exposed for the minorant checks.
    RealVector convex_part(const RealVector &kappa, const RealVector &q) const;    // phi_k
    RealVector concave_exact(const RealVector &kappa, const RealVector &q) const;  // 1/2 gt^2 k^2 + 1/2 I^2
    RealVector concave_tangent(const RealVector &kappa, const RealVector &q) const; // rho_k

    // sum_k y_k grad c_k, split into kappa and q parts.
    void constraint_gradient(const RealVector &kappa, const RealVector &q, const RealVector &y, RealVector &g_kappa,
                             RealVector &g_q) const;
};

// Iteration state of the SCA outer loop.
struct ScaState
{
    RealVector kappa;
    RealVector q;
    ComplexColumns W;
    int tau = 0;
    int t = 0;
    double zeta = 0.0;
    double upsilon = 0.0;
    double lambda = 1e-2;
    double delta = 1e-5;
    RealVector multipliers; // surrogate-constraint duals from the last inner solve
};

InnerProblem build_inner_problem(const ScaState &state, const ComplexColumns &hbar, const RealVector &gamma_tilde,
                                 double P);

struct InnerOptions
{
    double feasibility_tol = 1e-10;
    double optimality_tol = 1e-9;
    double gap_tol = 1e-11;
    int max_iterations = 100;
};

struct InnerSolution
{
    RealVector kappa;
    RealVector q;
    double zeta = 0.0;
    double max_violation = 0.0;
    bool success = false;
    int iterations = 0;
    RealVector multipliers; // dual values of the K surrogate constraints
};

// Primal-dual interior point (Mehrotra predictor-corrector) on the convex
// surrogate. The start point is projected onto the feasible box/simplex set
// and need not be strictly interior.
InnerSolution solve_inner(const InnerProblem &problem, const RealVector &kappa_start, const RealVector &q_start,
                          const InnerOptions &opt = {});

struct ScaTraceEntry
{
    int outer = 0;
    int inner = 0;
    double zeta = 0.0;
    double upsilon = 0.0;
    double sum_q = 0.0;
    int cardinality = 0;
};

struct ScaTrace
{
    std::vector<ScaTraceEntry> entries;
    std::vector<double> upsilon;
    // One sequence per outer round: the exact objective at the round's start,
    // followed by every accepted inner zeta.
    std::vector<std::vector<double>> zeta_rounds;
    RealVector kappa_before_rounding;
    int inner_failures = 0;
};

struct ScaOptions
{
    int max_outer = 50;
    int max_inner = 200;
    double rounding_threshold = 0.5;
    InnerOptions inner;
};

struct ScaResult : Schedule
{
    ScaTrace trace;
    UserSet initial_set;
};

// Initial schedule: MRT-feasible users admitted greedily under equal power split.
UserSet sca_initial_set(const ComplexColumns &hbar, const RealVector &gamma_tilde, double P);

ScaResult sca_usbf(const ChannelSample &sample, const SystemConfig &cfg, const ScaOptions &opt = {});

} // namespace usbf

#endif
