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

#ifndef USBF_NUMERICS_HPP
#define USBF_NUMERICS_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace usbf {

// Dense complex types. Matrices are row-major; channel and beamformer sets are
// passed as column-major N x K matrices (column k is one user's vector).
template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using CColumns = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

using ComplexMatrix = CMatrix<double>;
using ComplexVector = CVector<double>;
using ComplexColumns = CColumns<double>;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

// Raised when a direct factorization finds the input is not positive definite.
class FactorizationError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Raised when an iterative kernel hits a vanishing pivot or denominator.
class NumericalBreakdown : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double sherman_morrison_breakdown = 1e-14;

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived> &A, typename Derived::RealScalar tol = 1e-12)
{
    if (A.rows() != A.cols())
        return false;
    return ((A - A.adjoint()).cwiseAbs().maxCoeff() <= tol) || A.size() == 0;
}

// Inverse of a Hermitian positive definite matrix through a Cholesky factorization.
template <typename Derived>
CMatrix<typename Derived::RealScalar> hermitian_inverse(const Eigen::MatrixBase<Derived> &A)
{
    using Real = typename Derived::RealScalar;
    if (A.rows() != A.cols())
        throw std::invalid_argument("hermitian_inverse: matrix is " + std::to_string(A.rows()) + "x" +
                                    std::to_string(A.cols()) + ", expected square");
    const Eigen::Index n = A.rows();
    CColumns<Real> work = A;
    Eigen::LLT<CColumns<Real>, Eigen::Lower> llt(work);
    if (llt.info() != Eigen::Success)
        throw FactorizationError("hermitian_inverse: matrix is not positive definite");
    CColumns<Real> inv = llt.solve(CColumns<Real>::Identity(n, n));
    // Symmetrize away round-off so the result is exactly Hermitian.
    CMatrix<Real> out = (inv + inv.adjoint()) * Real(0.5);
    return out;
}

// T_K = (I_N + sum_k q_k h_k h_k^H)^{-1} by K successive rank-1 Sherman-Morrison
// updates starting from T_0 = I_N. Channels are the columns of `channels`.
// Users with q_k = 0 are skipped, which is exact.
template <typename Derived, typename QDerived>
CMatrix<typename Derived::RealScalar> sherman_morrison_chain(const Eigen::MatrixBase<Derived> &channels,
                                                             const Eigen::MatrixBase<QDerived> &q,
                                                             Eigen::Index N)
{
    using Real = typename Derived::RealScalar;
    if (channels.rows() != N)
        throw std::invalid_argument("sherman_morrison_chain: channel dimension " + std::to_string(channels.rows()) +
                                    " does not match N = " + std::to_string(N));
    if (channels.cols() != q.size())
        throw std::invalid_argument("sherman_morrison_chain: " + std::to_string(channels.cols()) + " channels but " +
                                    std::to_string(q.size()) + " powers");

    CColumns<Real> T = CColumns<Real>::Identity(N, N);
    CVector<Real> u(N);
    for (Eigen::Index k = 0; k < channels.cols(); ++k)
    {
        const Real qk = q(k);
        if (qk == Real(0))
            continue;
        u.noalias() = T * channels.col(k);
        const std::complex<Real> denom = Real(1) + qk * channels.col(k).dot(u);
        if (std::abs(denom) < Real(sherman_morrison_breakdown))
            throw NumericalBreakdown("sherman_morrison_chain: denominator vanished at user " + std::to_string(k));
        // Column-wise rank-1 downdate; much faster than a generic outer product here.
        const Real c = qk / denom.real();
        for (Eigen::Index j = 0; j < N; ++j)
            T.col(j) -= u * (c * std::conj(u(j)));
    }
    CMatrix<Real> out = (T + T.adjoint()) * Real(0.5);
    return out;
}

// Lambda = I_N + sum_k q_k h_k h_k^H, formed with one Hermitian rank-K product.
template <typename Derived, typename QDerived>
CMatrix<typename Derived::RealScalar> regularized_gram(const Eigen::MatrixBase<Derived> &channels,
                                                       const Eigen::MatrixBase<QDerived> &q)
{
    using Real = typename Derived::RealScalar;
    const Eigen::Index N = channels.rows();
    CColumns<Real> scaled = channels * q.cwiseMax(Real(0)).cwiseSqrt().asDiagonal();
    CColumns<Real> L = CColumns<Real>::Identity(N, N);
    L.template selfadjointView<Eigen::Lower>().rankUpdate(scaled, Real(1));
    CMatrix<Real> out = L.template selfadjointView<Eigen::Lower>();
    return out;
}

// Gaussian tail probability Q(x) = P[Z > x].
inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double q_function_inverse(double eps);

} // namespace usbf

#endif
