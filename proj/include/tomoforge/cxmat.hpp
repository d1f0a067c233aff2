// Copyright 2026 The Tomoforge Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Dense complex matrix kernel: Hermitian eigendecomposition and the spectral
 * matrix functions (exp, sqrt, log) built on it.
 *
 * Matrices are small (d <= 64), so everything is dense and row-major. The
 * eigensolver is Eigen's self-adjoint solver (Householder tridiagonalization
 * followed by implicit symmetric QR with Wilkinson shifts).
 */

#pragma once

#include "tomoforge/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <utility>
#include <sstream>

namespace tomoforge {

using Complex = std::complex<double>;
using CMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Eigenvalues in [-kClipTolerance, 0) are treated as 0 by sqrt/log.
inline constexpr double kClipTolerance = 1e-10;

/// Largest entrywise |A - A^dagger|.
inline double hermitian_defect(const CMatrix &a) {
    if (a.rows() != a.cols()) {
        return std::numeric_limits<double>::infinity();
    }
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const CMatrix &a, double tol) {
    if (a.rows() != a.cols()) {
        return false;
    }
    return a.size() == 0 || hermitian_defect(a) <= tol;
}

inline CMatrix hermitian_part(const CMatrix &a) {
    return (a + a.adjoint()) * 0.5;
}

struct HermEig {
    RVector eigenvalues; ///< ascending
    CMatrix eigenvectors; ///< unitary, eigenvectors in columns
};

inline HermEig herm_eig(const CMatrix &a, double tol = 1e-9) {
    if (a.rows() != a.cols()) {
        throw Error(Errc::ShapeMismatch, "herm_eig requires a square matrix");
    }
    if (!is_hermitian(a, tol)) {
        std::ostringstream msg;
        msg << "herm_eig input deviates from Hermitian by "
            << hermitian_defect(a);
        throw Error(Errc::NonHermitian, msg.str());
    }
    if (a.size() == 0) {
        return {};
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(a));
    if (solver.info() != Eigen::Success) {
        throw Error(Errc::NoConvergence,
                    "Hermitian eigensolver hit its iteration cap");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

/// V diag(values) V^dagger.
inline CMatrix spectral_compose(const CMatrix &vectors, const RVector &values) {
    return vectors * values.cast<Complex>().asDiagonal() * vectors.adjoint();
}

/// f applied through the spectrum of an existing decomposition.
template <class F>
CMatrix func_hermitian(const HermEig &eig, F &&f) {
    RVector mapped = eig.eigenvalues.unaryExpr(
        [&](double w) { return static_cast<double>(f(w)); });
    return hermitian_part(spectral_compose(eig.eigenvectors, mapped));
}

/// V diag(f(w)) V^dagger for Hermitian A = V diag(w) V^dagger.
template <class F>
CMatrix func_hermitian(const CMatrix &a, F &&f) {
    return func_hermitian(herm_eig(a), std::forward<F>(f));
}

namespace detail {

inline double clip_nonnegative(double w, const char *what) {
    if (w >= 0.0) {
        return w;
    }
    if (w >= -kClipTolerance) {
        return 0.0;
    }
    std::ostringstream msg;
    msg << what << " of a matrix with eigenvalue " << w;
    throw Error(Errc::DomainError, msg.str());
}

} // namespace detail

inline CMatrix expm_hermitian(const CMatrix &a) {
    return func_hermitian(a, [](double w) { return std::exp(w); });
}

inline CMatrix sqrtm_psd(const CMatrix &a) {
    return func_hermitian(a, [](double w) {
        return std::sqrt(detail::clip_nonnegative(w, "sqrt"));
    });
}

/// Principal log; every (clipped) eigenvalue must be strictly positive.
inline CMatrix logm_pd(const CMatrix &a) {
    return func_hermitian(a, [](double w) {
        const double c = detail::clip_nonnegative(w, "log");
        if (c == 0.0) {
            throw Error(Errc::DomainError, "log of a singular matrix");
        }
        return std::log(c);
    });
}

/// Kronecker product, A's index major.
inline CMatrix kron(const CMatrix &a, const CMatrix &b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
                a(i, j) * b;
        }
    }
    return out;
}

/// tr(A^dagger B).
inline Complex frob_inner(const CMatrix &a, const CMatrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw Error(Errc::ShapeMismatch, "frob_inner operands differ in shape");
    }
    return (a.conjugate().cwiseProduct(b)).sum();
}

/// tr(A B) for Hermitian A, B; real by construction.
inline double trace_product(const CMatrix &a, const CMatrix &b) {
    return frob_inner(a, b).real();
}

inline CMatrix identity(Eigen::Index d) { return CMatrix::Identity(d, d); }

inline CMatrix diagonal(std::initializer_list<double> values) {
    RVector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) {
        v(i++) = x;
    }
    return v.cast<Complex>().asDiagonal();
}

} // namespace tomoforge
