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
 * Density matrices, random state sampling and state-comparison metrics.
 *
 * Fidelity follows the squared (Jozsa) convention
 * F(rho, sigma) = (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, so F = |<a|b>|^2 for
 * pure states. Entropies use the natural logarithm.
 */

#pragma once

#include "tomoforge/cxmat.hpp"
#include "tomoforge/error.hpp"
#include "tomoforge/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace tomoforge {

/// Validation tolerance for Hermiticity, unit trace and the eigenvalue floor.
inline constexpr double kStateTolerance = 1e-9;

class DensityMatrix {
  public:
    DensityMatrix() = default;

    /// Validates Hermiticity, unit trace and PSD-ness (all within 1e-9).
    explicit DensityMatrix(CMatrix mat) : mat_(std::move(mat)) { validate(); }

    /// Wraps a matrix the caller already knows to be a valid state.
    static DensityMatrix unchecked(CMatrix mat) {
        DensityMatrix out;
        out.mat_ = std::move(mat);
        return out;
    }

    /// Symmetrize, clip negative eigenvalues to zero and renormalize.
    static DensityMatrix project(const CMatrix &mat) {
        const CMatrix h = hermitian_part(mat);
        Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
        if (solver.info() != Eigen::Success) {
            throw Error(Errc::NoConvergence, "eigensolver failed in project");
        }
        RVector w = solver.eigenvalues().cwiseMax(0.0);
        const double total = w.sum();
        if (!(total > 0.0)) {
            throw Error(Errc::InvalidDensityMatrix,
                        "cannot project a matrix without positive spectrum");
        }
        w /= total;
        return unchecked(
            hermitian_part(spectral_compose(solver.eigenvectors(), w)));
    }

    [[nodiscard]] const CMatrix &mat() const noexcept { return mat_; }
    [[nodiscard]] Eigen::Index dim() const noexcept { return mat_.rows(); }

    [[nodiscard]] RVector eigenvalues() const {
        return herm_eig(mat_, kStateTolerance).eigenvalues;
    }

    [[nodiscard]] double purity() const { return trace_product(mat_, mat_); }

  private:
    void validate() const {
        if (mat_.rows() == 0 || mat_.rows() != mat_.cols()) {
            throw Error(Errc::InvalidDensityMatrix, "must be square, nonempty");
        }
        if (!is_hermitian(mat_, kStateTolerance)) {
            throw Error(Errc::InvalidDensityMatrix, "not Hermitian");
        }
        const double tr = mat_.trace().real();
        if (std::abs(tr - 1.0) > kStateTolerance) {
            std::ostringstream msg;
            msg << "trace " << tr << " differs from 1";
            throw Error(Errc::InvalidDensityMatrix, msg.str());
        }
        const double wmin = herm_eig(mat_, kStateTolerance).eigenvalues(0);
        if (wmin < -kStateTolerance) {
            std::ostringstream msg;
            msg << "negative eigenvalue " << wmin;
            throw Error(Errc::InvalidDensityMatrix, msg.str());
        }
    }

    CMatrix mat_;
};

namespace detail {

inline CMatrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng &rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    CMatrix g(rows, cols);
    // Row-major fill order keeps the draw sequence independent of storage.
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            const double re = normal(rng);
            const double im = normal(rng);
            g(i, j) = Complex(re, im);
        }
    }
    return g;
}

} // namespace detail

/// Ginibre construction rho = G G^dagger / tr(G G^dagger), G of shape d x r.
inline DensityMatrix random_rank_r(Eigen::Index dim, Eigen::Index rank, Rng &rng) {
    if (dim < 1 || rank < 1 || rank > dim) {
        std::ostringstream msg;
        msg << "rank " << rank << " outside [1, " << dim << "]";
        throw Error(Errc::InvalidRank, msg.str());
    }
    const CMatrix g = detail::ginibre(dim, rank, rng);
    CMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return DensityMatrix::unchecked(hermitian_part(rho));
}

/// |psi><psi| with psi a normalized complex Gaussian vector (Haar-uniform).
inline DensityMatrix haar_pure(int n_qubits, Rng &rng) {
    if (n_qubits < 1 || n_qubits > 6) {
        throw Error(Errc::InvalidArgument, "haar_pure supports 1..6 qubits");
    }
    return random_rank_r(Eigen::Index{1} << n_qubits, 1, rng);
}

inline DensityMatrix maximally_mixed(Eigen::Index dim) {
    return DensityMatrix::unchecked(identity(dim) / static_cast<double>(dim));
}

inline DensityMatrix pure_state(const CVector &psi) {
    const CVector v = psi / psi.norm();
    return DensityMatrix::unchecked(v * v.adjoint());
}

namespace detail {

inline void require_same_dim(const DensityMatrix &a, const DensityMatrix &b) {
    if (a.dim() != b.dim()) {
        throw Error(Errc::DimMismatch, "states have different dimensions");
    }
}

/// Eigenvalues below d * eps * max|w| are rounding noise; their square roots
/// (~1e-8) would otherwise bias fidelities of low-rank states.
inline double numerical_rank_floor(const RVector &w) {
    return static_cast<double>(w.size()) * std::numeric_limits<double>::epsilon() *
           w.cwiseAbs().maxCoeff();
}

} // namespace detail

inline double fidelity(const DensityMatrix &rho, const DensityMatrix &sigma) {
    detail::require_same_dim(rho, sigma);
    // Validated states may carry eigenvalues down to -1e-9; clip locally.
    const HermEig e = herm_eig(rho.mat(), kStateTolerance);
    const double floor_rho = detail::numerical_rank_floor(e.eigenvalues);
    const CMatrix root = func_hermitian(
        e, [&](double w) { return w > floor_rho ? std::sqrt(w) : 0.0; });
    const CMatrix inner = hermitian_part(root * sigma.mat() * root);
    const RVector w = herm_eig(inner, 1e-8).eigenvalues;
    const double floor_inner = detail::numerical_rank_floor(w);
    double s = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (w(i) > floor_inner) {
            s += std::sqrt(w(i));
        }
    }
    return std::clamp(s * s, 0.0, 1.0);
}

inline double trace_distance(const DensityMatrix &rho, const DensityMatrix &sigma) {
    detail::require_same_dim(rho, sigma);
    const RVector w = herm_eig(rho.mat() - sigma.mat(), 1e-8).eigenvalues;
    return std::clamp(0.5 * w.cwiseAbs().sum(), 0.0, 1.0);
}

/// -sum w ln w over the clipped spectrum, with 0 ln 0 = 0.
inline double vn_entropy(const DensityMatrix &rho) {
    const RVector w = rho.eigenvalues();
    double s = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (w(i) > 0.0) {
            s -= w(i) * std::log(w(i));
        }
    }
    return std::max(s, 0.0);
}

} // namespace tomoforge
