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
 * POVMs: the single-qubit tetrahedral SIC, its n-fold tensor power (an
 * informationally complete POVM with 4^n effects) and measured/unmeasured
 * subset plans.
 */

#pragma once

#include "tomoforge/cxmat.hpp"
#include "tomoforge/error.hpp"
#include "tomoforge/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <utility>
#include <vector>

namespace tomoforge {

class Povm {
  public:
    Povm() = default;

    /// Checks that every effect is Hermitian PSD and that they sum to I.
    explicit Povm(std::vector<CMatrix> effects) : effects_(std::move(effects)) {
        validate();
    }

    [[nodiscard]] const std::vector<CMatrix> &effects() const noexcept {
        return effects_;
    }
    [[nodiscard]] const CMatrix &operator[](std::size_t i) const {
        return effects_.at(i);
    }
    [[nodiscard]] std::size_t size() const noexcept { return effects_.size(); }
    [[nodiscard]] Eigen::Index dim() const noexcept {
        return effects_.empty() ? 0 : effects_.front().rows();
    }

    [[nodiscard]] std::vector<CMatrix>
    select(const std::vector<std::size_t> &indices) const {
        std::vector<CMatrix> out;
        out.reserve(indices.size());
        for (std::size_t i : indices) {
            out.push_back(effects_.at(i));
        }
        return out;
    }

  private:
    void validate() const {
        if (effects_.empty()) {
            throw Error(Errc::InvalidPovm, "no effects");
        }
        const Eigen::Index d = effects_.front().rows();
        CMatrix total = CMatrix::Zero(d, d);
        for (const CMatrix &e : effects_) {
            if (e.rows() != d || e.cols() != d) {
                throw Error(Errc::InvalidPovm, "effects differ in shape");
            }
            if (!is_hermitian(e, 1e-10)) {
                throw Error(Errc::InvalidPovm, "effect is not Hermitian");
            }
            if (herm_eig(e, 1e-10).eigenvalues(0) < -1e-10) {
                throw Error(Errc::InvalidPovm, "effect is not PSD");
            }
            total += e;
        }
        const double defect = (total - identity(d)).cwiseAbs().maxCoeff();
        if (defect > 1e-9) {
            std::ostringstream msg;
            msg << "effects sum to identity only within " << defect;
            throw Error(Errc::InvalidPovm, msg.str());
        }
    }

    std::vector<CMatrix> effects_;
};

/// Tetrahedral qubit SIC: E_k = |psi_k><psi_k| / 2.
inline Povm qubit_sic() {
    std::vector<CMatrix> effects;
    effects.reserve(4);
    CVector psi(2);
    psi << 1.0, 0.0;
    effects.emplace_back(psi * psi.adjoint() * 0.5);
    for (int k = 1; k <= 3; ++k) {
        const double phase = 2.0 * std::numbers::pi * k / 3.0;
        psi << 1.0 / std::sqrt(3.0),
            std::sqrt(2.0 / 3.0) * std::polar(1.0, phase);
        effects.emplace_back(psi * psi.adjoint() * 0.5);
    }
    return Povm(std::move(effects));
}

/// n-fold tensor power; the first qubit's base index is most significant.
inline Povm tensor_povm(const Povm &base, int n) {
    if (n < 1) {
        throw Error(Errc::InvalidArgument, "tensor_povm needs n >= 1");
    }
    std::vector<CMatrix> current = base.effects();
    for (int q = 1; q < n; ++q) {
        std::vector<CMatrix> next;
        next.reserve(current.size() * base.size());
        for (const CMatrix &a : current) {
            for (const CMatrix &b : base.effects()) {
                next.push_back(kron(a, b));
            }
        }
        current = std::move(next);
    }
    return Povm(std::move(current));
}

inline Povm sic_product_povm(int n_qubits) {
    return tensor_povm(qubit_sic(), n_qubits);
}

/// Rank-1 projectors onto the computational basis.
inline Povm computational_basis(Eigen::Index dim) {
    std::vector<CMatrix> effects;
    effects.reserve(static_cast<std::size_t>(dim));
    for (Eigen::Index i = 0; i < dim; ++i) {
        CMatrix e = CMatrix::Zero(dim, dim);
        e(i, i) = 1.0;
        effects.push_back(std::move(e));
    }
    return Povm(std::move(effects));
}

/// Gram matrix G_ij = tr(E_i E_j).
inline RMatrix gram_matrix(const Povm &povm) {
    const auto n = static_cast<Eigen::Index>(povm.size());
    RMatrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            g(i, j) = g(j, i) = trace_product(povm[static_cast<std::size_t>(i)],
                                              povm[static_cast<std::size_t>(j)]);
        }
    }
    return g;
}

/// Zero-based indices of measured and unmeasured effects.
struct SubsetPlan {
    std::vector<std::size_t> measured;
    std::vector<std::size_t> unmeasured;

    [[nodiscard]] std::size_t total() const noexcept {
        return measured.size() + unmeasured.size();
    }

    friend bool operator==(const SubsetPlan &, const SubsetPlan &) = default;
};

/// Measured effects are the first K entries of a seeded uniform permutation.
inline SubsetPlan select_subset(std::size_t n_effects, std::size_t k, Rng &rng) {
    if (k < 1 || k > n_effects) {
        std::ostringstream msg;
        msg << "K = " << k << " outside [1, " << n_effects << "]";
        throw Error(Errc::InvalidK, msg.str());
    }
    std::vector<std::size_t> perm(n_effects);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    // Explicit Fisher-Yates so the permutation depends only on the stream.
    for (std::size_t i = n_effects; i > 1; --i) {
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        std::swap(perm[i - 1], perm[pick(rng)]);
    }
    SubsetPlan plan;
    plan.measured.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(k));
    plan.unmeasured.assign(perm.begin() + static_cast<std::ptrdiff_t>(k), perm.end());
    return plan;
}

/// The first K effects in index order are measured.
inline SubsetPlan prefix_subset(std::size_t n_effects, std::size_t k) {
    if (k < 1 || k > n_effects) {
        throw Error(Errc::InvalidK, "K outside [1, N]");
    }
    SubsetPlan plan;
    for (std::size_t i = 0; i < n_effects; ++i) {
        (i < k ? plan.measured : plan.unmeasured).push_back(i);
    }
    return plan;
}

/// Debug/audit dump: {"dim": d, "effects": [[[re, im], ...], ...]} row-major.
inline nlohmann::json povm_to_json(const Povm &povm) {
    nlohmann::json effects = nlohmann::json::array();
    for (const CMatrix &e : povm.effects()) {
        nlohmann::json flat = nlohmann::json::array();
        for (Eigen::Index i = 0; i < e.rows(); ++i) {
            for (Eigen::Index j = 0; j < e.cols(); ++j) {
                flat.push_back({e(i, j).real(), e(i, j).imag()});
            }
        }
        effects.push_back(std::move(flat));
    }
    return {{"dim", povm.dim()}, {"effects", std::move(effects)}};
}

inline Povm povm_from_json(const nlohmann::json &j) {
    const auto d = j.at("dim").get<Eigen::Index>();
    std::vector<CMatrix> effects;
    for (const auto &flat : j.at("effects")) {
        if (static_cast<Eigen::Index>(flat.size()) != d * d) {
            throw Error(Errc::ShapeMismatch, "effect entry count != dim^2");
        }
        CMatrix e(d, d);
        for (Eigen::Index idx = 0; idx < d * d; ++idx) {
            const auto &z = flat[static_cast<std::size_t>(idx)];
            e(idx / d, idx % d) = Complex(z.at(0).get<double>(), z.at(1).get<double>());
        }
        effects.push_back(std::move(e));
    }
    return Povm(std::move(effects));
}

} // namespace tomoforge
