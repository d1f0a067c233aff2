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
 * Dense primal-dual interior-point solver for small linear SDPs with one
 * Hermitian PSD block X and a vector s >= 0 of scalar variables:
 *
 *     minimize    tr(C X) + c.s
 *     subject to  tr(A_j X) + a_j.s  = b_j     (equalities)
 *                 tr(G_k X) + g_k.s <= h_k     (inequalities)
 *                 X >= 0, s >= 0
 *
 * Inequalities receive a nonnegative slack each, giving the standard form
 * min <C,X> + c.x s.t. A(X) + a x = b. The dual is
 * max b.y s.t. C - A*(y) = Z >= 0, c - a^T y = z >= 0.
 *
 * Iterations use Nesterov-Todd scaling on the PSD block (computed through
 * the SVD of R^dagger L with X = L L^dagger, Z = R R^dagger), the usual
 * x/z scaling on the nonnegative orthant, and a Schur complement system
 * M dy = r factored by Cholesky. A Mehrotra predictor-corrector step is on
 * by default.
 *
 * The complex block is handled directly: Hermitian PSD matrices form a
 * self-scaled cone, so no real embedding is needed inside the solver.
 * `real_embed` is provided for cross-checking against real-only solvers.
 */

#pragma once

#include "tomoforge/cxmat.hpp"
#include "tomoforge/error.hpp"
#include "tomoforge/states.hpp"

#include <Eigen/SparseCore>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tomoforge {

/// [[Re H, -Im H], [Im H, Re H]]; H >= 0 iff the embedding is.
inline RMatrix real_embed(const CMatrix &h) {
    if (!is_hermitian(h, 1e-10)) {
        throw Error(Errc::NonHermitian, "real_embed input is not Hermitian");
    }
    const Eigen::Index d = h.rows();
    RMatrix out(2 * d, 2 * d);
    out.topLeftCorner(d, d) = h.real();
    out.topRightCorner(d, d) = -h.imag();
    out.bottomLeftCorner(d, d) = h.imag();
    out.bottomRightCorner(d, d) = h.real();
    return out;
}

/// Inverse of real_embed: reads the complex block back from the left column.
inline CMatrix real_unembed(const RMatrix &e) {
    if (e.rows() != e.cols() || e.rows() % 2 != 0) {
        throw Error(Errc::ShapeMismatch, "embedding must be 2d x 2d");
    }
    const Eigen::Index d = e.rows() / 2;
    CMatrix out(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            out(i, j) = Complex(e(i, j), e(i + d, j));
        }
    }
    return out;
}

/// One linear row: tr(matrix X) + sum coef * s[index] (op) rhs.
struct LinearConstraint {
    CMatrix matrix; ///< 0x0 means the row has no matrix term
    std::vector<std::pair<std::size_t, double>> scalars;
    double rhs = 0.0;
};

struct SdpProblem {
    Eigen::Index dim = 0;
    std::size_t n_scalars = 0;
    CMatrix cost_matrix; ///< 0x0 means zero
    RVector cost_scalars; ///< empty means zero
    std::vector<LinearConstraint> equalities;
    std::vector<LinearConstraint> inequalities;

    void validate() const {
        if (dim < 1) {
            throw Error(Errc::InvalidArgument, "SDP block dimension must be >= 1");
        }
        if (equalities.empty() && inequalities.empty()) {
            throw Error(Errc::InvalidArgument, "SDP needs at least one constraint");
        }
        auto check_matrix = [&](const CMatrix &m, const char *what) {
            if (m.size() == 0) {
                return;
            }
            if (m.rows() != dim || m.cols() != dim) {
                throw Error(Errc::ShapeMismatch, std::string(what) + " has wrong shape");
            }
            if (!is_hermitian(m, 1e-10)) {
                throw Error(Errc::NonHermitian, std::string(what) + " is not Hermitian");
            }
        };
        check_matrix(cost_matrix, "cost matrix");
        if (cost_scalars.size() != 0 &&
            static_cast<std::size_t>(cost_scalars.size()) != n_scalars) {
            throw Error(Errc::ShapeMismatch, "scalar cost length != n_scalars");
        }
        for (const auto *rows : {&equalities, &inequalities}) {
            for (const LinearConstraint &row : *rows) {
                check_matrix(row.matrix, "constraint matrix");
                for (const auto &[idx, coef] : row.scalars) {
                    (void)coef;
                    if (idx >= n_scalars) {
                        throw Error(Errc::InvalidArgument, "scalar index out of range");
                    }
                }
            }
        }
    }
};

enum class SdpStatus { Optimal, Infeasible, MaxIter, NumericalTrouble };

constexpr std::string_view sdp_status_name(SdpStatus s) noexcept {
    switch (s) {
    case SdpStatus::Optimal: return "Optimal";
    case SdpStatus::Infeasible: return "Infeasible";
    case SdpStatus::MaxIter: return "MaxIter";
    case SdpStatus::NumericalTrouble: return "NumericalTrouble";
    }
    return "Unknown";
}

struct SdpOptions {
    double tol = 1e-8;
    int max_iter = 200;
    bool mehrotra = true;
    double regularization = 1e-15; ///< diagonal shift of the Jacobi-scaled Schur matrix
    /// Shifts retried in order when a solve ends in NumericalTrouble/MaxIter.
    std::vector<double> fallback_regularization = {1e-12, 1e-10};
    bool record_trace = false;
};

struct SdpResiduals {
    double primal_feas = 0.0; ///< ||b - A(X) - a x|| / (1 + ||b||)
    double dual_feas = 0.0;   ///< ||(C, c) - A*(y) - (Z, z)|| / (1 + ||(C, c)||)
    double duality_gap = 0.0; ///< (<X,Z> + x.z) / (1 + |pobj|)
};

struct SdpIterate {
    int iteration = 0;
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    SdpResiduals residuals;
    double mu = 0.0;
    double primal_step = 0.0;
    double dual_step = 0.0;
};

struct SdpSolution {
    CMatrix X;
    RVector s;
    RVector y; ///< multipliers for equalities, then inequalities (<= 0)
    double objective = 0.0;
    double dual_objective = 0.0;
    SdpStatus status = SdpStatus::NumericalTrouble;
    SdpResiduals residuals;
    int iterations = 0;
    std::vector<SdpIterate> trace;
};

namespace detail {

/// Standard-form data with rows normalized to unit norm.
class StandardForm {
  public:
    explicit StandardForm(const SdpProblem &p)
        : d_(p.dim), n_orig_(p.n_scalars),
          n_(p.n_scalars + p.inequalities.size()),
          m_(p.equalities.size() + p.inequalities.size()) {
        const Eigen::Index dd = d_ * d_;
        a_mat_ = CMatrix::Zero(static_cast<Eigen::Index>(m_), dd);
        b_ = RVector::Zero(static_cast<Eigen::Index>(m_));
        row_scale_ = RVector::Ones(static_cast<Eigen::Index>(m_));
        std::vector<Eigen::Triplet<double>> triplets;

        std::size_t row = 0;
        auto add_row = [&](const LinearConstraint &c, std::optional<std::size_t> slack) {
            const auto r = static_cast<Eigen::Index>(row);
            double norm2 = 0.0;
            if (c.matrix.size() != 0) {
                const CMatrix h = hermitian_part(c.matrix);
                a_mat_.row(r) = Eigen::Map<const CVector>(h.data(), dd).transpose();
                norm2 += h.squaredNorm();
            }
            std::vector<std::pair<std::size_t, double>> entries = c.scalars;
            if (slack) {
                entries.emplace_back(*slack, 1.0);
            }
            for (const auto &[idx, coef] : entries) {
                norm2 += coef * coef;
            }
            const double scale = norm2 > 0.0 ? std::sqrt(norm2) : 1.0;
            row_scale_(r) = scale;
            a_mat_.row(r) /= scale;
            for (const auto &[idx, coef] : entries) {
                triplets.emplace_back(r, static_cast<Eigen::Index>(idx), coef / scale);
            }
            b_(r) = c.rhs / scale;
            ++row;
        };
        for (const LinearConstraint &c : p.equalities) {
            add_row(c, std::nullopt);
        }
        for (std::size_t k = 0; k < p.inequalities.size(); ++k) {
            add_row(p.inequalities[k], n_orig_ + k);
        }
        a_vec_.resize(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(n_));
        a_vec_.setFromTriplets(triplets.begin(), triplets.end());
        a_vec_.makeCompressed();

        cost_mat_ = p.cost_matrix.size() != 0 ? hermitian_part(p.cost_matrix)
                                              : CMatrix::Zero(d_, d_);
        cost_vec_ = RVector::Zero(static_cast<Eigen::Index>(n_));
        if (p.cost_scalars.size() != 0) {
            cost_vec_.head(static_cast<Eigen::Index>(n_orig_)) = p.cost_scalars;
        }
        b_norm_orig_ = p_rhs_norm(p);
        cost_norm_ = std::sqrt(cost_mat_.squaredNorm() + cost_vec_.squaredNorm());
    }

    [[nodiscard]] Eigen::Index d() const { return d_; }
    [[nodiscard]] std::size_t n() const { return n_; }
    [[nodiscard]] std::size_t m() const { return m_; }
    [[nodiscard]] std::size_t n_orig() const { return n_orig_; }
    [[nodiscard]] const CMatrix &a_mat() const { return a_mat_; }
    [[nodiscard]] const Eigen::SparseMatrix<double> &a_vec() const { return a_vec_; }
    [[nodiscard]] const RVector &b() const { return b_; }
    [[nodiscard]] const RVector &row_scale() const { return row_scale_; }
    [[nodiscard]] const CMatrix &cost_mat() const { return cost_mat_; }
    [[nodiscard]] const RVector &cost_vec() const { return cost_vec_; }
    [[nodiscard]] double b_norm_orig() const { return b_norm_orig_; }
    [[nodiscard]] double cost_norm() const { return cost_norm_; }

    /// tr(A_i X) for every row.
    [[nodiscard]] RVector apply(const CMatrix &x) const {
        const Eigen::Map<const CVector> v(x.data(), d_ * d_);
        return (a_mat_ * v.conjugate()).real();
    }

    /// sum_i y_i A_i.
    [[nodiscard]] CMatrix adjoint(const RVector &y) const {
        const CVector v = a_mat_.transpose() * y.cast<Complex>();
        CMatrix out = Eigen::Map<const CMatrix>(v.data(), d_, d_);
        return hermitian_part(out);
    }

  private:
    static double p_rhs_norm(const SdpProblem &p) {
        double s = 0.0;
        for (const auto *rows : {&p.equalities, &p.inequalities}) {
            for (const LinearConstraint &c : *rows) {
                s += c.rhs * c.rhs;
            }
        }
        return std::sqrt(s);
    }

    Eigen::Index d_;
    std::size_t n_orig_;
    std::size_t n_;
    std::size_t m_;
    CMatrix a_mat_; ///< m x d^2, row i = row-major vec(A_i)
    Eigen::SparseMatrix<double> a_vec_; ///< m x n
    RVector b_;
    RVector row_scale_;
    CMatrix cost_mat_;
    RVector cost_vec_;
    double b_norm_orig_ = 0.0;
    double cost_norm_ = 0.0;
};

/// Largest alpha <= cap with X + alpha dX >= 0, given X = L L^dagger.
inline double max_psd_step(const Eigen::LLT<CMatrix> &chol, const CMatrix &dx) {
    const auto l = chol.matrixL();
    CMatrix t = l.solve(dx);
    t = l.solve(t.adjoint().eval()).adjoint();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(t), Eigen::EigenvaluesOnly);
    const double wmin = es.eigenvalues()(0);
    return wmin >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / wmin;
}

inline double max_orthant_step(const RVector &x, const RVector &dx) {
    double alpha = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (dx(i) < 0.0) {
            alpha = std::min(alpha, -x(i) / dx(i));
        }
    }
    return alpha;
}

struct Direction {
    CMatrix dX, dZ;
    RVector dx, dz, dy;
};

} // namespace detail

namespace detail {

inline SdpSolution solve_once(const StandardForm &sf, const SdpOptions &opts) {
    const Eigen::Index d = sf.d();
    const auto n = static_cast<Eigen::Index>(sf.n());
    const auto m = static_cast<Eigen::Index>(sf.m());
    const double nu = static_cast<double>(d) + static_cast<double>(n);
    const CMatrix eye = identity(d);

    // Infeasible start in the spirit of SDPT3's default point; rows are unit
    // norm after scaling, so these scales are O(1 + |b|).
    double max_b = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        max_b = std::max(max_b, std::abs(sf.b()(i)));
    }
    const double xi = std::max(1.0, std::sqrt(static_cast<double>(d)) * (1.0 + max_b));
    const double eta = std::max(1.0, 1.0 + sf.cost_norm());
    CMatrix X = xi * eye;
    CMatrix Z = eta * eye;
    RVector x = RVector::Constant(n, xi);
    RVector z = RVector::Constant(n, eta);
    RVector y = RVector::Zero(m);

    SdpSolution sol;
    sol.status = SdpStatus::MaxIter;
    int stalled = 0;

    auto finish = [&](SdpStatus status, int iters, const SdpResiduals &res,
                      double pobj, double dobj) {
        sol.status = status;
        sol.iterations = iters;
        sol.residuals = res;
        sol.X = hermitian_part(X);
        sol.s = x.head(static_cast<Eigen::Index>(sf.n_orig()));
        sol.y = y.cwiseQuotient(sf.row_scale());
        sol.objective = pobj;
        sol.dual_objective = dobj;
        return sol;
    };

    for (int iter = 0;; ++iter) {
        // Residuals in scaled rows; reported in original rows.
        const RVector rp = sf.b() - sf.apply(X) - sf.a_vec() * x;
        const CMatrix Rd = hermitian_part(sf.cost_mat() - sf.adjoint(y) - Z);
        const RVector rd = sf.cost_vec() - sf.a_vec().transpose() * y - z;
        const double pobj = trace_product(sf.cost_mat(), X) + sf.cost_vec().dot(x);
        const double dobj = sf.b().dot(y);
        const double comp = trace_product(X, Z) + x.dot(z);
        const double mu = comp / nu;

        SdpResiduals res;
        res.primal_feas =
            rp.cwiseProduct(sf.row_scale()).norm() / (1.0 + sf.b_norm_orig());
        res.dual_feas = std::sqrt(Rd.squaredNorm() + rd.squaredNorm()) / (1.0 + sf.cost_norm());
        res.duality_gap = std::abs(comp) / (1.0 + std::abs(pobj));

        if (opts.record_trace) {
            SdpIterate it;
            it.iteration = iter;
            it.primal_objective = pobj;
            it.dual_objective = dobj;
            it.residuals = res;
            it.mu = mu;
            if (!sol.trace.empty()) {
                it.primal_step = sol.trace.back().primal_step;
                it.dual_step = sol.trace.back().dual_step;
            }
            sol.trace.push_back(it);
        }

        if (res.primal_feas <= opts.tol && res.dual_feas <= opts.tol &&
            res.duality_gap <= opts.tol) {
            return finish(SdpStatus::Optimal, iter, res, pobj, dobj);
        }
        if (!std::isfinite(pobj) || !std::isfinite(dobj) || !std::isfinite(mu)) {
            return finish(SdpStatus::NumericalTrouble, iter, res, pobj, dobj);
        }

        // Primal infeasibility: dual objective diverging while y/|y| is an
        // approximate Farkas ray -A*(y) >= 0, -a^T y >= 0, b.y > 0.
        const double ynorm = y.norm();
        if (res.primal_feas > opts.tol && dobj > 1e3 * (1.0 + std::abs(pobj)) && ynorm > 0.0) {
            const RVector yhat = y / ynorm;
            const double by = sf.b().dot(yhat);
            const CMatrix ray = -sf.adjoint(yhat);
            Eigen::SelfAdjointEigenSolver<CMatrix> es(ray, Eigen::EigenvaluesOnly);
            const RVector ray_s = -(sf.a_vec().transpose() * yhat);
            const double worst_s = n > 0 ? ray_s.minCoeff() : 0.0;
            if (by > 0.0 && es.eigenvalues()(0) >= -1e-6 * by && worst_s >= -1e-6 * by) {
                return finish(SdpStatus::Infeasible, iter, res, pobj, dobj);
            }
        }
        if (iter >= opts.max_iter) {
            return finish(SdpStatus::MaxIter, iter, res, pobj, dobj);
        }

        // Nesterov-Todd scaling point W = G G^dagger with G^-1 X G^-dagger =
        // G^dagger Z G = diag(lambda).
        Eigen::LLT<CMatrix> chol_x(X);
        Eigen::LLT<CMatrix> chol_z(Z);
        if (chol_x.info() != Eigen::Success || chol_z.info() != Eigen::Success) {
            return finish(SdpStatus::NumericalTrouble, iter, res, pobj, dobj);
        }
        const CMatrix L = chol_x.matrixL();
        const CMatrix R = chol_z.matrixL();
        Eigen::JacobiSVD<CMatrix> svd(R.adjoint() * L, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const RVector lam = svd.singularValues();
        if (lam.minCoeff() <= 0.0 || !lam.allFinite()) {
            return finish(SdpStatus::NumericalTrouble, iter, res, pobj, dobj);
        }
        const RVector lam_isqrt = lam.cwiseSqrt().cwiseInverse();
        const CMatrix G = L * svd.matrixV() * lam_isqrt.cast<Complex>().asDiagonal();
        const CMatrix Ginv = lam.cwiseSqrt().cast<Complex>().asDiagonal() *
                             svd.matrixV().adjoint() *
                             L.triangularView<Eigen::Lower>().solve(eye);
        const CMatrix W = hermitian_part(G * G.adjoint());

        // Schur complement M_ij = tr(A_i W A_j W) + sum_k a_ik (x_k/z_k) a_jk.
        CMatrix wawt(m, d * d);
        for (Eigen::Index i = 0; i < m; ++i) {
            const Eigen::Map<const CMatrix> ai(sf.a_mat().data() + i * d * d, d, d);
            const CMatrix p = W * ai * W;
            wawt.row(i) = Eigen::Map<const CVector>(p.data(), d * d).transpose();
        }
        RMatrix M = (sf.a_mat() * wawt.adjoint()).real();
        const RVector dscale = x.cwiseQuotient(z);
        const Eigen::SparseMatrix<double> ad = sf.a_vec() * dscale.asDiagonal();
        M += RMatrix(ad * sf.a_vec().transpose());
        M = 0.5 * (M + M.transpose()).eval();
        // Jacobi-scale before factoring: diagonal entries span many orders of
        // magnitude near the boundary, and the static regularization must be
        // relative to each row, not to the largest one.
        const RVector jac_scale =
            M.diagonal().cwiseMax(std::numeric_limits<double>::min()).cwiseSqrt().cwiseInverse();
        M = jac_scale.asDiagonal() * M * jac_scale.asDiagonal();
        // Escalate the shift only if the factorization breaks down.
        Eigen::LLT<RMatrix> chol_m;
        for (double reg = opts.regularization; reg <= 1e-8; reg = reg > 0.0 ? reg * 100.0 : 1e-15) {
            RMatrix shifted = M;
            shifted.diagonal().array() += reg;
            chol_m.compute(shifted);
            if (chol_m.info() == Eigen::Success) {
                break;
            }
        }
        if (chol_m.info() != Eigen::Success) {
            return finish(SdpStatus::NumericalTrouble, iter, res, pobj, dobj);
        }
        auto schur_solve = [&](const RVector &rhs) -> RVector {
            return jac_scale.cwiseProduct(chol_m.solve(jac_scale.cwiseProduct(rhs)));
        };

        const CMatrix WRdW = W * Rd * W;
        auto direction = [&](const CMatrix &Rc, const RVector &rc) {
            detail::Direction dir;
            const RVector t = (rc - x.cwiseProduct(rd)).cwiseQuotient(z);
            const RVector rhs = rp - sf.apply(hermitian_part(Rc - WRdW)) - sf.a_vec() * t;
            auto expand = [&] {
                dir.dZ = hermitian_part(Rd - sf.adjoint(dir.dy));
                dir.dz = rd - sf.a_vec().transpose() * dir.dy;
                dir.dX = hermitian_part(Rc - W * dir.dZ * W);
                dir.dx = (rc - x.cwiseProduct(dir.dz)).cwiseQuotient(z);
            };
            dir.dy = schur_solve(rhs);
            expand();
            // Iterative refinement against the primal equation, whose
            // residual is affine in dy with linear part M.
            for (int pass = 0; pass < 10; ++pass) {
                const RVector e = rp - sf.apply(dir.dX) - sf.a_vec() * dir.dx;
                if (e.norm() <= 1e-15 * (1.0 + rp.norm())) {
                    break;
                }
                dir.dy += schur_solve(e);
                expand();
            }
            return dir;
        };
        auto steps = [&](const detail::Direction &dir) {
            const double ap = std::min(detail::max_psd_step(chol_x, dir.dX),
                                       detail::max_orthant_step(x, dir.dx));
            const double ad_ = std::min(detail::max_psd_step(chol_z, dir.dZ),
                                        detail::max_orthant_step(z, dir.dz));
            return std::pair{ap, ad_};
        };

        detail::Direction dir;
        double sigma = 0.1;
        double gamma = 0.95;
        if (opts.mehrotra) {
            const detail::Direction pred = direction(-X, -x.cwiseProduct(z));
            const auto [ap_max, ad_max] = steps(pred);
            const double ap = std::min(1.0, ap_max);
            const double ad_ = std::min(1.0, ad_max);
            const double mu_aff =
                (trace_product(X + ap * pred.dX, Z + ad_ * pred.dZ) +
                 (x + ap * pred.dx).dot(z + ad_ * pred.dz)) / nu;
            sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);
            gamma = 0.9 + 0.09 * std::min(ap, ad_);

            // Second-order correction in the NT-scaled space, where
            // Lambda S + S Lambda = T solves to S_ab = T_ab / (l_a + l_b).
            const CMatrix dXs = Ginv * pred.dX * Ginv.adjoint();
            const CMatrix dZs = G.adjoint() * pred.dZ * G;
            CMatrix T = -(dXs * dZs + dZs * dXs);
            for (Eigen::Index a = 0; a < d; ++a) {
                T(a, a) += 2.0 * sigma * mu - 2.0 * lam(a) * lam(a);
            }
            CMatrix S(d, d);
            for (Eigen::Index a = 0; a < d; ++a) {
                for (Eigen::Index b = 0; b < d; ++b) {
                    S(a, b) = T(a, b) / (lam(a) + lam(b));
                }
            }
            const CMatrix Rc = hermitian_part(G * S * G.adjoint());
            const RVector rc = RVector::Constant(n, sigma * mu) - x.cwiseProduct(z) -
                               pred.dx.cwiseProduct(pred.dz);
            dir = direction(Rc, rc);
        } else {
            const CMatrix Zinv = chol_z.solve(eye);
            dir = direction(hermitian_part(sigma * mu * Zinv - X),
                            RVector::Constant(n, sigma * mu) - x.cwiseProduct(z));
        }

        const auto [ap_max, ad_max] = steps(dir);
        const double ap = std::min(1.0, gamma * ap_max);
        const double ad_ = std::min(1.0, gamma * ad_max);
        if (!std::isfinite(ap) || !std::isfinite(ad_) ||
            !dir.dy.allFinite() || !dir.dX.allFinite()) {
            return finish(SdpStatus::NumericalTrouble, iter, res, pobj, dobj);
        }
        if (std::max(ap, ad_) < 1e-10) {
            if (++stalled >= 5) {
                return finish(SdpStatus::NumericalTrouble, iter, res, pobj, dobj);
            }
        } else {
            stalled = 0;
        }
        if (opts.record_trace) {
            sol.trace.back().primal_step = ap;
            sol.trace.back().dual_step = ad_;
        }

        X = hermitian_part(X + ap * dir.dX);
        x += ap * dir.dx;
        y += ad_ * dir.dy;
        Z = hermitian_part(Z + ad_ * dir.dZ);
        z += ad_ * dir.dz;
    }
}

} // namespace detail

namespace detail {

/// The problem with scalars and rows in a content-defined order, so that
/// programs differing only in how they list variables and constraints
/// follow the same iterates.
struct CanonicalProblem {
    SdpProblem problem;
    std::vector<std::size_t> scalar_of;  ///< canonical scalar -> original
    std::vector<std::size_t> eq_of;      ///< canonical equality -> original
    std::vector<std::size_t> ineq_of;    ///< canonical inequality -> original
};

inline bool matrix_less(const CMatrix &a, const CMatrix &b) {
    if (a.size() != b.size()) {
        return a.size() < b.size();
    }
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const Complex u = a.data()[i];
        const Complex v = b.data()[i];
        if (u.real() != v.real()) return u.real() < v.real();
        if (u.imag() != v.imag()) return u.imag() < v.imag();
    }
    return false;
}

inline CanonicalProblem canonicalize(const SdpProblem &p) {
    CanonicalProblem out;
    const std::size_t n = p.n_scalars;

    // Scalar signature: cost, then the sorted coefficients it carries
    // (equalities before inequalities). Ties keep their original order.
    std::vector<std::vector<double>> sig(n);
    for (std::size_t j = 0; j < n; ++j) {
        sig[j].push_back(p.cost_scalars.size() != 0 ? p.cost_scalars(static_cast<Eigen::Index>(j))
                                                    : 0.0);
    }
    std::vector<std::vector<double>> eq_coef(n), ineq_coef(n);
    for (const LinearConstraint &c : p.equalities) {
        for (const auto &[idx, coef] : c.scalars) eq_coef[idx].push_back(coef);
    }
    for (const LinearConstraint &c : p.inequalities) {
        for (const auto &[idx, coef] : c.scalars) ineq_coef[idx].push_back(coef);
    }
    for (std::size_t j = 0; j < n; ++j) {
        std::sort(eq_coef[j].begin(), eq_coef[j].end());
        std::sort(ineq_coef[j].begin(), ineq_coef[j].end());
        sig[j].push_back(static_cast<double>(eq_coef[j].size()));
        sig[j].insert(sig[j].end(), eq_coef[j].begin(), eq_coef[j].end());
        sig[j].push_back(static_cast<double>(ineq_coef[j].size()));
        sig[j].insert(sig[j].end(), ineq_coef[j].begin(), ineq_coef[j].end());
    }
    out.scalar_of.resize(n);
    std::iota(out.scalar_of.begin(), out.scalar_of.end(), std::size_t{0});
    std::stable_sort(out.scalar_of.begin(), out.scalar_of.end(),
                     [&](std::size_t a, std::size_t b) { return sig[a] < sig[b]; });
    std::vector<std::size_t> new_index(n);
    for (std::size_t j = 0; j < n; ++j) {
        new_index[out.scalar_of[j]] = j;
    }

    auto relabel = [&](const LinearConstraint &c) {
        LinearConstraint r = c;
        for (auto &entry : r.scalars) entry.first = new_index[entry.first];
        std::sort(r.scalars.begin(), r.scalars.end());
        return r;
    };
    auto row_less = [](const LinearConstraint &a, const LinearConstraint &b) {
        if (a.scalars != b.scalars) return a.scalars < b.scalars;
        if (a.rhs != b.rhs) return a.rhs < b.rhs;
        return matrix_less(a.matrix, b.matrix);
    };
    auto order_rows = [&](const std::vector<LinearConstraint> &rows,
                          std::vector<LinearConstraint> &dst, std::vector<std::size_t> &of) {
        std::vector<LinearConstraint> relabeled;
        relabeled.reserve(rows.size());
        for (const LinearConstraint &c : rows) relabeled.push_back(relabel(c));
        of.resize(rows.size());
        std::iota(of.begin(), of.end(), std::size_t{0});
        std::stable_sort(of.begin(), of.end(), [&](std::size_t a, std::size_t b) {
            return row_less(relabeled[a], relabeled[b]);
        });
        dst.clear();
        for (std::size_t i : of) dst.push_back(std::move(relabeled[i]));
    };

    out.problem.dim = p.dim;
    out.problem.n_scalars = n;
    out.problem.cost_matrix = p.cost_matrix;
    if (p.cost_scalars.size() != 0) {
        out.problem.cost_scalars.resize(static_cast<Eigen::Index>(n));
        for (std::size_t j = 0; j < n; ++j) {
            out.problem.cost_scalars(static_cast<Eigen::Index>(j)) =
                p.cost_scalars(static_cast<Eigen::Index>(out.scalar_of[j]));
        }
    }
    order_rows(p.equalities, out.problem.equalities, out.eq_of);
    order_rows(p.inequalities, out.problem.inequalities, out.ineq_of);
    return out;
}

/// Maps s and y of a canonical solve back to the caller's ordering.
inline void restore_order(const CanonicalProblem &c, SdpSolution &sol) {
    RVector s(sol.s.size());
    for (std::size_t j = 0; j < c.scalar_of.size(); ++j) {
        s(static_cast<Eigen::Index>(c.scalar_of[j])) = sol.s(static_cast<Eigen::Index>(j));
    }
    sol.s = std::move(s);
    RVector y(sol.y.size());
    const std::size_t n_eq = c.eq_of.size();
    for (std::size_t i = 0; i < n_eq; ++i) {
        y(static_cast<Eigen::Index>(c.eq_of[i])) = sol.y(static_cast<Eigen::Index>(i));
    }
    for (std::size_t i = 0; i < c.ineq_of.size(); ++i) {
        y(static_cast<Eigen::Index>(n_eq + c.ineq_of[i])) =
            sol.y(static_cast<Eigen::Index>(n_eq + i));
    }
    sol.y = std::move(y);
}

} // namespace detail

inline SdpSolution solve(const SdpProblem &problem, const SdpOptions &opts = {}) {
    problem.validate();
    const detail::CanonicalProblem canon = detail::canonicalize(problem);
    const detail::StandardForm sf(canon.problem);
    SdpSolution best = detail::solve_once(sf, opts);
    SdpOptions retry = opts;
    for (double reg : opts.fallback_regularization) {
        if (best.status == SdpStatus::Optimal || best.status == SdpStatus::Infeasible) {
            break;
        }
        retry.regularization = reg;
        SdpSolution again = detail::solve_once(sf, retry);
        again.iterations += best.iterations;
        best = std::move(again);
    }
    detail::restore_order(canon, best);
    return best;
}

/// Debug dump for cross-checking against external solvers.
inline nlohmann::json sdp_to_json(const SdpProblem &p) {
    auto mat = [](const CMatrix &m) {
        nlohmann::json flat = nlohmann::json::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                flat.push_back({m(i, j).real(), m(i, j).imag()});
            }
        }
        return flat;
    };
    auto rows = [&](const std::vector<LinearConstraint> &cs) {
        nlohmann::json out = nlohmann::json::array();
        for (const LinearConstraint &c : cs) {
            nlohmann::json scalars = nlohmann::json::array();
            for (const auto &[idx, coef] : c.scalars) {
                scalars.push_back({idx, coef});
            }
            out.push_back({{"matrix", mat(c.matrix)}, {"scalars", scalars}, {"rhs", c.rhs}});
        }
        return out;
    };
    std::vector<double> cs(p.cost_scalars.data(), p.cost_scalars.data() + p.cost_scalars.size());
    return {{"dim", p.dim},
            {"n_scalars", p.n_scalars},
            {"cost_matrix", mat(p.cost_matrix)},
            {"cost_scalars", cs},
            {"equalities", rows(p.equalities)},
            {"inequalities", rows(p.inequalities)}};
}

/// Where a compiled tomography program keeps its tolerance variables.
struct TomographyLayout {
    std::size_t n_measured = 0;             ///< K
    std::size_t delta_offset = 0;           ///< Delta_i live in s[offset, offset + K)
    std::optional<std::size_t> delta_index; ///< position of delta in s, if any
};

struct TomographySdp {
    SdpProblem problem;
    TomographyLayout layout;
    std::vector<std::string> warnings;
};

struct TomographySdpResult {
    DensityMatrix rho;
    std::vector<double> deltas;
    std::optional<double> delta_inf;
    SdpSolution solution;
};

/// Solves a compiled tomography program and wraps X as a density matrix
/// (Hermitian part, eigenvalues clipped at 0, unit trace).
inline TomographySdpResult solve_tomography_sdp(const TomographySdp &compiled,
                                                const SdpOptions &opts = {}) {
    TomographySdpResult out;
    out.solution = solve(compiled.problem, opts);
    const SdpSolution &s = out.solution;
    out.rho = DensityMatrix::project(s.X);
    out.deltas.reserve(compiled.layout.n_measured);
    for (std::size_t i = 0; i < compiled.layout.n_measured; ++i) {
        out.deltas.push_back(s.s(static_cast<Eigen::Index>(compiled.layout.delta_offset + i)));
    }
    if (compiled.layout.delta_index) {
        out.delta_inf = s.s(static_cast<Eigen::Index>(*compiled.layout.delta_index));
    }
    return out;
}

} // namespace tomoforge
