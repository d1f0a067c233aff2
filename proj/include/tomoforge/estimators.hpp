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
 * State estimators for incomplete POVM data.
 *
 * MaxEnt: rho = exp(-sum_i lambda_i E_i) / N with the multipliers fitted by
 * Levenberg-Marquardt so that tr(E_i rho) = f_i (least squares when the data
 * are inconsistent).
 *
 * PVQT(alpha, beta): the semidefinite program
 *
 *     minimize    sum_i Delta_i + alpha sum_{j unmeasured} tr(E_j rho) + beta delta
 *     subject to  |tr(E_i rho) - f_i| <= Delta_i f_i      (i measured)
 *                 tr(E_j rho) <= delta                    (j unmeasured)
 *                 Delta >= 0, delta >= 0, tr(rho) = 1, rho >= 0
 *
 * which is VQT at (1, 0) and VQT-infinity at (0, 1).
 */

#pragma once

#include "tomoforge/cxmat.hpp"
#include "tomoforge/error.hpp"
#include "tomoforge/measure.hpp"
#include "tomoforge/povm.hpp"
#include "tomoforge/sdp.hpp"
#include "tomoforge/states.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace tomoforge {

struct PvqtParams {
    double alpha = 1.0;
    double beta = 0.0;

    friend bool operator==(const PvqtParams &, const PvqtParams &) = default;
};

inline constexpr PvqtParams kVqt{1.0, 0.0};
inline constexpr PvqtParams kVqtInf{0.0, 1.0};

enum class MethodKind { MaxEnt, Pvqt };

struct MethodSpec {
    MethodKind kind = MethodKind::MaxEnt;
    PvqtParams params{};

    static MethodSpec maxent() { return {MethodKind::MaxEnt, {}}; }
    static MethodSpec pvqt(double alpha, double beta) {
        if (!(alpha >= 0.0 && alpha <= 1.0 && beta >= 0.0 && beta <= 1.0)) {
            throw Error(Errc::InvalidArgument, "PVQT alpha and beta must lie in [0, 1]");
        }
        return {MethodKind::Pvqt, {alpha, beta}};
    }

    /// "MaxEnt" or "PVQT(alpha,beta)" with shortest round-trip numbers.
    [[nodiscard]] std::string tag() const {
        if (kind == MethodKind::MaxEnt) {
            return "MaxEnt";
        }
        auto num = [](double v) {
            char buf[32];
            auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
            (void)ec;
            return std::string(buf, end);
        };
        return "PVQT(" + num(params.alpha) + "," + num(params.beta) + ")";
    }

    friend bool operator==(const MethodSpec &, const MethodSpec &) = default;
};

/// Inverse of MethodSpec::tag.
inline MethodSpec parse_method_tag(std::string_view tag) {
    if (tag == "MaxEnt") {
        return MethodSpec::maxent();
    }
    constexpr std::string_view prefix = "PVQT(";
    if (tag.starts_with(prefix) && tag.ends_with(")")) {
        const std::string_view body = tag.substr(prefix.size(), tag.size() - prefix.size() - 1);
        const auto comma = body.find(',');
        if (comma != std::string_view::npos) {
            double a = 0.0;
            double b = 0.0;
            const auto ra = std::from_chars(body.data(), body.data() + comma, a);
            const auto rb = std::from_chars(body.data() + comma + 1, body.data() + body.size(), b);
            if (ra.ec == std::errc{} && rb.ec == std::errc{} &&
                ra.ptr == body.data() + comma && rb.ptr == body.data() + body.size()) {
                return MethodSpec::pvqt(a, b);
            }
        }
    }
    throw Error(Errc::InvalidArgument, "unrecognized method tag '" + std::string(tag) + "'");
}

// ---------------------------------------------------------------------------
// MaxEnt

struct LagrangeVector {
    RVector lambdas;
    double normalization = 0.0; ///< tr exp(-sum lambda_i E_i)
};

enum class MaxEntStatus {
    Converged,     ///< max residual <= tol
    Stationary,    ///< least-squares stationary point with residual > tol
    LambdaCap,     ///< |lambda|_inf reached the cap
    NoConvergence, ///< iteration cap
};

constexpr std::string_view maxent_status_name(MaxEntStatus s) noexcept {
    switch (s) {
    case MaxEntStatus::Converged: return "Converged";
    case MaxEntStatus::Stationary: return "Stationary";
    case MaxEntStatus::LambdaCap: return "LambdaCap";
    case MaxEntStatus::NoConvergence: return "NoConvergence";
    }
    return "Unknown";
}

struct MaxEntOptions {
    double tol = 1e-8;
    int max_iter = 500;
    double damping_init = 1e-3;
    double residual_stop = 1e-10;
    double step_stop = 1e-12;
    /// Stationary once the cost falls by less than cost_stop (relative) over
    /// cost_window accepted steps. Inconsistent data drive lambda toward the
    /// cone boundary without a finite minimizer, so the cost only plateaus.
    double cost_stop = 1e-4;
    int cost_window = 25;
    double lambda_cap = 1e3;
};

namespace detail {

inline void check_effects(std::span<const CMatrix> effects, std::size_t n_freq) {
    if (effects.size() != n_freq) {
        throw Error(Errc::DimMismatch, "effect count differs from frequency count");
    }
    for (const CMatrix &e : effects) {
        if (e.rows() != effects.front().rows() || e.rows() != e.cols()) {
            throw Error(Errc::DimMismatch, "effects differ in shape");
        }
    }
}

inline CMatrix weighted_sum(std::span<const CMatrix> effects, const RVector &w, Eigen::Index d) {
    CMatrix h = CMatrix::Zero(d, d);
    for (std::size_t i = 0; i < effects.size(); ++i) {
        h += w(static_cast<Eigen::Index>(i)) * effects[i];
    }
    return hermitian_part(h);
}

/// Everything the residual and Jacobian need at one multiplier vector.
/// `shift` is subtracted from the spectrum of H before exponentiating, so
/// `weights` = exp(-(h - shift)); every derived quantity carries the common
/// factor exp(shift).
struct ExpFamilyPoint {
    HermEig eig;
    RVector weights;
    double shift = 0.0;
    CMatrix rotated; ///< K x d^2, row i = vec(V^dagger E_i V)
};

inline ExpFamilyPoint exp_family_point(std::span<const CMatrix> effects, const RVector &lambdas,
                                       Eigen::Index d, bool shift_spectrum) {
    ExpFamilyPoint pt;
    pt.eig = herm_eig(weighted_sum(effects, lambdas, d), 1e-6);
    pt.shift = shift_spectrum ? pt.eig.eigenvalues(0) : 0.0;
    pt.weights = (-(pt.eig.eigenvalues.array() - pt.shift)).exp().matrix();
    const auto k = static_cast<Eigen::Index>(effects.size());
    pt.rotated.resize(k, d * d);
    const CMatrix &v = pt.eig.eigenvectors;
    for (Eigen::Index i = 0; i < k; ++i) {
        const CMatrix r = v.adjoint() * effects[static_cast<std::size_t>(i)] * v;
        pt.rotated.row(i) = Eigen::Map<const CVector>(r.data(), d * d).transpose();
    }
    return pt;
}

/// tr(E_i exp(-H)) for every i (in the shifted scale).
inline RVector weighted_traces(const ExpFamilyPoint &pt, Eigen::Index d) {
    const auto k = pt.rotated.rows();
    RVector out(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        double s = 0.0;
        for (Eigen::Index a = 0; a < d; ++a) {
            s += pt.rotated(i, a * d + a).real() * pt.weights(a);
        }
        out(i) = s;
    }
    return out;
}

/// Divided differences of x -> exp(-(x - shift)) on the spectrum.
inline RMatrix exp_divided_differences(const ExpFamilyPoint &pt) {
    const RVector &h = pt.eig.eigenvalues;
    const Eigen::Index d = h.size();
    RMatrix f(d, d);
    for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = 0; b < d; ++b) {
            const double delta = h(a) - h(b);
            if (std::abs(delta) < 1e-13) {
                f(a, b) = -0.5 * (pt.weights(a) + pt.weights(b));
            } else {
                f(a, b) = pt.weights(b) * std::expm1(-delta) / delta;
            }
        }
    }
    return f;
}

/// G_ij = d tr(E_i exp(-H)) / d lambda_j and n_j = d tr(exp(-H)) / d lambda_j
/// via the Daleckii-Krein formula for the Frechet derivative of exp.
inline void exp_family_derivatives(const ExpFamilyPoint &pt, Eigen::Index d, RMatrix &g,
                                   RVector &n) {
    const RMatrix f = exp_divided_differences(pt);
    const auto k = pt.rotated.rows();
    CMatrix scaled = pt.rotated;
    for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = 0; b < d; ++b) {
            scaled.col(a * d + b) *= f(a, b);
        }
    }
    g = (pt.rotated.conjugate() * scaled.transpose()).real();
    n.resize(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        double s = 0.0;
        for (Eigen::Index a = 0; a < d; ++a) {
            s -= pt.rotated(j, a * d + a).real() * pt.weights(a);
        }
        n(j) = s;
    }
}

} // namespace detail

inline LagrangeVector make_lagrange_vector(RVector lambdas, std::span<const CMatrix> effects,
                                           Eigen::Index dim) {
    if (static_cast<std::size_t>(lambdas.size()) != effects.size()) {
        throw Error(Errc::DimMismatch, "lambda count differs from effect count");
    }
    const RVector w = herm_eig(detail::weighted_sum(effects, lambdas, dim), 1e-6).eigenvalues;
    LagrangeVector out;
    out.normalization = (-w.array()).exp().sum();
    out.lambdas = std::move(lambdas);
    return out;
}

/// r_i = tr(E_i exp(-sum lambda E)) - N f_i.
inline RVector maxent_residual(const LagrangeVector &lambda, std::span<const CMatrix> effects,
                               std::span<const double> f) {
    detail::check_effects(effects, f.size());
    if (static_cast<std::size_t>(lambda.lambdas.size()) != effects.size()) {
        throw Error(Errc::DimMismatch, "lambda count differs from effect count");
    }
    if (effects.empty()) {
        return {};
    }
    const Eigen::Index d = effects.front().rows();
    const auto pt = detail::exp_family_point(effects, lambda.lambdas, d, false);
    const double norm = pt.weights.sum();
    RVector r = detail::weighted_traces(pt, d);
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        r(i) -= norm * f[static_cast<std::size_t>(i)];
    }
    return r;
}

/// d r_i / d lambda_j for maxent_residual.
inline RMatrix maxent_jacobian(const LagrangeVector &lambda, std::span<const CMatrix> effects,
                               std::span<const double> f) {
    detail::check_effects(effects, f.size());
    if (effects.empty()) {
        return {};
    }
    const Eigen::Index d = effects.front().rows();
    const auto pt = detail::exp_family_point(effects, lambda.lambdas, d, false);
    RMatrix g;
    RVector n;
    detail::exp_family_derivatives(pt, d, g, n);
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
        g.row(i) -= f[static_cast<std::size_t>(i)] * n.transpose();
    }
    return g;
}

// ---------------------------------------------------------------------------
// Reconstructions

struct SolverDiagnostics {
    std::string status;
    bool ok = false;
    int iterations = 0;
    double primal_feas = 0.0;
    double dual_feas = 0.0;
    double duality_gap = 0.0;
    double max_constraint_residual = 0.0; ///< max_i |tr(E_i rho) - f_i|
    std::vector<std::string> warnings;
};

struct Reconstruction {
    DensityMatrix rho;
    MethodSpec method;
    std::vector<double> deltas;
    std::optional<double> delta_inf;
    std::optional<LagrangeVector> lambdas;
    SolverDiagnostics diagnostics;
};

namespace detail {

inline double max_constraint_residual(const DensityMatrix &rho, std::span<const CMatrix> effects,
                                      std::span<const double> f) {
    double worst = 0.0;
    for (std::size_t i = 0; i < effects.size(); ++i) {
        worst = std::max(worst, std::abs(trace_product(effects[i], rho.mat()) - f[i]));
    }
    return worst;
}

} // namespace detail

/// Least-squares MaxEnt fit. K = 0 yields I/d.
inline Reconstruction maxent_estimate(std::span<const CMatrix> effects, std::span<const double> f,
                                      Eigen::Index dim, const MaxEntOptions &opts = {}) {
    detail::check_effects(effects, f.size());
    if (!effects.empty() && effects.front().rows() != dim) {
        throw Error(Errc::DimMismatch, "effect dimension differs from dim");
    }
    Reconstruction out;
    out.method = MethodSpec::maxent();
    const auto k = static_cast<Eigen::Index>(effects.size());
    if (k == 0) {
        out.rho = maximally_mixed(dim);
        out.lambdas = LagrangeVector{RVector(), static_cast<double>(dim)};
        out.diagnostics.status = std::string(maxent_status_name(MaxEntStatus::Converged));
        out.diagnostics.ok = true;
        return out;
    }
    const Eigen::Map<const RVector> fv(f.data(), k);

    // Work with the normalized residual tr(E_i rho) - f_i: same zeros as the
    // unnormalized system and invariant under shifts of the spectrum.
    auto evaluate = [&](const RVector &lam, RVector &r, RMatrix *jac) {
        const auto pt = detail::exp_family_point(effects, lam, dim, true);
        const double norm = pt.weights.sum();
        const RVector p = detail::weighted_traces(pt, dim) / norm;
        r = p - fv;
        if (jac != nullptr) {
            RMatrix g;
            RVector n;
            detail::exp_family_derivatives(pt, dim, g, n);
            *jac = (g - p * n.transpose()) / norm;
        }
    };

    RVector lam = RVector::Zero(k);
    RVector r;
    RMatrix jac;
    evaluate(lam, r, &jac);
    double cost = r.squaredNorm();
    double damping = opts.damping_init;
    MaxEntStatus status = MaxEntStatus::NoConvergence;
    int iter = 0;
    bool at_cap = false;
    std::vector<double> history{cost};

    for (; iter < opts.max_iter; ++iter) {
        if (r.norm() < opts.residual_stop) {
            status = MaxEntStatus::Converged;
            break;
        }
        const RMatrix jtj = jac.transpose() * jac;
        const RVector grad = jac.transpose() * r;
        RVector scale = jtj.diagonal().cwiseMax(1e-12 * std::max(1.0, jtj.diagonal().maxCoeff()));

        bool accepted = false;
        RVector step;
        RVector trial_r;
        while (damping < 1e16) {
            RMatrix a = jtj;
            a.diagonal() += damping * scale;
            step = -a.ldlt().solve(grad);
            RVector trial = lam + step;
            const double cap = opts.lambda_cap;
            trial = trial.cwiseMax(-cap).cwiseMin(cap);
            step = trial - lam;
            evaluate(trial, trial_r, nullptr);
            const double trial_cost = trial_r.squaredNorm();
            if (std::isfinite(trial_cost) && trial_cost < cost) {
                accepted = true;
                lam = trial;
                cost = trial_cost;
                r = trial_r;
                damping = std::max(damping / 10.0, 1e-15);
                break;
            }
            damping *= 10.0;
        }
        if (!accepted) {
            status = MaxEntStatus::Stationary;
            break;
        }
        at_cap = lam.cwiseAbs().maxCoeff() >= opts.lambda_cap;
        evaluate(lam, r, &jac);
        history.push_back(cost);
        const auto w = static_cast<std::size_t>(std::max(opts.cost_window, 1));
        const bool plateau = history.size() > w &&
                             history[history.size() - 1 - w] - cost <= opts.cost_stop * cost;
        if (plateau || step.norm() <= opts.step_stop * (lam.norm() + opts.step_stop)) {
            status = MaxEntStatus::Stationary;
            ++iter;
            break;
        }
        if (at_cap) {
            status = MaxEntStatus::LambdaCap;
            ++iter;
            break;
        }
    }

    const auto pt = detail::exp_family_point(effects, lam, dim, true);
    CMatrix rho = func_hermitian(pt.eig, [&](double w) { return std::exp(-(w - pt.shift)); });
    out.rho = DensityMatrix::project(rho);
    out.lambdas = make_lagrange_vector(lam, effects, dim);
    auto &diag = out.diagnostics;
    diag.iterations = iter;
    diag.max_constraint_residual = detail::max_constraint_residual(out.rho, effects, f);
    if (status != MaxEntStatus::LambdaCap && status != MaxEntStatus::NoConvergence &&
        diag.max_constraint_residual <= opts.tol) {
        status = MaxEntStatus::Converged;
    }
    diag.status = std::string(maxent_status_name(status));
    diag.ok = status != MaxEntStatus::NoConvergence;
    return out;
}

inline Reconstruction maxent_estimate(const Povm &povm, const FrequencyVector &f,
                                      const MaxEntOptions &opts = {}) {
    const std::vector<CMatrix> effects = povm.select(f.indices);
    return maxent_estimate(effects, f.values, povm.dim(), opts);
}

// ---------------------------------------------------------------------------
// PVQT family

/// Frequencies below this are replaced by it in the Delta_i f_i bound.
inline constexpr double kFrequencyFloor = 1e-6;

namespace detail {

inline void check_pvqt_inputs(std::span<const CMatrix> measured, std::span<const double> f) {
    if (measured.empty()) {
        throw Error(Errc::EmptyMeasuredSet, "PVQT needs at least one measured effect");
    }
    check_effects(measured, f.size());
}

inline double floored_frequency(double fi, std::size_t i, std::vector<std::string> &warnings) {
    if (fi >= kFrequencyFloor) {
        return fi;
    }
    std::ostringstream msg;
    msg << "frequency f[" << i << "] = " << fi << " below floor; tolerance scaled by "
        << kFrequencyFloor;
    warnings.push_back(msg.str());
    return kFrequencyFloor;
}

} // namespace detail

/// Compiles PVQT(alpha, beta) into an SdpProblem. Scalars are
/// [Delta_0 .. Delta_{K-1}, delta?]; delta (and its bounds) exist only when
/// beta > 0 and there is at least one unmeasured effect.
inline TomographySdp compile_pvqt(std::span<const CMatrix> measured,
                                  std::span<const CMatrix> unmeasured, std::span<const double> f,
                                  PvqtParams params) {
    detail::check_pvqt_inputs(measured, f);
    const std::size_t k = measured.size();
    const Eigen::Index d = measured.front().rows();
    const bool with_delta = params.beta > 0.0 && !unmeasured.empty();

    TomographySdp out;
    SdpProblem &p = out.problem;
    p.dim = d;
    p.n_scalars = k + (with_delta ? 1 : 0);
    p.cost_scalars = RVector::Ones(static_cast<Eigen::Index>(p.n_scalars));
    if (with_delta) {
        p.cost_scalars(static_cast<Eigen::Index>(k)) = params.beta;
        out.layout.delta_index = k;
    }
    out.layout.n_measured = k;
    p.cost_matrix = CMatrix::Zero(d, d);
    if (params.alpha > 0.0) {
        for (const CMatrix &e : unmeasured) {
            p.cost_matrix += params.alpha * e;
        }
    }

    p.equalities.push_back({identity(d), {}, 1.0});
    for (std::size_t i = 0; i < k; ++i) {
        const double scale = detail::floored_frequency(f[i], i, out.warnings);
        // tr(E rho) - f <= Delta f  and  f - tr(E rho) <= Delta f
        p.inequalities.push_back({measured[i], {{i, -scale}}, f[i]});
        p.inequalities.push_back({-measured[i], {{i, -scale}}, -f[i]});
    }
    if (with_delta) {
        for (const CMatrix &e : unmeasured) {
            p.inequalities.push_back({e, {{k, -1.0}}, 0.0});
        }
    }
    return out;
}

/// Plain VQT, written out directly (lower bounds first, then upper bounds).
inline TomographySdp compile_vqt(std::span<const CMatrix> measured,
                                 std::span<const CMatrix> unmeasured, std::span<const double> f) {
    detail::check_pvqt_inputs(measured, f);
    const std::size_t k = measured.size();
    const Eigen::Index d = measured.front().rows();
    TomographySdp out;
    SdpProblem &p = out.problem;
    p.dim = d;
    p.n_scalars = k;
    p.cost_scalars = RVector::Ones(static_cast<Eigen::Index>(k));
    CMatrix u1 = CMatrix::Zero(d, d);
    for (const CMatrix &e : unmeasured) {
        u1 += e;
    }
    p.cost_matrix = u1;
    out.layout.n_measured = k;
    for (std::size_t i = 0; i < k; ++i) {
        const double scale = detail::floored_frequency(f[i], i, out.warnings);
        p.inequalities.push_back({-measured[i], {{i, -scale}}, -f[i]});
    }
    for (std::size_t i = 0; i < k; ++i) {
        const double scale = std::max(f[i], kFrequencyFloor);
        p.inequalities.push_back({measured[i], {{i, -scale}}, f[i]});
    }
    p.equalities.push_back({identity(d), {}, 1.0});
    return out;
}

/// VQT-infinity in its linearized form with the auxiliary bound delta,
/// written out directly (delta first in the scalar vector).
inline TomographySdp compile_vqt_inf(std::span<const CMatrix> measured,
                                     std::span<const CMatrix> unmeasured,
                                     std::span<const double> f) {
    detail::check_pvqt_inputs(measured, f);
    const std::size_t k = measured.size();
    const Eigen::Index d = measured.front().rows();
    TomographySdp out;
    SdpProblem &p = out.problem;
    p.dim = d;
    const bool with_delta = !unmeasured.empty();
    const std::size_t offset = with_delta ? 1 : 0;
    p.n_scalars = k + offset;
    p.cost_scalars = RVector::Ones(static_cast<Eigen::Index>(p.n_scalars));
    p.cost_matrix = CMatrix::Zero(d, d);
    out.layout.n_measured = k;

    // Scalars: [delta, Delta_0, ..., Delta_{K-1}].
    if (with_delta) {
        out.layout.delta_index = 0;
    }
    p.equalities.push_back({identity(d), {}, 1.0});
    for (const CMatrix &e : unmeasured) {
        p.inequalities.push_back({e, {{0, -1.0}}, 0.0});
    }
    for (std::size_t i = 0; i < k; ++i) {
        const double scale = detail::floored_frequency(f[i], i, out.warnings);
        p.inequalities.push_back({measured[i], {{i + offset, -scale}}, f[i]});
        p.inequalities.push_back({-measured[i], {{i + offset, -scale}}, -f[i]});
    }
    out.layout.delta_offset = offset;
    return out;
}

inline Reconstruction reconstruction_from_sdp(const TomographySdpResult &solved,
                                              const MethodSpec &method,
                                              std::span<const CMatrix> measured,
                                              std::span<const double> f,
                                              std::vector<std::string> warnings) {
    Reconstruction out;
    out.rho = solved.rho;
    out.method = method;
    out.deltas = solved.deltas;
    out.delta_inf = solved.delta_inf;
    auto &diag = out.diagnostics;
    const SdpSolution &s = solved.solution;
    diag.status = std::string(sdp_status_name(s.status));
    diag.ok = s.status == SdpStatus::Optimal;
    diag.iterations = s.iterations;
    diag.primal_feas = s.residuals.primal_feas;
    diag.dual_feas = s.residuals.dual_feas;
    diag.duality_gap = s.residuals.duality_gap;
    diag.max_constraint_residual = detail::max_constraint_residual(out.rho, measured, f);
    diag.warnings = std::move(warnings);
    return out;
}

inline Reconstruction pvqt_estimate(std::span<const CMatrix> measured,
                                    std::span<const CMatrix> unmeasured, std::span<const double> f,
                                    PvqtParams params, const SdpOptions &sdp_opts = {}) {
    TomographySdp compiled = compile_pvqt(measured, unmeasured, f, params);
    const TomographySdpResult solved = solve_tomography_sdp(compiled, sdp_opts);
    return reconstruction_from_sdp(solved, MethodSpec{MethodKind::Pvqt, params}, measured, f,
                                   std::move(compiled.warnings));
}

inline Reconstruction pvqt_estimate(const Povm &povm, const SubsetPlan &plan,
                                    const FrequencyVector &f, PvqtParams params,
                                    const SdpOptions &sdp_opts = {}) {
    const std::vector<CMatrix> measured = povm.select(plan.measured);
    const std::vector<CMatrix> unmeasured = povm.select(plan.unmeasured);
    return pvqt_estimate(measured, unmeasured, f.values, params, sdp_opts);
}

} // namespace tomoforge
