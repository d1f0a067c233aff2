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
 * Built-in invariant suites run by `tomoforge verify`.
 *
 * The state metrics are reached through a Kernels table so a test can swap in
 * a corrupted implementation and confirm the suite notices.
 */

#pragma once

#include "tomoforge/estimators.hpp"
#include "tomoforge/harness.hpp"
#include "tomoforge/metrics.hpp"
#include "tomoforge/povm.hpp"
#include "tomoforge/sdp.hpp"
#include "tomoforge/states.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace tomoforge {

enum class VerifyLevel { Fast, Full };

struct Kernels {
    std::function<double(const DensityMatrix &, const DensityMatrix &)> fidelity =
        [](const DensityMatrix &a, const DensityMatrix &b) { return tomoforge::fidelity(a, b); };
    std::function<double(const DensityMatrix &, const DensityMatrix &)> trace_distance =
        [](const DensityMatrix &a, const DensityMatrix &b) {
            return tomoforge::trace_distance(a, b);
        };
    std::function<double(const DensityMatrix &)> vn_entropy = [](const DensityMatrix &a) {
        return tomoforge::vn_entropy(a);
    };
};

struct VerifyReport {
    std::size_t checks = 0;
    std::vector<std::string> failures;

    [[nodiscard]] bool ok() const noexcept { return failures.empty(); }
};

namespace detail {

class Checker {
  public:
    explicit Checker(VerifyReport &report) : report_(report) {}

    void expect(bool cond, const std::string &suite, const std::string &what) {
        ++report_.checks;
        if (!cond) {
            report_.failures.push_back(suite + ": " + what);
        }
    }

    void near(double got, double want, double tol, const std::string &suite,
              const std::string &what) {
        std::ostringstream msg;
        msg.precision(17);
        msg << what << " (got " << got << ", want " << want << " +- " << tol << ")";
        expect(std::isfinite(got) && std::abs(got - want) <= tol, suite, msg.str());
    }

    /// Runs body, turning a thrown error into a failed check.
    template <class F> void guard(const std::string &suite, F &&body) {
        try {
            body();
        } catch (const std::exception &e) {
            expect(false, suite, std::string("threw: ") + e.what());
        }
    }

  private:
    VerifyReport &report_;
};

inline void verify_states(Checker &c, const Kernels &k) {
    const std::string s = "states";
    c.guard(s, [&] {
        Rng rng(11);
        for (int trial = 0; trial < 5; ++trial) {
            CVector a = detail::ginibre(4, 1, rng).col(0);
            CVector b = detail::ginibre(4, 1, rng).col(0);
            a.normalize();
            b.normalize();
            const DensityMatrix ra = pure_state(a);
            const DensityMatrix rb = pure_state(b);
            const double overlap = std::norm(a.dot(b));
            c.near(k.fidelity(ra, rb), overlap, 1e-9, s, "pure-state fidelity = |<a|b>|^2");
            c.near(k.trace_distance(ra, rb), std::sqrt(1.0 - overlap), 1e-8, s,
                   "pure-state trace distance = sqrt(1 - F)");
            c.near(k.fidelity(ra, ra), 1.0, 1e-9, s, "F(rho, rho) = 1");
            const DensityMatrix mixed = random_rank_r(4, 3, rng);
            c.near(k.fidelity(mixed, ra), k.fidelity(ra, mixed), 1e-9, s, "fidelity symmetry");
        }
        c.near(k.vn_entropy(maximally_mixed(8)), std::log(8.0), 1e-12, s, "S(I/8) = ln 8");
        CVector e0 = CVector::Zero(2);
        e0(0) = 1.0;
        c.near(k.vn_entropy(pure_state(e0)), 0.0, 1e-12, s, "pure state entropy");
        const DensityMatrix zero = pure_state(e0);
        c.near(k.fidelity(zero, maximally_mixed(2)), 0.5, 1e-12, s, "F(|0>, I/2) = 1/2");
    });
}

inline void verify_povm(Checker &c) {
    const std::string s = "povm";
    c.guard(s, [&] {
        for (int n = 1; n <= 3; ++n) {
            const Povm p = sic_product_povm(n);
            c.expect(p.size() == (std::size_t{1} << (2 * n)), s, "4^n effects");
            const RMatrix g = gram_matrix(p);
            Eigen::JacobiSVD<RMatrix> svd(g);
            c.expect(svd.singularValues().minCoeff() > 1e-8, s,
                     "Gram matrix nonsingular for n = " + std::to_string(n));
        }
        const Povm sic = qubit_sic();
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = 0; j < 4; ++j) {
                const double want = i == j ? 0.25 : 1.0 / 12.0;
                c.near(trace_product(sic[i], sic[j]), want, 1e-12, s, "SIC overlaps");
            }
        }
        Rng a(5);
        Rng b(5);
        c.expect(select_subset(64, 20, a) == select_subset(64, 20, b), s,
                 "subset plan is a function of the seed");
    });
}

inline void verify_sdp(Checker &c) {
    const std::string s = "sdp";
    c.guard(s, [&] {
        SdpProblem p1;
        p1.dim = 2;
        p1.cost_matrix = diagonal({1.0, 2.0});
        p1.equalities.push_back({identity(2), {}, 1.0});
        const SdpSolution r1 = solve(p1);
        c.expect(r1.status == SdpStatus::Optimal, s, "example 1 optimal");
        c.near(r1.objective, 1.0, 1e-7, s, "min tr(diag(1,2) X), tr X = 1");

        SdpProblem p2;
        p2.dim = 1;
        p2.n_scalars = 1;
        p2.cost_scalars = RVector::Ones(1);
        p2.inequalities.push_back({CMatrix(), {{0, -1.0}}, -3.0});
        const SdpSolution r2 = solve(p2);
        c.expect(r2.status == SdpStatus::Optimal, s, "example 2 optimal");
        c.near(r2.objective, 3.0, 1e-7, s, "min s, s >= 3");

        SdpProblem p3;
        p3.dim = 2;
        p3.cost_matrix = identity(2);
        p3.equalities.push_back({diagonal({1.0, 0.0}), {}, 1.0});
        p3.equalities.push_back({diagonal({0.0, 1.0}), {}, 2.0});
        const SdpSolution r3 = solve(p3);
        c.expect(r3.status == SdpStatus::Optimal, s, "example 3 optimal");
        c.near(r3.objective, 3.0, 1e-7, s, "min tr X, diagonal fixed to (1, 2)");

        SdpProblem bad;
        bad.dim = 2;
        bad.cost_matrix = identity(2);
        bad.equalities.push_back({identity(2), {}, 1.0});
        bad.inequalities.push_back({diagonal({1.0, 2.0}), {}, 0.5});
        c.expect(solve(bad).status == SdpStatus::Infeasible, s, "infeasible program detected");
    });
}

inline void verify_maxent(Checker &c, const Kernels &k) {
    const std::string s = "estimators";
    c.guard(s, [&] {
        const Reconstruction empty = maxent_estimate(std::span<const CMatrix>{},
                                                     std::span<const double>{}, 4);
        c.near(k.trace_distance(empty.rho, maximally_mixed(4)), 0.0, 1e-14, s, "K = 0 gives I/d");

        const std::vector<CMatrix> proj = {diagonal({1.0, 0.0, 0.0}), diagonal({0.0, 1.0, 0.0})};
        const std::vector<double> f = {0.5, 0.2};
        const Reconstruction me = maxent_estimate(proj, f, 3);
        const DensityMatrix want = DensityMatrix::unchecked(diagonal({0.5, 0.2, 0.3}));
        c.near(k.trace_distance(me.rho, want), 0.0, 1e-8, s, "eigenbasis MaxEnt = diag(.5,.2,.3)");

        Rng rng(3);
        const Povm sic = qubit_sic();
        const DensityMatrix rho = random_rank_r(2, 2, rng);
        const SubsetPlan all = prefix_subset(4, 4);
        const FrequencyVector fr = expectations(rho, sic, all);
        c.near(k.trace_distance(maxent_estimate(sic, fr).rho, rho), 0.0, 1e-6, s,
               "1-qubit quorum MaxEnt recovers the state");
    });
}

inline void verify_metrics(Checker &c) {
    const std::string s = "metrics";
    c.guard(s, [&] {
        c.near(kl_from_uniform({{1.0, 0.0}, 1.0}), std::log(2.0), 1e-14, s, "point mass KL = ln 2");
        c.near(kl_from_uniform({{0.5, 0.25, 0.25}, 1.0}), 0.5 * std::log(1.5) + 0.5 * std::log(0.75),
               1e-14, s, "closed-form KL");
        const Povm p = sic_product_povm(2);
        Rng rng(8);
        const SubsetPlan plan = select_subset(p.size(), 5, rng);
        c.near(kl_from_uniform(unmeasured_vector(maximally_mixed(4), p, plan)), 0.0, 1e-12, s,
               "maximally mixed state leaves u uniform");
        const SummaryStats st = summarize({1.0, 2.0, 3.0, 4.0});
        c.expect(st.median == 2.5 && st.q1 == 1.75 && st.q3 == 3.25, s,
                 "linear-interpolation quartiles of {1,2,3,4}");
    });
}

inline void verify_full(Checker &c, const Kernels &k) {
    const std::string s = "full";
    c.guard(s, [&] {
        // Quorum reconstruction, every method.
        const Povm povm = sic_product_povm(3);
        const SubsetPlan all = prefix_subset(povm.size(), povm.size());
        Rng rng(21);
        for (int trial = 0; trial < 2; ++trial) {
            const DensityMatrix target = haar_pure(3, rng);
            const FrequencyVector f = expectations(target, povm, all);
            c.near(k.trace_distance(maxent_estimate(povm, f).rho, target), 0.0, 1e-4, s,
                   "quorum MaxEnt");
            for (PvqtParams params : {kVqt, kVqtInf, PvqtParams{1.0, 0.01}}) {
                const Reconstruction r = pvqt_estimate(povm, all, f, params);
                c.near(k.trace_distance(r.rho, target), 0.0, 1e-4, s,
                       "quorum " + r.method.tag());
            }
        }
        // Eigenbasis measurements: VQT-infinity coincides with MaxEnt.
        const Povm basis = computational_basis(8);
        for (int trial = 0; trial < 3; ++trial) {
            RVector w(8);
            for (Eigen::Index i = 0; i < 8; ++i) {
                w(i) = 0.2 + std::uniform_real_distribution<double>(0.0, 1.0)(rng);
            }
            w /= w.sum();
            const DensityMatrix rho = DensityMatrix::unchecked(w.cast<Complex>().asDiagonal());
            const SubsetPlan plan = prefix_subset(8, 4);
            const FrequencyVector f = expectations(rho, basis, plan);
            const Reconstruction me = maxent_estimate(basis, f);
            const Reconstruction inf = pvqt_estimate(basis, plan, f, kVqtInf);
            c.near(k.trace_distance(me.rho, inf.rho), 0.0, 1e-5, s,
                   "eigenbasis VQT-infinity = MaxEnt");
        }
    });
}

} // namespace detail

inline VerifyReport run_verify(VerifyLevel level, const Kernels &kernels = {}) {
    VerifyReport report;
    detail::Checker c(report);
    detail::verify_states(c, kernels);
    detail::verify_povm(c);
    detail::verify_sdp(c);
    detail::verify_maxent(c, kernels);
    detail::verify_metrics(c);
    if (level == VerifyLevel::Full) {
        detail::verify_full(c, kernels);
    }
    return report;
}

} // namespace tomoforge
