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

#include "tomoforge/estimators.hpp"
#include "tomoforge/measure.hpp"
#include "tomoforge/sdp.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace tomoforge;
using Catch::Matchers::WithinAbs;

namespace {

CMatrix random_hermitian(Eigen::Index d, std::mt19937_64 &rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    CMatrix a(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            a(i, j) = Complex(n(rng), n(rng));
        }
    }
    return hermitian_part(a);
}

// min tr(diag(1,2) X) s.t. tr X = 1
SdpProblem smallest_eigenvalue() {
    SdpProblem p;
    p.dim = 2;
    p.cost_matrix = diagonal({1.0, 2.0});
    p.equalities.push_back({identity(2), {}, 1.0});
    return p;
}

// min s s.t. s >= 3 (as -s <= -3)
SdpProblem scalar_bound() {
    SdpProblem p;
    p.dim = 1;
    p.n_scalars = 1;
    p.cost_scalars = RVector::Ones(1);
    p.inequalities.push_back({CMatrix(), {{0, -1.0}}, -3.0});
    return p;
}

// min tr X s.t. X_00 = 1, X_11 = 2
SdpProblem diagonal_program() {
    SdpProblem p;
    p.dim = 2;
    p.cost_matrix = identity(2);
    p.equalities.push_back({diagonal({1.0, 0.0}), {}, 1.0});
    p.equalities.push_back({diagonal({0.0, 1.0}), {}, 2.0});
    return p;
}

double recomputed_objective(const SdpProblem &p, const SdpSolution &s) {
    double v = p.cost_matrix.size() != 0 ? trace_product(p.cost_matrix, s.X) : 0.0;
    if (p.cost_scalars.size() != 0) {
        v += p.cost_scalars.dot(s.s);
    }
    return v;
}

} // namespace

TEST_CASE("real_embed examples", "[sdp]") {
    CHECK(real_embed(identity(2)) == RMatrix::Identity(4, 4));

    CMatrix y(2, 2);
    y << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
    Eigen::SelfAdjointEigenSolver<RMatrix> es(real_embed(y));
    const RVector w = es.eigenvalues();
    CHECK_THAT(w(0), WithinAbs(-1.0, 1e-14));
    CHECK_THAT(w(1), WithinAbs(-1.0, 1e-14));
    CHECK_THAT(w(2), WithinAbs(1.0, 1e-14));
    CHECK_THAT(w(3), WithinAbs(1.0, 1e-14));

    CMatrix skew(2, 2);
    skew << 1.0, 1.0, 0.0, 2.0;
    REQUIRE_THROWS_AS(real_embed(skew), Error);
}

TEST_CASE("real_embed doubles the spectrum and round-trips", "[sdp]") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        const CMatrix h = random_hermitian(5, rng);
        const RMatrix e = real_embed(h);
        CHECK_THAT(e.trace(), WithinAbs(2.0 * h.trace().real(), 1e-12));
        const RVector we = Eigen::SelfAdjointEigenSolver<RMatrix>(e).eigenvalues();
        const RVector wh = herm_eig(h).eigenvalues;
        for (Eigen::Index i = 0; i < 5; ++i) {
            CHECK_THAT(we(2 * i), WithinAbs(wh(i), 1e-10));
            CHECK_THAT(we(2 * i + 1), WithinAbs(wh(i), 1e-10));
        }
        CHECK(real_unembed(e) == h);
    }
}

TEST_CASE("analytic SDP optima", "[sdp]") {
    const SdpSolution a = solve(smallest_eigenvalue());
    REQUIRE(a.status == SdpStatus::Optimal);
    CHECK_THAT(a.objective, WithinAbs(1.0, 1e-7));
    CHECK((a.X - diagonal({1.0, 0.0})).cwiseAbs().maxCoeff() < 1e-7);

    const SdpSolution b = solve(scalar_bound());
    REQUIRE(b.status == SdpStatus::Optimal);
    CHECK_THAT(b.objective, WithinAbs(3.0, 1e-7));
    CHECK_THAT(b.s(0), WithinAbs(3.0, 1e-7));

    const SdpSolution c = solve(diagonal_program());
    REQUIRE(c.status == SdpStatus::Optimal);
    CHECK_THAT(c.objective, WithinAbs(3.0, 1e-7));
    CHECK((c.X - diagonal({1.0, 2.0})).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("Optimal status implies small residuals and a consistent objective", "[sdp]") {
    for (const SdpProblem &p : {smallest_eigenvalue(), scalar_bound(), diagonal_program()}) {
        const SdpSolution s = solve(p);
        REQUIRE(s.status == SdpStatus::Optimal);
        const SdpOptions opts;
        CHECK(s.residuals.primal_feas <= opts.tol);
        CHECK(s.residuals.dual_feas <= opts.tol);
        CHECK(s.residuals.duality_gap <= opts.tol);
        CHECK(std::abs(s.objective - recomputed_objective(p, s)) <= 1e-8 * (1.0 + std::abs(s.objective)));
        CHECK(herm_eig(s.X).eigenvalues(0) >= -opts.tol);
        CHECK((s.s.array() >= -opts.tol).all());
    }
}

TEST_CASE("contradictory equalities are reported infeasible", "[sdp]") {
    SdpProblem p;
    p.dim = 2;
    p.cost_matrix = identity(2);
    p.equalities.push_back({identity(2), {}, 1.0});
    p.equalities.push_back({identity(2), {}, 2.0});
    const SdpSolution s = solve(p);
    CHECK(s.status != SdpStatus::Optimal);
}

TEST_CASE("a PSD-incompatible program is certified infeasible", "[sdp]") {
    // tr X = -1 with X >= 0 has a clean Farkas certificate.
    SdpProblem p;
    p.dim = 2;
    p.cost_matrix = identity(2);
    p.equalities.push_back({identity(2), {}, -1.0});
    CHECK(solve(p).status == SdpStatus::Infeasible);
}

TEST_CASE("weak duality holds on near-feasible iterates", "[sdp]") {
    SdpOptions opts;
    opts.record_trace = true;
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 5; ++trial) {
        SdpProblem p;
        p.dim = 3;
        const CMatrix c = random_hermitian(3, rng);
        p.cost_matrix = c;
        p.equalities.push_back({identity(3), {}, 1.0});
        const SdpSolution s = solve(p, opts);
        REQUIRE(s.status == SdpStatus::Optimal);
        CHECK_THAT(s.objective, WithinAbs(herm_eig(c).eigenvalues(0), 1e-7));
        REQUIRE(!s.trace.empty());
        for (const SdpIterate &it : s.trace) {
            if (it.residuals.primal_feas <= 1e-8 && it.residuals.dual_feas <= 1e-8) {
                CHECK(it.dual_objective <= it.primal_objective + 1e-8);
            }
        }
    }
}

TEST_CASE("re-solving at a tighter tolerance barely moves the optimum", "[sdp]") {
    Rng rng = make_rng(RngSeed{43});
    const Povm povm = sic_product_povm(2);
    const DensityMatrix target = random_rank_r(4, 2, rng);
    const SubsetPlan plan = select_subset(16, 8, rng);
    const FrequencyVector f = expectations(target, povm, plan);
    const TomographySdp prog =
        compile_pvqt(povm.select(plan.measured), povm.select(plan.unmeasured), f.values, {1.0, 0.01});
    const SdpSolution loose = solve(prog.problem);
    REQUIRE(loose.status == SdpStatus::Optimal);
    SdpOptions tight;
    tight.tol = 1e-10;
    const SdpSolution fine = solve(prog.problem, tight);
    CHECK(std::abs(fine.objective - loose.objective) < 1e-6 * (1.0 + std::abs(loose.objective)));
}

TEST_CASE("solutions do not depend on constraint or variable order", "[sdp]") {
    SdpProblem p;
    p.dim = 2;
    p.n_scalars = 2;
    p.cost_matrix = diagonal({1.0, 3.0});
    p.cost_scalars = RVector(2);
    p.cost_scalars << 1.0, 2.0;
    p.equalities.push_back({identity(2), {}, 1.0});
    p.inequalities.push_back({diagonal({1.0, 0.0}), {{0, -1.0}}, 0.25});
    p.inequalities.push_back({diagonal({0.0, 1.0}), {{1, -1.0}}, 0.1});

    SdpProblem q;
    q.dim = 2;
    q.n_scalars = 2;
    q.cost_matrix = p.cost_matrix;
    q.cost_scalars = RVector(2);
    q.cost_scalars << 2.0, 1.0;
    q.equalities = p.equalities;
    q.inequalities.push_back({diagonal({0.0, 1.0}), {{0, -1.0}}, 0.1});
    q.inequalities.push_back({diagonal({1.0, 0.0}), {{1, -1.0}}, 0.25});

    const SdpSolution a = solve(p);
    const SdpSolution b = solve(q);
    REQUIRE(a.status == SdpStatus::Optimal);
    REQUIRE(b.status == SdpStatus::Optimal);
    CHECK(a.X == b.X);
    CHECK(a.s(0) == b.s(1));
    CHECK(a.s(1) == b.s(0));
    CHECK(a.y(1) == b.y(2));
    CHECK(a.y(2) == b.y(1));
    CHECK(std::abs(a.objective - recomputed_objective(p, a)) < 1e-8);
}

TEST_CASE("problem validation", "[sdp]") {
    SdpProblem empty;
    empty.dim = 2;
    CHECK_THROWS_AS(solve(empty), Error);

    SdpProblem bad = smallest_eigenvalue();
    bad.cost_matrix(0, 1) = 1.0;
    CHECK_THROWS_AS(solve(bad), Error);

    SdpProblem idx = scalar_bound();
    idx.inequalities.front().scalars.front().first = 3;
    CHECK_THROWS_AS(solve(idx), Error);

    SdpProblem shape = smallest_eigenvalue();
    shape.equalities.front().matrix = identity(3);
    CHECK_THROWS_AS(solve(shape), Error);
}

TEST_CASE("debug dump carries dims and rows", "[sdp]") {
    const nlohmann::json j = sdp_to_json(diagonal_program());
    CHECK(j.at("dim") == 2);
    CHECK(j.at("equalities").size() == 2);
    CHECK(j.at("inequalities").empty());
}

TEST_CASE("one-qubit quorum data pins the state", "[sdp]") {
    const Povm sic = qubit_sic();
    const RMatrix gram = gram_matrix(sic);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng rng = make_rng(RngSeed{44 + seed});
        const DensityMatrix target = haar_pure(1, rng);
        const SubsetPlan plan = prefix_subset(4, 4);
        const FrequencyVector f = expectations(target, sic, plan);

        // Linear inversion: rho = sum x_j E_j with G x = f.
        const RVector fv = Eigen::Map<const RVector>(f.values.data(), 4);
        const RVector x = gram.ldlt().solve(fv);
        CMatrix inv = CMatrix::Zero(2, 2);
        for (std::size_t j = 0; j < 4; ++j) {
            inv += x(static_cast<Eigen::Index>(j)) * sic[j];
        }
        CHECK((inv - target.mat()).norm() < 1e-12);

        const auto meas = sic.select(plan.measured);
        const TomographySdpResult r =
            solve_tomography_sdp(compile_pvqt(meas, {}, f.values, kVqtInf));
        REQUIRE(r.solution.status == SdpStatus::Optimal);
        CHECK(trace_distance(r.rho, DensityMatrix::unchecked(inv)) < 1e-6);
        CHECK(!r.delta_inf.has_value());
    }
}

TEST_CASE("three-qubit quorum reconstruction is within 1e-4", "[sdp]") {
    Rng rng = make_rng(RngSeed{45});
    const Povm povm = sic_product_povm(3);
    const DensityMatrix target = haar_pure(3, rng);
    const SubsetPlan plan = prefix_subset(64, 64);
    const FrequencyVector f = expectations(target, povm, plan);
    const TomographySdpResult r =
        solve_tomography_sdp(compile_pvqt(povm.effects(), {}, f.values, kVqt));
    REQUIRE(r.solution.status == SdpStatus::Optimal);
    CHECK(trace_distance(r.rho, target) < 1e-4);
    CHECK_THAT(r.rho.mat().trace().real(), WithinAbs(1.0, 1e-12));
}

TEST_CASE("exact data with zero tolerances is feasible for the compiled bounds", "[sdp]") {
    Rng rng = make_rng(RngSeed{46});
    const Povm povm = sic_product_povm(2);
    const DensityMatrix target = random_rank_r(4, 2, rng);
    const SubsetPlan plan = select_subset(16, 7, rng);
    const FrequencyVector f = expectations(target, povm, plan);
    for (const PvqtParams params : {kVqt, kVqtInf, PvqtParams{1.0, 0.01}}) {
        const TomographySdp prog = compile_pvqt(povm.select(plan.measured),
                                                povm.select(plan.unmeasured), f.values, params);
        const SdpProblem &p = prog.problem;
        // Deltas zero; delta (if present) at the largest unmeasured probability.
        RVector s = RVector::Zero(static_cast<Eigen::Index>(p.n_scalars));
        if (prog.layout.delta_index) {
            double worst = 0.0;
            for (std::size_t i : plan.unmeasured) {
                worst = std::max(worst, trace_product(povm[i], target.mat()));
            }
            s(static_cast<Eigen::Index>(*prog.layout.delta_index)) = worst;
        }
        auto lhs = [&](const LinearConstraint &c) {
            double v = c.matrix.size() != 0 ? trace_product(c.matrix, target.mat()) : 0.0;
            for (const auto &[idx, coef] : c.scalars) {
                v += coef * s(static_cast<Eigen::Index>(idx));
            }
            return v;
        };
        for (const LinearConstraint &c : p.equalities) {
            CHECK_THAT(lhs(c), WithinAbs(c.rhs, 1e-12));
        }
        for (const LinearConstraint &c : p.inequalities) {
            CHECK(lhs(c) <= c.rhs + 1e-12);
        }
        // Each |tr(E rho) - f| <= Delta f becomes two one-sided rows.
        const std::size_t bounds = prog.layout.delta_index ? plan.unmeasured.size() : 0;
        CHECK(p.inequalities.size() == 2 * plan.measured.size() + bounds);
    }
}
