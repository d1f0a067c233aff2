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

// Acceptance criteria A1-A11. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.
//
//     acceptance [--configs DIR] [--only A5,A6]

#include "tomoforge/cli.hpp"
#include "tomoforge/estimators.hpp"
#include "tomoforge/harness.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace tomoforge;

namespace {

// Pinned thresholds.
constexpr double kA1TraceDist = 1e-4;
constexpr double kA2MeanFidelity = 0.99;
constexpr double kA2MeanGap = 0.01;
constexpr double kA3TraceDist = 1e-6;
constexpr double kA4TraceDist = 1e-5;
constexpr double kA4Kl = 1e-8;
constexpr double kA7DeltaCap = 1e-6;
constexpr double kA7EntropySlack = 1e-4;
constexpr double kA8MeanTraceDist = 5e-2;
constexpr double kA9TraceDist = 1e-6;
constexpr double kA10Objective = 1e-7;

const MethodSpec kMaxEnt = MethodSpec::maxent();
const MethodSpec kVqtM = MethodSpec::pvqt(1.0, 0.0);
const MethodSpec kVqtInfM = MethodSpec::pvqt(0.0, 1.0);
const MethodSpec kPvqt001 = MethodSpec::pvqt(1.0, 0.01);

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

double mean_of(const std::vector<TrialResult> &rows, std::size_t k, const std::string &method,
               const std::string &metric, std::size_t *failures = nullptr) {
    double total = 0.0;
    std::size_t n = 0;
    std::size_t bad = 0;
    for (const TrialResult &t : rows) {
        if (t.k != k || t.method != method) continue;
        if (!t.ok) {
            ++bad;
            continue;
        }
        total += metric_value(t, metric);
        ++n;
    }
    if (failures != nullptr) *failures = bad;
    return n == 0 ? std::numeric_limits<double>::quiet_NaN() : total / static_cast<double>(n);
}

ExperimentConfig base_config(std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.n_qubits = 3;
    cfg.root_seed = RngSeed{seed};
    return cfg;
}

Outcome a1() {
    ExperimentConfig cfg = base_config(101);
    cfg.n_states = 20;
    cfg.k_values = {64};
    cfg.methods = {kMaxEnt, kVqtM, kVqtInfM, kPvqt001};
    const auto rows = run_experiment(cfg);
    double worst = 0.0;
    std::size_t failed = 0;
    for (const TrialResult &t : rows) {
        worst = std::max(worst, t.ok ? t.trace_dist_to_target : 1.0);
        failed += (!t.ok || !(t.trace_dist_to_target < kA1TraceDist)) ? 1 : 0;
    }
    return {failed == 0, "max trace distance " + fmt(worst) + " over " +
                             std::to_string(rows.size()) + " trials, " + std::to_string(failed) +
                             " above " + fmt(kA1TraceDist)};
}

Outcome a2(const std::vector<TrialResult> &fig2) {
    std::size_t fm = 0;
    std::size_t fv = 0;
    const double me = mean_of(fig2, 32, kMaxEnt.tag(), "fidelity_to_target", &fm);
    const double vi = mean_of(fig2, 32, kVqtInfM.tag(), "fidelity_to_target", &fv);
    const bool pass = me > kA2MeanFidelity && vi > kA2MeanFidelity &&
                      std::abs(me - vi) < kA2MeanGap;
    return {pass, "K=32 mean F: MaxEnt " + fmt(me) + ", VQTinf " + fmt(vi) + " (failures " +
                      std::to_string(fm) + "/" + std::to_string(fv) + ")"};
}

Outcome a3() {
    const Povm povm = sic_product_povm(3);
    double worst_vqt = 0.0;
    double worst_inf = 0.0;
    bool all_ok = true;
    for (std::size_t i = 0; i < 10; ++i) {
        Rng rng = make_rng(derive_seed(RngSeed{303}, "state", {i}));
        const DensityMatrix rho = haar_pure(3, rng);
        for (std::size_t k : {8U, 16U, 32U}) {
            Rng prng = make_rng(derive_seed(RngSeed{303}, "plan", {i, k}));
            const SubsetPlan plan = select_subset(povm.size(), k, prng);
            const FrequencyVector f = expectations(rho, povm, plan);
            const auto meas = povm.select(plan.measured);
            const auto unmeas = povm.select(plan.unmeasured);

            const Reconstruction vqt = pvqt_estimate(povm, plan, f, kVqt);
            const auto direct_vqt = solve_tomography_sdp(compile_vqt(meas, unmeas, f.values));
            const Reconstruction inf = pvqt_estimate(povm, plan, f, kVqtInf);
            const auto direct_inf = solve_tomography_sdp(compile_vqt_inf(meas, unmeas, f.values));
            all_ok = all_ok && vqt.diagnostics.ok && inf.diagnostics.ok &&
                     direct_vqt.solution.status == SdpStatus::Optimal &&
                     direct_inf.solution.status == SdpStatus::Optimal;
            worst_vqt = std::max(worst_vqt, trace_distance(vqt.rho, direct_vqt.rho));
            worst_inf = std::max(worst_inf, trace_distance(inf.rho, direct_inf.rho));
        }
    }
    return {all_ok && worst_vqt < kA3TraceDist && worst_inf < kA3TraceDist,
            "max TD PVQT(1,0) vs VQT " + fmt(worst_vqt) + ", PVQT(0,1) vs VQTinf " +
                fmt(worst_inf) + (all_ok ? "" : ", some solve not Optimal")};
}

Outcome a4() {
    const Povm basis = computational_basis(8);
    double worst_td = 0.0;
    double worst_kl = 0.0;
    bool all_ok = true;
    for (std::size_t i = 0; i < 10; ++i) {
        Rng rng = make_rng(derive_seed(RngSeed{404}, "state", {i}));
        std::uniform_real_distribution<double> u(0.05, 1.0);
        RVector w(8);
        for (Eigen::Index j = 0; j < 8; ++j) w(j) = u(rng);
        w /= w.sum();
        const DensityMatrix rho = DensityMatrix::unchecked(w.cast<Complex>().asDiagonal());
        for (std::size_t k : {2U, 4U, 6U}) {
            Rng prng = make_rng(derive_seed(RngSeed{404}, "plan", {i, k}));
            const SubsetPlan plan = select_subset(8, k, prng);
            const FrequencyVector f = expectations(rho, basis, plan);
            const Reconstruction me = maxent_estimate(basis, f);
            const Reconstruction inf = pvqt_estimate(basis, plan, f, kVqtInf);
            all_ok = all_ok && me.diagnostics.ok && inf.diagnostics.ok;
            worst_td = std::max(worst_td, trace_distance(me.rho, inf.rho));
            worst_kl = std::max({worst_kl, kl_from_uniform(unmeasured_vector(me.rho, basis, plan)),
                                 kl_from_uniform(unmeasured_vector(inf.rho, basis, plan))});
        }
    }
    return {all_ok && worst_td < kA4TraceDist && worst_kl < kA4Kl,
            "max TD MaxEnt vs VQTinf " + fmt(worst_td) + ", max KL " + fmt(worst_kl)};
}

std::vector<TrialResult> a5_sweep() {
    ExperimentConfig cfg = base_config(505);
    cfg.n_states = 50;
    cfg.k_values = {16, 24, 32};
    cfg.methods = {kMaxEnt, kPvqt001, kVqtInfM, kVqtM};
    return run_experiment(cfg);
}

Outcome a5(const std::vector<TrialResult> &rows) {
    bool pass = true;
    std::string detail;
    for (std::size_t k : {16U, 24U, 32U}) {
        const double p = mean_of(rows, k, kPvqt001.tag(), "fidelity_to_maxent");
        const double v = mean_of(rows, k, kVqtInfM.tag(), "fidelity_to_maxent");
        pass = pass && p >= v;
        detail += "K=" + std::to_string(k) + " PVQT(1,0.01) " + fmt(p) + (p >= v ? " >= " : " < ") +
                  "VQTinf " + fmt(v) + "; ";
    }
    return {pass, detail};
}

Outcome a6(const std::vector<TrialResult> &rows) {
    bool pass = true;
    std::string detail;
    for (std::size_t k : {16U, 24U, 32U}) {
        const double inf = mean_of(rows, k, kVqtInfM.tag(), "kl_uniform");
        const double vqt = mean_of(rows, k, kVqtM.tag(), "kl_uniform");
        pass = pass && inf <= vqt;
        detail += "K=" + std::to_string(k) + " KL VQTinf " + fmt(inf) + (inf <= vqt ? " <= " : " > ") +
                  "VQT " + fmt(vqt) + "; ";
    }
    return {pass, detail};
}

Outcome a7(const std::vector<TrialResult> &rows) {
    std::map<std::pair<std::size_t, std::size_t>, double> maxent_entropy;
    for (const TrialResult &t : rows) {
        if (t.method == kMaxEnt.tag()) maxent_entropy[{t.state_id, t.k}] = t.vn_entropy;
    }
    std::size_t checked = 0;
    std::size_t violations = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (const TrialResult &t : rows) {
        if (t.method == kMaxEnt.tag() || !t.ok || !(t.max_delta <= kA7DeltaCap)) continue;
        const double s_me = maxent_entropy.at({t.state_id, t.k});
        ++checked;
        worst = std::max(worst, t.vn_entropy - s_me);
        violations += s_me >= t.vn_entropy - kA7EntropySlack ? 0 : 1;
    }
    return {violations == 0 && checked > 0,
            std::to_string(checked) + " trials with all Delta <= 1e-6, " +
                std::to_string(violations) + " violations, max S(VQT) - S(MaxEnt) = " + fmt(worst)};
}

Outcome a8() {
    ExperimentConfig cfg = base_config(808);
    cfg.n_states = 30;
    cfg.rank = 2;
    cfg.noise_level = 0.05;
    cfg.k_values = {16, 32, 45};
    cfg.methods = {kMaxEnt, kVqtM, kVqtInfM, kPvqt001};
    const auto rows = run_experiment(cfg);
    bool pass = true;
    std::string detail;
    for (const MethodSpec &m : cfg.methods) {
        const double d16 = mean_of(rows, 16, m.tag(), "trace_dist_to_target");
        const double d32 = mean_of(rows, 32, m.tag(), "trace_dist_to_target");
        const double d45 = mean_of(rows, 45, m.tag(), "trace_dist_to_target");
        const bool ok = d45 < kA8MeanTraceDist && d32 < d16 && d45 < d32;
        pass = pass && ok;
        detail += m.tag() + " " + fmt(d16) + ">" + fmt(d32) + ">" + fmt(d45) + (ok ? "" : " (bad)") +
                  "; ";
    }
    return {pass, "mean TD at K=16,32,45: " + detail};
}

Outcome a9() {
    const Povm sic = qubit_sic();
    const SubsetPlan all = prefix_subset(4, 4);
    const RMatrix gram = gram_matrix(sic);
    double worst = 0.0;
    for (std::size_t i = 0; i < 20; ++i) {
        Rng rng = make_rng(derive_seed(RngSeed{909}, "state", {i}));
        const DensityMatrix rho = random_rank_r(2, 2, rng);
        const FrequencyVector f = expectations(rho, sic, all);
        const RVector x = gram.lu().solve(Eigen::Map<const RVector>(f.values.data(), 4));
        CMatrix oracle = CMatrix::Zero(2, 2);
        for (std::size_t j = 0; j < 4; ++j) oracle += x(static_cast<Eigen::Index>(j)) * sic[j];
        const Reconstruction me = maxent_estimate(sic, f);
        worst = std::max(worst, trace_distance(me.rho, DensityMatrix::project(oracle)));
    }
    return {worst < kA9TraceDist, "max TD MaxEnt vs Gram inversion " + fmt(worst)};
}

Outcome a10() {
    struct Case {
        SdpProblem p;
        double optimum;
    };
    std::vector<Case> cases(3);
    cases[0].p.dim = 2;
    cases[0].p.cost_matrix = diagonal({1.0, 2.0});
    cases[0].p.equalities.push_back({identity(2), {}, 1.0});
    cases[0].optimum = 1.0;
    cases[1].p.dim = 1;
    cases[1].p.n_scalars = 1;
    cases[1].p.cost_scalars = RVector::Ones(1);
    cases[1].p.inequalities.push_back({CMatrix(), {{0, -1.0}}, -3.0});
    cases[1].optimum = 3.0;
    cases[2].p.dim = 2;
    cases[2].p.cost_matrix = identity(2);
    cases[2].p.equalities.push_back({diagonal({1.0, 0.0}), {}, 1.0});
    cases[2].p.equalities.push_back({diagonal({0.0, 1.0}), {}, 2.0});
    cases[2].optimum = 3.0;
    bool pass = true;
    std::string detail;
    for (const Case &c : cases) {
        const SdpSolution s = solve(c.p);
        const double err = std::abs(s.objective - c.optimum);
        pass = pass && s.status == SdpStatus::Optimal && err < kA10Objective;
        detail += fmt(s.objective) + " (err " + fmt(err) + ") ";
    }
    return {pass, "objectives " + detail};
}

std::string trials_bytes(const std::vector<TrialResult> &rows, bool wall) {
    std::ostringstream s;
    cli::write_trials_csv(s, rows, wall);
    return s.str();
}

} // namespace

int main(int argc, char **argv) {
    std::filesystem::path configs = "configs";
    std::set<std::string> only;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--configs" && i + 1 < argc) {
            configs = argv[++i];
        } else if (arg == "--only" && i + 1 < argc) {
            std::stringstream list(argv[++i]);
            for (std::string id; std::getline(list, id, ',');) only.insert(id);
        } else {
            std::cerr << "usage: acceptance [--configs DIR] [--only A1,A2,...]\n";
            return 2;
        }
    }
    auto wanted = [&](const std::string &id) { return only.empty() || only.contains(id); };

    int failures = 0;
    auto report = [&](const std::string &id, const std::function<Outcome()> &body) {
        if (!wanted(id)) return;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = body();
        } catch (const std::exception &e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failures += o.pass ? 0 : 1;
        std::printf("%s %s  %s [%.1fs]\n", id.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                    secs);
        std::fflush(stdout);
    };

    // The fig2 preset feeds A2 and both runs of A11.
    std::vector<TrialResult> fig2_first;
    std::string fig2_bytes_first;
    bool fig2_wall = false;
    if (wanted("A2") || wanted("A11")) {
        const cli::LoadedConfig fig2 = cli::load_config(configs / "fig2_3q_pure.json");
        fig2_wall = fig2.config.record_wall_time;
        fig2_first = run_experiment(fig2.config);
        fig2_bytes_first = trials_bytes(fig2_first, fig2_wall);
    }

    report("A1", a1);
    report("A2", [&] { return a2(fig2_first); });
    report("A3", a3);
    report("A4", a4);
    std::vector<TrialResult> sweep;
    if (wanted("A5") || wanted("A6") || wanted("A7")) sweep = a5_sweep();
    report("A5", [&] { return a5(sweep); });
    report("A6", [&] { return a6(sweep); });
    report("A7", [&] { return a7(sweep); });
    report("A8", a8);
    report("A9", a9);
    report("A10", a10);
    report("A11", [&] {
        const cli::LoadedConfig fig2 = cli::load_config(configs / "fig2_3q_pure.json");
        const std::string second = trials_bytes(run_experiment(fig2.config), fig2_wall);
        return Outcome{second == fig2_bytes_first,
                       "fig2 preset trials.csv " + std::to_string(second.size()) + " bytes, " +
                           (second == fig2_bytes_first ? "identical" : "differs") +
                           " across two runs"};
    });

    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
