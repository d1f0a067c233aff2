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
 * Experiment sweeps: sample targets, draw measured subsets, run every method
 * on identical data and summarize the per-trial metrics.
 *
 * Seeds per work unit:
 *
 *     target  derive_seed(root, "state", {i})
 *     plan    derive_seed(root, "plan",  {i, k})
 *     noise   derive_seed(root, "noise", {i, k})
 *
 * so adding methods or K values never changes what the other trials see.
 */

#pragma once

#include "tomoforge/error.hpp"
#include "tomoforge/estimators.hpp"
#include "tomoforge/measure.hpp"
#include "tomoforge/metrics.hpp"
#include "tomoforge/povm.hpp"
#include "tomoforge/rng.hpp"
#include "tomoforge/sdp.hpp"
#include "tomoforge/states.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace tomoforge {

struct ExperimentConfig {
    int n_qubits = 3;
    std::size_t n_states = 10;
    Eigen::Index rank = 1;
    std::vector<std::size_t> k_values;
    std::vector<MethodSpec> methods;
    double noise_level = 0.0;
    NoiseModel noise_model = NoiseModel::Relative;
    RngSeed root_seed{20260101};
    double convergence_cutoff = 1e-4; ///< trace distance counted as converged
    SdpOptions sdp{};
    MaxEntOptions maxent{};
    bool record_wall_time = false;

    [[nodiscard]] std::size_t n_effects() const {
        return std::size_t{1} << (2 * n_qubits);
    }

    void validate() const {
        auto fail = [](const std::string &msg) { throw Error(Errc::InvalidArgument, msg); };
        if (n_qubits < 1 || n_qubits > 6) {
            fail("n_qubits must lie in [1, 6]");
        }
        if (n_states < 1) {
            fail("n_states must be positive");
        }
        if (rank < 1 || rank > (Eigen::Index{1} << n_qubits)) {
            fail("rank must lie in [1, 2^n_qubits]");
        }
        if (k_values.empty()) {
            fail("k_values is empty");
        }
        for (std::size_t i = 0; i < k_values.size(); ++i) {
            if (k_values[i] < 1 || k_values[i] > n_effects()) {
                fail("k value " + std::to_string(k_values[i]) + " outside [1, 4^n_qubits]");
            }
            if (i > 0 && k_values[i] <= k_values[i - 1]) {
                fail("k_values must be strictly ascending");
            }
        }
        if (methods.empty()) {
            fail("methods is empty");
        }
        if (!(noise_level >= 0.0 && noise_level < 1.0)) {
            fail("noise_level must lie in [0, 1)");
        }
        if (!(convergence_cutoff > 0.0)) {
            fail("convergence_cutoff must be positive");
        }
    }
};

struct TrialResult {
    std::size_t state_id = 0;
    std::size_t k = 0;
    std::string method;
    double fidelity_to_target = 0.0;
    double trace_dist_to_target = 0.0;
    double fidelity_to_maxent = 0.0;
    double vn_entropy = 0.0;
    double kl_uniform = 0.0;
    double total_unmeasured_mass = 0.0;
    double max_delta = 0.0; ///< max_i Delta_i, 0 for MaxEnt
    std::string solver_status;
    bool ok = false;        ///< solver reported a usable point
    bool converged = false; ///< trace_dist_to_target < convergence_cutoff
    double wall_time_ms = 0.0;

    friend bool operator==(const TrialResult &, const TrialResult &) = default;
};

/// Metric columns understood by aggregate() and histogram().
inline const std::vector<std::string> &metric_names() {
    static const std::vector<std::string> names = {
        "fidelity_to_target", "trace_dist_to_target", "fidelity_to_maxent",
        "vn_entropy",         "kl_uniform",           "total_unmeasured_mass",
        "max_delta",          "converged",
    };
    return names;
}

inline double metric_value(const TrialResult &t, std::string_view metric) {
    if (metric == "fidelity_to_target") return t.fidelity_to_target;
    if (metric == "trace_dist_to_target") return t.trace_dist_to_target;
    if (metric == "fidelity_to_maxent") return t.fidelity_to_maxent;
    if (metric == "vn_entropy") return t.vn_entropy;
    if (metric == "kl_uniform") return t.kl_uniform;
    if (metric == "total_unmeasured_mass") return t.total_unmeasured_mass;
    if (metric == "max_delta") return t.max_delta;
    if (metric == "converged") return t.converged ? 1.0 : 0.0;
    throw Error(Errc::UnknownMetric, "unknown metric '" + std::string(metric) + "'");
}

namespace detail {

inline TrialResult score(const ExperimentConfig &cfg, const Povm &povm, const SubsetPlan &plan,
                         const DensityMatrix &target, const Reconstruction &rec,
                         const DensityMatrix &maxent_rho, std::size_t state_id) {
    TrialResult t;
    t.state_id = state_id;
    t.k = plan.measured.size();
    t.method = rec.method.tag();
    t.fidelity_to_target = fidelity(rec.rho, target);
    t.trace_dist_to_target = trace_distance(rec.rho, target);
    t.fidelity_to_maxent = rec.method.kind == MethodKind::MaxEnt ? 1.0 : fidelity(rec.rho, maxent_rho);
    t.vn_entropy = vn_entropy(rec.rho);
    if (!plan.unmeasured.empty()) {
        const UnmeasuredVector u = unmeasured_vector(rec.rho, povm, plan);
        t.total_unmeasured_mass = u.total_mass;
        try {
            t.kl_uniform = kl_from_uniform(u);
        } catch (const Error &e) {
            if (e.code() != Errc::ZeroMass) {
                throw;
            }
        }
    }
    for (double d : rec.deltas) {
        t.max_delta = std::max(t.max_delta, d);
    }
    t.solver_status = rec.diagnostics.status;
    t.ok = rec.diagnostics.ok;
    t.converged = t.trace_dist_to_target < cfg.convergence_cutoff;
    return t;
}

inline TrialResult failed_trial(std::size_t state_id, std::size_t k, const MethodSpec &m,
                                const Error &e) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    TrialResult t;
    t.state_id = state_id;
    t.k = k;
    t.method = m.tag();
    t.fidelity_to_target = t.trace_dist_to_target = t.fidelity_to_maxent = nan;
    t.vn_entropy = t.kl_uniform = t.total_unmeasured_mass = t.max_delta = nan;
    t.solver_status = std::string("Error:") + std::string(errc_name(e.code()));
    return t;
}

/// All methods for one (state, k) pair, in cfg.methods order.
inline std::vector<TrialResult> run_unit(const ExperimentConfig &cfg, const Povm &povm,
                                         const DensityMatrix &target, std::size_t state_id,
                                         std::size_t k) {
    Rng plan_rng = make_rng(derive_seed(cfg.root_seed, "plan", {state_id, k}));
    const SubsetPlan plan = select_subset(povm.size(), k, plan_rng);
    FrequencyVector f = expectations(target, povm, plan);
    if (cfg.noise_level > 0.0) {
        Rng noise_rng = make_rng(derive_seed(cfg.root_seed, "noise", {state_id, k}));
        f = add_uniform_noise(std::move(f), cfg.noise_level, noise_rng, cfg.noise_model);
    }

    using Clock = std::chrono::steady_clock;
    std::optional<Reconstruction> maxent;
    double maxent_ms = 0.0;
    auto run_maxent = [&] {
        const auto t0 = Clock::now();
        maxent = maxent_estimate(povm, f, cfg.maxent);
        maxent_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    };
    try {
        run_maxent();
    } catch (const Error &) {
        maxent.reset();
    }

    std::vector<TrialResult> out;
    out.reserve(cfg.methods.size());
    for (const MethodSpec &m : cfg.methods) {
        try {
            if (m.kind == MethodKind::MaxEnt) {
                if (!maxent) {
                    run_maxent();
                }
                TrialResult t = score(cfg, povm, plan, target, *maxent, maxent->rho, state_id);
                t.wall_time_ms = cfg.record_wall_time ? maxent_ms : 0.0;
                out.push_back(std::move(t));
                continue;
            }
            const auto t0 = Clock::now();
            const Reconstruction rec = pvqt_estimate(povm, plan, f, m.params, cfg.sdp);
            const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
            if (!maxent) {
                run_maxent();
            }
            TrialResult t = score(cfg, povm, plan, target, rec, maxent->rho, state_id);
            t.wall_time_ms = cfg.record_wall_time ? ms : 0.0;
            out.push_back(std::move(t));
        } catch (const Error &e) {
            out.push_back(failed_trial(state_id, k, m, e));
        }
    }
    return out;
}

} // namespace detail

/// Target state for sample i; depends only on (root_seed, i, n_qubits, rank).
inline DensityMatrix sample_target(const ExperimentConfig &cfg, std::size_t i) {
    Rng rng = make_rng(derive_seed(cfg.root_seed, "state", {i}));
    return random_rank_r(Eigen::Index{1} << cfg.n_qubits, cfg.rank, rng);
}

/// Rows ordered by (state, k, method). Output is independent of n_threads.
inline std::vector<TrialResult> run_experiment(const ExperimentConfig &cfg,
                                               unsigned n_threads = 1) {
    cfg.validate();
    const Povm povm = sic_product_povm(cfg.n_qubits);
    const std::size_t n_k = cfg.k_values.size();
    const std::size_t n_units = cfg.n_states * n_k;

    std::vector<DensityMatrix> targets;
    targets.reserve(cfg.n_states);
    for (std::size_t i = 0; i < cfg.n_states; ++i) {
        targets.push_back(sample_target(cfg, i));
    }

    std::vector<std::vector<TrialResult>> slots(n_units);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t u = next++; u < n_units; u = next++) {
            const std::size_t i = u / n_k;
            slots[u] = detail::run_unit(cfg, povm, targets[i], i, cfg.k_values[u % n_k]);
        }
    };
    n_threads = std::max(1U, std::min<unsigned>(n_threads, static_cast<unsigned>(n_units)));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) {
            pool.emplace_back(worker);
        }
    }

    std::vector<TrialResult> out;
    out.reserve(n_units * cfg.methods.size());
    for (auto &slot : slots) {
        for (auto &t : slot) {
            out.push_back(std::move(t));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Summaries

struct SummaryStats {
    double mean = 0.0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 0;
};

/// Quantile by linear interpolation between order statistics at h = (n-1)p.
inline double quantile_sorted(const std::vector<double> &sorted, double p) {
    if (sorted.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline SummaryStats summarize(std::vector<double> values) {
    SummaryStats s;
    s.count = values.size();
    if (values.empty()) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        s.mean = s.median = s.q1 = s.q3 = s.min = s.max = nan;
        return s;
    }
    std::sort(values.begin(), values.end());
    double total = 0.0;
    for (double v : values) {
        total += v;
    }
    s.mean = total / static_cast<double>(values.size());
    s.median = quantile_sorted(values, 0.5);
    s.q1 = quantile_sorted(values, 0.25);
    s.q3 = quantile_sorted(values, 0.75);
    s.min = values.front();
    s.max = values.back();
    return s;
}

struct AggregateRow {
    std::size_t k = 0;
    std::string method;
    std::string metric;
    SummaryStats stats;
    std::size_t failures = 0;
};

/// Groups by (k, method) in order of first appearance after sorting by k.
/// Trials whose solver did not report ok are counted as failures only.
inline std::vector<AggregateRow> aggregate(const std::vector<TrialResult> &results) {
    std::vector<std::pair<std::size_t, std::string>> groups;
    std::map<std::pair<std::size_t, std::string>, std::vector<const TrialResult *>> members;
    for (const TrialResult &t : results) {
        auto key = std::make_pair(t.k, t.method);
        auto [it, inserted] = members.try_emplace(key);
        if (inserted) {
            groups.push_back(key);
        }
        it->second.push_back(&t);
    }
    std::stable_sort(groups.begin(), groups.end(),
                     [](const auto &a, const auto &b) { return a.first < b.first; });

    std::vector<AggregateRow> rows;
    for (const auto &key : groups) {
        const auto &trials = members.at(key);
        std::size_t failures = 0;
        for (const TrialResult *t : trials) {
            failures += t->ok ? 0 : 1;
        }
        for (const std::string &metric : metric_names()) {
            std::vector<double> values;
            for (const TrialResult *t : trials) {
                if (t->ok) {
                    values.push_back(metric_value(*t, metric));
                }
            }
            rows.push_back({key.first, key.second, metric, summarize(std::move(values)), failures});
        }
    }
    return rows;
}

struct Histogram {
    std::vector<double> edges; ///< bins + 1 entries
    std::vector<std::size_t> counts;
    std::size_t excluded = 0; ///< samples outside [lo, hi] or non-finite

    [[nodiscard]] std::size_t total() const {
        std::size_t n = 0;
        for (std::size_t c : counts) {
            n += c;
        }
        return n;
    }
};

/// Bins are [e_j, e_{j+1}) except the last, which is closed.
inline Histogram histogram(const std::vector<double> &values, std::size_t bins, double lo,
                           double hi) {
    if (bins < 1) {
        throw Error(Errc::InvalidArgument, "histogram needs at least one bin");
    }
    if (!(hi > lo)) {
        throw Error(Errc::InvalidArgument, "histogram range must satisfy lo < hi");
    }
    Histogram h;
    h.edges.resize(bins + 1);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t j = 0; j <= bins; ++j) {
        h.edges[j] = lo + width * static_cast<double>(j);
    }
    h.edges.back() = hi;
    h.counts.assign(bins, 0);
    for (double v : values) {
        if (!std::isfinite(v) || v < lo || v > hi) {
            ++h.excluded;
            continue;
        }
        auto j = static_cast<std::size_t>((v - lo) / width);
        j = std::min(j, bins - 1);
        // Guard the floor against rounding at interior edges.
        while (j > 0 && v < h.edges[j]) {
            --j;
        }
        while (j + 1 < bins && v >= h.edges[j + 1]) {
            ++j;
        }
        ++h.counts[j];
    }
    return h;
}

inline Histogram histogram(const std::vector<TrialResult> &results, std::string_view metric,
                           std::size_t bins, double lo, double hi) {
    std::vector<double> values;
    for (const TrialResult &t : results) {
        if (t.ok) {
            values.push_back(metric_value(t, metric));
        }
    }
    return histogram(values, bins, lo, hi);
}

} // namespace tomoforge
