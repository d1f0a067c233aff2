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

#include "tomoforge/measure.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>

using namespace tomoforge;
using Catch::Matchers::WithinAbs;

TEST_CASE("expectations on the maximally mixed state", "[measure]") {
    const Povm p = sic_product_povm(2);
    const FrequencyVector f = expectations(maximally_mixed(4), p, prefix_subset(16, 16));
    REQUIRE(f.values.size() == 16);
    for (std::size_t i = 0; i < 16; ++i) {
        CHECK_THAT(f.values[i], WithinAbs(p[i].trace().real() / 4.0, 1e-15));
    }
    CHECK_THAT(std::accumulate(f.values.begin(), f.values.end(), 0.0), WithinAbs(1.0, 1e-10));
}

TEST_CASE("expectations of |0> on the first SIC effect", "[measure]") {
    CVector zero = CVector::Zero(2);
    zero(0) = 1.0;
    const FrequencyVector f = expectations(pure_state(zero), qubit_sic(), prefix_subset(4, 1));
    REQUIRE(f.values.size() == 1);
    CHECK_THAT(f.values[0], WithinAbs(0.5, 1e-15));
    CHECK(f.indices == std::vector<std::size_t>{0});
}

TEST_CASE("expectations follow the plan and reject mismatched dims", "[measure]") {
    Rng rng = make_rng(RngSeed{31});
    const Povm p = sic_product_povm(3);
    const DensityMatrix rho = random_rank_r(8, 2, rng);
    const SubsetPlan plan = select_subset(64, 10, rng);
    const FrequencyVector f = expectations(rho, p, plan);
    CHECK(f.indices == plan.measured);
    for (std::size_t j = 0; j < 10; ++j) {
        CHECK_THAT(f.values[j], WithinAbs(trace_product(p[plan.measured[j]], rho.mat()), 1e-12));
        CHECK(f.values[j] >= 0.0);
        CHECK(f.values[j] <= 1.0);
    }
    REQUIRE_THROWS_AS(expectations(maximally_mixed(4), p, plan), Error);
}

TEST_CASE("expectations are linear in the state", "[measure]") {
    Rng rng = make_rng(RngSeed{32});
    const Povm p = sic_product_povm(2);
    const SubsetPlan plan = prefix_subset(16, 16);
    const DensityMatrix a = random_rank_r(4, 1, rng);
    const DensityMatrix b = random_rank_r(4, 3, rng);
    const DensityMatrix mid = DensityMatrix::unchecked((a.mat() + b.mat()) / 2.0);
    const auto fa = expectations(a, p, plan).values;
    const auto fb = expectations(b, p, plan).values;
    const auto fm = expectations(mid, p, plan).values;
    for (std::size_t i = 0; i < 16; ++i) {
        CHECK_THAT(fm[i], WithinAbs((fa[i] + fb[i]) / 2.0, 1e-12));
    }
}

TEST_CASE("zero noise returns the input unchanged", "[measure]") {
    Rng rng = make_rng(RngSeed{33});
    FrequencyVector f;
    f.values = {0.1, 0.2, 0.7};
    const FrequencyVector g = add_uniform_noise(f, 0.0, rng);
    CHECK(g.values == f.values);
}

TEST_CASE("relative noise fixes zero and stays in the unit interval", "[measure]") {
    Rng rng = make_rng(RngSeed{34});
    FrequencyVector f;
    f.values = {0.0, 1.0, 0.999, 0.5};
    for (int s = 0; s < 1000; ++s) {
        const FrequencyVector g = add_uniform_noise(f, 0.5, rng);
        CHECK(g.values[0] == 0.0);
        for (double v : g.values) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
    f.values = {0.01, 0.99};
    const FrequencyVector h = add_uniform_noise(f, 0.9, rng, NoiseModel::Additive);
    for (double v : h.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("five percent relative noise has the right mean and support", "[measure]") {
    Rng rng = make_rng(RngSeed{35});
    FrequencyVector f;
    f.values.assign(100000, 0.4);
    const FrequencyVector g = add_uniform_noise(f, 0.05, rng);
    const double mean = std::accumulate(g.values.begin(), g.values.end(), 0.0) / 1e5;
    CHECK_THAT(mean, WithinAbs(0.4, 1e-3));
    CHECK(*std::min_element(g.values.begin(), g.values.end()) >= 0.38);
    CHECK(*std::max_element(g.values.begin(), g.values.end()) <= 0.42);
    CHECK(g.noise_level == 0.05);
    CHECK(g.noise_model == NoiseModel::Relative);
}

TEST_CASE("noise level outside [0, 1) is rejected", "[measure]") {
    Rng rng = make_rng(RngSeed{36});
    FrequencyVector f;
    f.values = {0.5};
    CHECK_THROWS_AS(add_uniform_noise(f, 1.0, rng), Error);
    CHECK_THROWS_AS(add_uniform_noise(f, -0.1, rng), Error);
}

TEST_CASE("seeded noisy pipeline is bit reproducible", "[measure]") {
    auto run = [] {
        Rng s = make_rng(RngSeed{37});
        const DensityMatrix rho = haar_pure(3, s);
        Rng pr = make_rng(derive_seed(RngSeed{37}, "plan", {0, 16}));
        const SubsetPlan plan = select_subset(64, 16, pr);
        Rng nr = make_rng(derive_seed(RngSeed{37}, "noise", {0, 16}));
        return add_uniform_noise(expectations(rho, sic_product_povm(3), plan), 0.05, nr).values;
    };
    CHECK(run() == run());
}

TEST_CASE("derived seeds separate tags and indices", "[measure]") {
    const RngSeed root{99};
    CHECK(derive_seed(root, "plan", {1, 2}) == derive_seed(root, "plan", {1, 2}));
    CHECK(!(derive_seed(root, "plan", {1, 2}) == derive_seed(root, "noise", {1, 2})));
    CHECK(!(derive_seed(root, "plan", {1, 2}) == derive_seed(root, "plan", {2, 1})));
}
